use crate::error::{Error, Result};

/// Square sparse matrix in compressed sparse row form.
///
/// Column indices are sorted within each row and unique. Zero values are never
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` triplets; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn with_capacity(dim: usize, capacity: usize) -> Self {
        Self { dim, entries: Vec::with_capacity(capacity) }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.dim && col < self.dim, "({row}, {col}) out of range");
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn build(mut self) -> SparseMatrix {
        self.entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(self.entries.len());
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        // drop entries that cancelled to zero
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            dim: self.dim,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }
}

/// Builds a matrix row by row with strictly increasing columns per row,
/// without the intermediate triplet list.
#[derive(Debug, Clone)]
pub struct RowBuilder {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl RowBuilder {
    pub fn with_capacity(dim: usize, capacity: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        Self {
            dim,
            row_ptr,
            col_idx: Vec::with_capacity(capacity),
            values: Vec::with_capacity(capacity),
        }
    }

    /// Appends to the current row; zeros are skipped.
    pub fn push(&mut self, col: usize, value: f64) {
        debug_assert!(col < self.dim);
        debug_assert!(
            self.col_idx.len() == *self.row_ptr.last().unwrap() || *self.col_idx.last().unwrap() < col,
            "columns must increase within a row"
        );
        if value != 0.0 {
            self.col_idx.push(col);
            self.values.push(value);
        }
    }

    pub fn finish_row(&mut self) {
        self.row_ptr.push(self.col_idx.len());
    }

    pub fn build(self) -> SparseMatrix {
        assert_eq!(self.row_ptr.len(), self.dim + 1, "every row must be finished");
        SparseMatrix {
            dim: self.dim,
            row_ptr: self.row_ptr,
            col_idx: self.col_idx,
            values: self.values,
        }
    }
}

impl SparseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut b = TripletBuilder::with_capacity(dim, dim);
        for i in 0..dim {
            b.push(i, i, 1.0);
        }
        b.build()
    }

    pub fn from_dense(dim: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), dim * dim);
        let mut b = TripletBuilder::new(dim);
        for r in 0..dim {
            for c in 0..dim {
                b.push(r, c, dense[r * dim + c]);
            }
        }
        b.build()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |p| vals[p])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim * self.dim];
        for (r, c, v) in self.iter() {
            d[r * self.dim + c] = v;
        }
        d
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *out = cols.iter().zip(vals).map(|(&c, v)| v * x[c]).sum();
        }
    }

    /// `y = A^T x`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut y = vec![0.0; self.dim];
        self.matvec_transpose_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(r);
            for (&c, v) in cols.iter().zip(vals) {
                y[c] += v * xr;
            }
        }
    }

    /// `‖b - A x‖ / ‖b‖`, or `‖A x‖` when `b = 0`.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> Result<f64> {
        self.check_len(b.len())?;
        let ax = self.matvec(x)?;
        let num = ax.iter().zip(b).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
        let den = super::norm(b);
        Ok(if den == 0.0 { num } else { num / den })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: len,
            });
        }
        Ok(())
    }
}
