//! One spatial dimension: three-point Laplacian in space, Galerkin in time.

use crate::basis::{source_weights, CouplingMatrix, SourceProjection, TimeBasis};
use crate::error::{Error, Result};
use crate::kernel::MemoryOrder;
use crate::sparse::{SolveReport, TripletBuilder};
use crate::system::{solve_system, time_discretization, BlockSystem, SolverOptions};
use std::fmt;
use std::sync::Arc;

/// Initial data must fall below this at the grid edges.
pub const BOUNDARY_DECAY: f64 = 1e-12;

/// Uniform grid of `m` points `x_i = x_min + i h`, `i = 0..m`, including both
/// endpoints. Values outside the grid are taken as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    m: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 points, got {m}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Domain(format!("grid bounds [{x_min}, {x_max}] are not increasing")));
        }
        Ok(Self { x_min, x_max, m })
    }

    /// Symmetric grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, m: usize) -> Result<Self> {
        Self::new(-half_width, half_width, m)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.m - 1) as f64
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.m {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.point(i)).collect()
    }
}

/// Initial field `g(x)`.
#[derive(Clone)]
pub enum InitialField1D {
    /// `exp(-x^2 / sigma^2)`.
    Gaussian { sigma: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for InitialField1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { sigma } => write!(f, "Gaussian {{ sigma: {sigma} }}"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl InitialField1D {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("Gaussian width sigma = {sigma} must be > 0")));
        }
        Ok(Self::Gaussian { sigma })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { sigma } => (-(x * x) / (sigma * sigma)).exp(),
            Self::Custom(f) => f(x),
        }
    }

    pub fn sample(&self, grid: &Grid1D) -> Vec<f64> {
        grid.points().into_iter().map(|x| self.eval(x)).collect()
    }

    /// Whether `|g|` is negligible at both grid edges.
    pub fn decays_on(&self, grid: &Grid1D) -> bool {
        let (lo, hi) = grid.bounds();
        self.eval(lo).abs() <= BOUNDARY_DECAY && self.eval(hi).abs() <= BOUNDARY_DECAY
    }
}

/// Builds `A c = g` for `g_j(x_i) = c_j(x_i) - sum_k a_jk (D2 c_k)(x_i)`.
///
/// Each `n x n` block `[A_jk]` is the `m x m` tridiagonal matrix with
/// `delta_jk + 2 a_jk / h^2` on the diagonal and `-a_jk / h^2` beside it.
pub fn assemble_1d(
    coupling: &CouplingMatrix,
    weights: &SourceProjection,
    g: &InitialField1D,
    grid: &Grid1D,
) -> Result<BlockSystem> {
    let n = coupling.size();
    if weights.weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.weights.len(),
        });
    }
    let m = grid.len();
    if m < 3 {
        return Err(Error::Domain(format!("1D assembly needs m >= 3, got {m}")));
    }
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let mut builder = TripletBuilder::with_capacity(n * m, n * n * (3 * m - 2));
    for j in 0..n {
        for k in 0..n {
            let a = coupling.get(j, k);
            let delta = if j == k { 1.0 } else { 0.0 };
            let (row0, col0) = (j * m, k * m);
            for i in 0..m {
                builder.push(row0 + i, col0 + i, delta + 2.0 * a * inv_h2);
                if i > 0 {
                    builder.push(row0 + i, col0 + i - 1, -a * inv_h2);
                }
                if i + 1 < m {
                    builder.push(row0 + i, col0 + i + 1, -a * inv_h2);
                }
            }
        }
    }
    let samples = g.sample(grid);
    let mut rhs = Vec::with_capacity(n * m);
    for w in &weights.weights {
        rhs.extend(samples.iter().map(|s| s * w));
    }
    Ok(BlockSystem {
        matrix: builder.build(),
        rhs,
        n,
        spatial: m,
        spacing: h,
        dimension: 1,
    })
}

/// Galerkin coefficients `c_k(x_i)` on a 1D grid.
#[derive(Debug, Clone)]
pub struct SolutionField1D {
    coeffs: Vec<f64>,
    grid: Grid1D,
    basis: TimeBasis,
    order: MemoryOrder,
    report: SolveReport,
}

impl SolutionField1D {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn basis(&self) -> &TimeBasis {
        &self.basis
    }

    pub fn order(&self) -> MemoryOrder {
        self.order
    }

    pub fn report(&self) -> &SolveReport {
        &self.report
    }

    /// All coefficients, `k * m + i`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize, i: usize) -> f64 {
        self.coeffs[k * self.grid.len() + i]
    }

    /// `c_0(x_i) .. c_{n-1}(x_i)`.
    pub fn coefficients_at(&self, i: usize) -> Vec<f64> {
        (0..self.basis.size()).map(|k| self.coefficient(k, i)).collect()
    }

    /// `f_n(x_i, t)` on every grid point.
    pub fn at_time(&self, t: f64) -> Result<Vec<f64>> {
        self.basis.check_time(t)?;
        let phi = self.basis.eval_all(t);
        let m = self.grid.len();
        let mut out = vec![0.0; m];
        for (k, p) in phi.iter().enumerate() {
            for (o, c) in out.iter_mut().zip(&self.coeffs[k * m..(k + 1) * m]) {
                *o += c * p;
            }
        }
        Ok(out)
    }
}

/// Solves on `[0, T]` with default options.
pub fn solve_1d(
    order: MemoryOrder,
    horizon: f64,
    n: usize,
    grid: &Grid1D,
    g: &InitialField1D,
) -> Result<SolutionField1D> {
    solve_1d_with(order, horizon, n, grid, g, &SolverOptions::default())
}

pub fn solve_1d_with(
    order: MemoryOrder,
    horizon: f64,
    n: usize,
    grid: &Grid1D,
    g: &InitialField1D,
    options: &SolverOptions,
) -> Result<SolutionField1D> {
    if !g.decays_on(grid) {
        log::warn!("initial field exceeds {BOUNDARY_DECAY:e} at the grid edges; enlarge the grid");
    }
    let (basis, coupling) = time_discretization(order, horizon, n, options.quadrature)?;
    let weights = source_weights(&basis)?;
    let system = assemble_1d(&coupling, &weights, g, grid)?;
    let (coeffs, report) = solve_system(&system, &coupling, options)?;
    Ok(SolutionField1D {
        coeffs,
        grid: *grid,
        basis,
        order,
        report,
    })
}

/// `max_i |numeric_i - reference_i|`.
pub fn sup_error(numeric: &[f64], reference: &[f64]) -> Result<f64> {
    if numeric.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: numeric.len(),
            actual: reference.len(),
        });
    }
    Ok(numeric
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{coupling_matrix, QuadratureSpec};

    fn scalar_coupling(a: f64) -> CouplingMatrix {
        CouplingMatrix::from_entries(vec![a], 1, 1.0, MemoryOrder::HEAT).unwrap()
    }

    #[test]
    fn grid_basics() {
        let g = Grid1D::symmetric(15.0, 151).unwrap();
        assert!((g.spacing() - 0.2).abs() < 1e-15);
        assert_eq!(g.point(0), -15.0);
        assert_eq!(g.point(150), 15.0);
        let pts = g.points();
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
        for i in 0..151 {
            assert!((pts[i] + pts[150 - i]).abs() < 1e-13);
        }
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn zero_coupling_is_identity() {
        let grid = Grid1D::new(-1.0, 1.0, 3).unwrap();
        let w = SourceProjection { weights: vec![0.7] };
        let g = InitialField1D::gaussian(1.0).unwrap();
        let sys = assemble_1d(&scalar_coupling(0.0), &w, &g, &grid).unwrap();
        assert_eq!(sys.matrix, crate::sparse::SparseMatrix::identity(3));
        for (i, x) in grid.points().into_iter().enumerate() {
            assert!((sys.rhs[i] - 0.7 * (-x * x).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_coupling_block() {
        let grid = Grid1D::new(-1.0, 1.0, 3).unwrap();
        let w = SourceProjection { weights: vec![1.0] };
        let g = InitialField1D::gaussian(1.0).unwrap();
        let sys = assemble_1d(&scalar_coupling(1.0), &w, &g, &grid).unwrap();
        let expected = [3.0, -1.0, 0.0, -1.0, 3.0, -1.0, 0.0, -1.0, 3.0];
        assert_eq!(sys.matrix.to_dense(), expected.to_vec());
    }

    #[test]
    fn nnz_of_dense_coupling() {
        let basis = TimeBasis::new(1.0, 2).unwrap();
        let a = coupling_matrix(&basis, MemoryOrder::new(1.5).unwrap(), QuadratureSpec::default()).unwrap();
        let w = source_weights(&basis).unwrap();
        let grid = Grid1D::new(-1.0, 1.0, 3).unwrap();
        let sys = assemble_1d(&a, &w, &InitialField1D::gaussian(1.0).unwrap(), &grid).unwrap();
        assert_eq!(sys.matrix.nnz(), 28);
    }

    #[test]
    fn assembly_errors() {
        let grid = Grid1D::new(-1.0, 1.0, 3).unwrap();
        let g = InitialField1D::gaussian(1.0).unwrap();
        let w = SourceProjection { weights: vec![1.0, 0.0] };
        assert!(matches!(
            assemble_1d(&scalar_coupling(1.0), &w, &g, &grid),
            Err(Error::DimensionMismatch { .. })
        ));
        let small = Grid1D::new(-1.0, 1.0, 2).unwrap();
        let w = SourceProjection { weights: vec![1.0] };
        assert!(assemble_1d(&scalar_coupling(1.0), &w, &g, &small).is_err());
    }

    #[test]
    fn sup_error_examples() {
        let a = [0.1, 0.5, -2.0];
        assert_eq!(sup_error(&a, &a).unwrap(), 0.0);
        let e = sup_error(&[1.0; 4], &[0.999; 4]).unwrap();
        assert!((e - 0.001).abs() < 1e-15);
        assert!(sup_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn decay_check() {
        let g = InitialField1D::gaussian(1.0).unwrap();
        assert!(g.decays_on(&Grid1D::symmetric(15.0, 151).unwrap()));
        assert!(!g.decays_on(&Grid1D::symmetric(3.0, 31).unwrap()));
        assert!(InitialField1D::gaussian(0.0).is_err());
    }

    #[test]
    fn reconstruction_time_range() {
        let grid = Grid1D::symmetric(10.0, 41).unwrap();
        let g = InitialField1D::gaussian(1.0).unwrap();
        let sol = solve_1d(MemoryOrder::HEAT, 2.0, 3, &grid, &g).unwrap();
        assert!(sol.at_time(2.5).is_err());
        assert_eq!(sol.at_time(1.0).unwrap().len(), 41);
        assert_eq!(sol.coefficients_at(20).len(), 3);
    }
}
