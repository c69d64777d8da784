//! Direct solver: reverse Cuthill–McKee reordering followed by banded LU with
//! partial pivoting.
//!
//! The block systems have narrow bandwidth once unknowns are grouped by
//! spatial point, which RCM recovers without knowing the block layout.

use super::csr::SparseMatrix;
use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Reverse Cuthill–McKee ordering of the symmetrized sparsity pattern.
///
/// `perm[new] = old`.
pub fn reverse_cuthill_mckee(matrix: &SparseMatrix) -> Vec<usize> {
    let n = matrix.dim();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (r, c, _) in matrix.iter() {
        if r != c {
            adj[r].push(c);
            adj[c].push(r);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    while order.len() < n {
        // start each component from a minimum-degree vertex
        let start = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| degree[v])
            .unwrap();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| degree[u]);
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// LU factors of a permuted banded matrix.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    band: Vec<f64>,
    pivots: Vec<usize>,
    perm: Vec<usize>,
}

impl BandedLu {
    pub fn factor(matrix: &SparseMatrix) -> Result<Self> {
        let n = matrix.dim();
        let perm = reverse_cuthill_mckee(matrix);
        let mut inverse = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let (mut lower, mut upper) = (0usize, 0usize);
        for (r, c, _) in matrix.iter() {
            let (pr, pc) = (inverse[r], inverse[c]);
            if pr > pc {
                lower = lower.max(pr - pc);
            } else {
                upper = upper.max(pc - pr);
            }
        }
        // room for fill-in from row exchanges
        let width = 2 * lower + upper + 1;
        let mut band = vec![0.0; n * width];
        for (r, c, v) in matrix.iter() {
            let (pr, pc) = (inverse[r], inverse[c]);
            band[pr * width + pc + lower - pr] = v;
        }
        let scale = matrix.iter().fold(0.0f64, |m, (_, _, v)| m.max(v.abs()));
        let mut lu = Self {
            n,
            lower,
            upper,
            width,
            band,
            pivots: vec![0; n],
            perm,
        };
        lu.eliminate(scale)?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + c + self.lower - r
    }

    fn eliminate(&mut self, scale: f64) -> Result<()> {
        let n = self.n;
        let reach = self.lower + self.upper;
        for k in 0..n {
            let last_row = (k + self.lower).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let mut p = k;
            let mut best = self.band[self.at(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.band[self.at(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= f64::EPSILON * scale || best == 0.0 {
                return Err(Error::Singular { row: self.perm[k] });
            }
            self.pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    let (i, j) = (self.at(k, c), self.at(p, c));
                    self.band.swap(i, j);
                }
            }
            let pivot = self.band[self.at(k, k)];
            for r in k + 1..=last_row {
                let idx = self.at(r, k);
                let f = self.band[idx] / pivot;
                self.band[idx] = f;
                if f == 0.0 {
                    continue;
                }
                for c in k + 1..=last_col {
                    let src = self.band[self.at(k, c)];
                    let dst = self.at(r, c);
                    self.band[dst] -= f * src;
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: b.len() });
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for k in 0..n {
            let p = self.pivots[k];
            y.swap(k, p);
            let yk = y[k];
            if yk == 0.0 {
                continue;
            }
            for r in k + 1..=(k + self.lower).min(n - 1) {
                y[r] -= self.band[self.at(r, k)] * yk;
            }
        }
        let reach = self.lower + self.upper;
        for k in (0..n).rev() {
            let mut acc = y[k];
            for c in k + 1..=(k + reach).min(n - 1) {
                acc -= self.band[self.at(k, c)] * y[c];
            }
            y[k] = acc / self.band[self.at(k, k)];
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        Ok(x)
    }

    /// Half-bandwidths `(lower, upper)` after reordering.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }
}

/// Solves `A x = b` directly.
pub fn lu_solve(matrix: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    BandedLu::factor(matrix)?.solve(b)
}
