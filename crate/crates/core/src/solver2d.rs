//! Two spatial dimensions: five-point Laplacian on a square grid.
//!
//! Unknowns are ordered basis index outermost, then `x`, then `y`:
//! `c_0(x_0, y_0), .., c_0(x_0, y_{m-1}), c_0(x_1, y_0), ..`. Each `[A_jk]`
//! block is block-tridiagonal: tridiagonal `m x m` blocks on the diagonal
//! (`delta_jk + 4 a_jk / h^2` inside, `-a_jk / h^2` beside) and diagonal
//! `-a_jk / h^2` blocks next to them.

use crate::basis::{source_weights, CouplingMatrix, SourceProjection, TimeBasis};
use crate::error::{Error, Result};
use crate::kernel::MemoryOrder;
use crate::solver1d::{Grid1D, BOUNDARY_DECAY};
use crate::sparse::{RowBuilder, SolveReport};
use crate::system::{solve_system, time_discretization, BlockSystem, SolverOptions};
use std::fmt;
use std::sync::Arc;

/// Default cap on stored nonzeros for a 2D assembly.
pub const DEFAULT_NNZ_CAP: usize = 200_000_000;

/// Square grid `[lo, hi]^2` with `m` points per axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    axis: Grid1D,
}

impl Grid2D {
    pub fn new(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::Domain(format!("2D grid needs m >= 3, got {m}")));
        }
        Ok(Self {
            axis: Grid1D::new(lo, hi, m)?,
        })
    }

    pub fn symmetric(half_width: f64, m: usize) -> Result<Self> {
        Self::new(-half_width, half_width, m)
    }

    /// Points per axis.
    pub fn m(&self) -> usize {
        self.axis.len()
    }

    pub fn spacing(&self) -> f64 {
        self.axis.spacing()
    }

    pub fn axis(&self) -> &Grid1D {
        &self.axis
    }

    /// Flat index of `(x_i, y_l)` within one coefficient block.
    pub fn index(&self, i: usize, l: usize) -> usize {
        i * self.m() + l
    }
}

#[derive(Clone)]
pub enum InitialField2D {
    /// `exp(-(x^2 + y^2) / sigma^2)`.
    RadialGaussian { sigma: f64 },
    /// `exp(-(x + y)^2 / sigma1^2 - (x - y)^2 / sigma2^2)`.
    RotatedGaussian { sigma1: f64, sigma2: f64 },
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for InitialField2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RadialGaussian { sigma } => write!(f, "RadialGaussian {{ sigma: {sigma} }}"),
            Self::RotatedGaussian { sigma1, sigma2 } => {
                write!(f, "RotatedGaussian {{ sigma1: {sigma1}, sigma2: {sigma2} }}")
            }
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl InitialField2D {
    pub fn radial(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!("sigma = {sigma} must be > 0")));
        }
        Ok(Self::RadialGaussian { sigma })
    }

    pub fn rotated(sigma1: f64, sigma2: f64) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma2 > 0.0) {
            return Err(Error::Domain(format!("widths {sigma1}, {sigma2} must be > 0")));
        }
        Ok(Self::RotatedGaussian { sigma1, sigma2 })
    }

    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(f))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::RadialGaussian { sigma } => (-(x * x + y * y) / (sigma * sigma)).exp(),
            Self::RotatedGaussian { sigma1, sigma2 } => {
                let (u, v) = (x + y, x - y);
                (-(u * u) / (sigma1 * sigma1) - (v * v) / (sigma2 * sigma2)).exp()
            }
            Self::Custom(f) => f(x, y),
        }
    }

    pub fn sample(&self, grid: &Grid2D) -> Vec<f64> {
        let pts = grid.axis().points();
        let mut out = Vec::with_capacity(pts.len() * pts.len());
        for &x in &pts {
            for &y in &pts {
                out.push(self.eval(x, y));
            }
        }
        out
    }

    /// Whether `|g|` is negligible along the whole grid boundary.
    pub fn decays_on(&self, grid: &Grid2D) -> bool {
        let pts = grid.axis().points();
        let (lo, hi) = grid.axis().bounds();
        pts.iter().all(|&p| {
            [(lo, p), (hi, p), (p, lo), (p, hi)]
                .iter()
                .all(|&(x, y)| self.eval(x, y).abs() <= BOUNDARY_DECAY)
        })
    }
}

/// Upper bound `n^2 m (5m - 4)` on the stored entries of the 2D system.
pub fn sparsity_bound(n: usize, m: usize) -> usize {
    n * n * m * (5 * m - 4)
}

/// Number of entries assembly will store for this coupling.
pub fn predicted_nnz(coupling: &CouplingMatrix, m: usize) -> usize {
    let n = coupling.size();
    let mut total = 0;
    for j in 0..n {
        for k in 0..n {
            let a = coupling.get(j, k);
            total += match (a != 0.0, j == k) {
                (true, _) => m * (5 * m - 4),
                (false, true) => m * m,
                (false, false) => 0,
            };
        }
    }
    total
}

pub fn assemble_2d(
    coupling: &CouplingMatrix,
    weights: &SourceProjection,
    g: &InitialField2D,
    grid: &Grid2D,
) -> Result<BlockSystem> {
    assemble_2d_with_cap(coupling, weights, g, grid, DEFAULT_NNZ_CAP)
}

pub fn assemble_2d_with_cap(
    coupling: &CouplingMatrix,
    weights: &SourceProjection,
    g: &InitialField2D,
    grid: &Grid2D,
    nnz_cap: usize,
) -> Result<BlockSystem> {
    let n = coupling.size();
    if weights.weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.weights.len(),
        });
    }
    let m = grid.m();
    let predicted = predicted_nnz(coupling, m);
    if predicted > nnz_cap {
        return Err(Error::MemoryBudget { predicted, cap: nnz_cap });
    }
    let points = m * m;
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let mut builder = RowBuilder::with_capacity(n * points, predicted);
    for j in 0..n {
        for i in 0..m {
            for l in 0..m {
                for k in 0..n {
                    let a = coupling.get(j, k);
                    let delta = if j == k { 1.0 } else { 0.0 };
                    let off = -a * inv_h2;
                    let base = k * points;
                    if i > 0 {
                        builder.push(base + grid.index(i - 1, l), off);
                    }
                    if l > 0 {
                        builder.push(base + grid.index(i, l - 1), off);
                    }
                    builder.push(base + grid.index(i, l), delta + 4.0 * a * inv_h2);
                    if l + 1 < m {
                        builder.push(base + grid.index(i, l + 1), off);
                    }
                    if i + 1 < m {
                        builder.push(base + grid.index(i + 1, l), off);
                    }
                }
                builder.finish_row();
            }
        }
    }
    let samples = g.sample(grid);
    let mut rhs = Vec::with_capacity(n * points);
    for w in &weights.weights {
        rhs.extend(samples.iter().map(|s| s * w));
    }
    Ok(BlockSystem {
        matrix: builder.build(),
        rhs,
        n,
        spatial: points,
        spacing: h,
        dimension: 2,
    })
}

/// Whether the stored entries respect `nnz <= n^2 m (5m - 4)`.
pub fn verify_sparsity(system: &BlockSystem, n: usize, m: usize) -> bool {
    system.matrix.nnz() <= sparsity_bound(n, m)
}

/// Galerkin coefficients `c_k(x_i, y_l)`.
#[derive(Debug, Clone)]
pub struct SolutionField2D {
    coeffs: Vec<f64>,
    grid: Grid2D,
    basis: TimeBasis,
    order: MemoryOrder,
    report: SolveReport,
}

impl SolutionField2D {
    pub fn grid(&self) -> &Grid2D {
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

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize, i: usize, l: usize) -> f64 {
        let m = self.grid.m();
        self.coeffs[k * m * m + i * m + l]
    }

    /// `f_n(x_i, y_l, t)` for all points, `x` outer.
    pub fn at_time(&self, t: f64) -> Result<Vec<f64>> {
        self.basis.check_time(t)?;
        let phi = self.basis.eval_all(t);
        let points = self.grid.m() * self.grid.m();
        let mut out = vec![0.0; points];
        for (k, p) in phi.iter().enumerate() {
            for (o, c) in out.iter_mut().zip(&self.coeffs[k * points..(k + 1) * points]) {
                *o += c * p;
            }
        }
        Ok(out)
    }

    /// Section `f_n(x, y_l, t)` along the grid line `y = y_l`.
    pub fn section_x(&self, l: usize, t: f64) -> Result<Vec<f64>> {
        let m = self.grid.m();
        if l >= m {
            return Err(Error::Domain(format!("row {l} outside a grid of {m} points")));
        }
        let full = self.at_time(t)?;
        Ok((0..m).map(|i| full[i * m + l]).collect())
    }

    /// Section through the grid line closest to `y = 0`.
    pub fn section_y0(&self, t: f64) -> Result<Vec<f64>> {
        let pts = self.grid.axis().points();
        let l = (0..pts.len())
            .min_by(|&a, &b| pts[a].abs().total_cmp(&pts[b].abs()))
            .unwrap();
        self.section_x(l, t)
    }
}

pub fn solve_2d(
    order: MemoryOrder,
    horizon: f64,
    n: usize,
    grid: &Grid2D,
    g: &InitialField2D,
) -> Result<SolutionField2D> {
    solve_2d_with(order, horizon, n, grid, g, &SolverOptions::default())
}

pub fn solve_2d_with(
    order: MemoryOrder,
    horizon: f64,
    n: usize,
    grid: &Grid2D,
    g: &InitialField2D,
    options: &SolverOptions,
) -> Result<SolutionField2D> {
    if !g.decays_on(grid) {
        log::warn!("initial field exceeds {BOUNDARY_DECAY:e} on the grid boundary; enlarge the grid");
    }
    let (basis, coupling) = time_discretization(order, horizon, n, options.quadrature)?;
    let weights = source_weights(&basis)?;
    let system = assemble_2d(&coupling, &weights, g, grid)?;
    let (coeffs, report) = solve_system(&system, &coupling, options)?;
    Ok(SolutionField2D {
        coeffs,
        grid: *grid,
        basis,
        order,
        report,
    })
}
