//! Orthonormal shifted-Legendre time basis on `[0, T]` and the Galerkin
//! projections built from it.
//!
//! Indices are zero-based in code: `phi(0)` is the normalized constant.

use crate::error::{Error, Result};
use crate::kernel::{gamma_fn, MemoryOrder};
use crate::quadrature::GaussRule;

/// The first `n` orthonormal shifted Legendre polynomials on `[0, T]`.
///
/// `phi_k(t) = sqrt((2k+1)/T) * P_k(2t/T - 1)`, so `phi_k` has degree `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBasis {
    horizon: f64,
    size: usize,
}

impl TimeBasis {
    pub fn new(horizon: f64, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Domain("time basis needs at least one function".into()));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Domain(format!("horizon T = {horizon} must be > 0")));
        }
        Ok(Self { horizon, size })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Writes `phi_0(t) .. phi_{n-1}(t)` into `out`. No range check on `t`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.size);
        let x = 2.0 * t / self.horizon - 1.0;
        let mut p_prev = 1.0;
        let mut p = x;
        for (k, slot) in out.iter_mut().enumerate() {
            let pk = match k {
                0 => 1.0,
                1 => x,
                _ => {
                    let kf = (k - 1) as f64;
                    let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
                    p_prev = p;
                    p = next;
                    next
                }
            };
            *slot = pk * ((2 * k + 1) as f64 / self.horizon).sqrt();
        }
    }

    pub fn eval_all(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        self.eval_into(t, &mut out);
        out
    }

    /// Gram matrix `∫ phi_j phi_k dt`, row-major, by Gauss–Legendre quadrature.
    pub fn gram(&self) -> Result<Vec<f64>> {
        let n = self.size;
        let rule = GaussRule::legendre(n + 2)?;
        let (ts, ws) = rule.on_interval(0.0, self.horizon);
        let mut g = vec![0.0; n * n];
        let mut vals = vec![0.0; n];
        for (&t, &w) in ts.iter().zip(&ws) {
            self.eval_into(t, &mut vals);
            for j in 0..n {
                for k in 0..n {
                    g[j * n + k] += w * vals[j] * vals[k];
                }
            }
        }
        Ok(g)
    }

    /// `f_n(t) = sum_k c_k phi_k(t)` for one spatial point.
    pub fn reconstruct(&self, coeffs: &[f64], t: f64) -> Result<f64> {
        if coeffs.len() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                actual: coeffs.len(),
            });
        }
        self.check_time(t)?;
        let vals = self.eval_all(t);
        Ok(coeffs.iter().zip(&vals).map(|(c, p)| c * p).sum())
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain(format!(
                "time t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Quadrature settings for the coupling integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per integral; `None` selects `2n + 8`.
    pub nodes: Option<usize>,
    /// Largest tolerated change of any entry when the node count is doubled.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes: None, tol: 1e-12 }
    }
}

/// Galerkin coupling matrix
/// `a_jk = ∫_0^T phi_j(τ) ∫_0^τ a(τ-s) phi_k(s) ds dτ`.
///
/// Not symmetric in general; stored row-major with `j` the row.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: Vec<f64>,
    size: usize,
    horizon: f64,
    order: MemoryOrder,
}

impl CouplingMatrix {
    /// Wraps explicit entries; used for hand-built systems and tests.
    pub fn from_entries(entries: Vec<f64>, size: usize, horizon: f64, order: MemoryOrder) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                actual: entries.len(),
            });
        }
        Ok(Self { entries, size, horizon, order })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn order(&self) -> MemoryOrder {
        self.order
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.size + k]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Computes the coupling matrix, checking the result against a rule with
/// twice as many nodes.
///
/// Both integrals carry a power-law weight from the kernel: the inner one
/// `(τ-s)^(α-1)`, the outer one `τ^α` after the inner substitution `s = τu`.
/// Gauss–Jacobi rules absorb these weights, leaving polynomial integrands.
pub fn coupling_matrix(basis: &TimeBasis, order: MemoryOrder, quad: QuadratureSpec) -> Result<CouplingMatrix> {
    let q = quad.nodes.unwrap_or(2 * basis.size() + 8);
    let coarse = coupling_entries(basis, order, q)?;
    let fine = coupling_entries(basis, order, 2 * q)?;
    let change = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (c - f).abs())
        .fold(0.0, f64::max);
    if change > quad.tol {
        return Err(Error::Quadrature { change, tol: quad.tol });
    }
    CouplingMatrix::from_entries(fine, basis.size(), basis.horizon(), order)
}

fn coupling_entries(basis: &TimeBasis, order: MemoryOrder, q: usize) -> Result<Vec<f64>> {
    let n = basis.size();
    let horizon = basis.horizon();
    let alpha = order.alpha();
    let lag = alpha - 1.0;

    // ∫_0^τ (τ-s)^(α-1) f(s) ds = τ^α ∫_0^1 (1-u)^(α-1) f(τu) du
    let inner_rule = GaussRule::jacobi(q, lag, 0.0)?;
    let (inner_u, inner_w) = inner_rule.on_unit_interval(lag, 0.0);
    // ∫_0^T τ^α F(τ) dτ = T^(α+1) ∫_0^1 v^α F(Tv) dv
    let outer_rule = GaussRule::jacobi(q, 0.0, alpha)?;
    let (outer_v, outer_w) = outer_rule.on_unit_interval(0.0, alpha);

    let scale = horizon.powf(alpha + 1.0) / gamma_fn(alpha)?;
    let mut entries = vec![0.0; n * n];
    let mut inner = vec![0.0; n];
    let mut vals = vec![0.0; n];
    for (&v, &wv) in outer_v.iter().zip(&outer_w) {
        let tau = horizon * v;
        inner.iter_mut().for_each(|x| *x = 0.0);
        for (&u, &wu) in inner_u.iter().zip(&inner_w) {
            basis.eval_into(tau * u, &mut vals);
            for (acc, p) in inner.iter_mut().zip(&vals) {
                *acc += wu * p;
            }
        }
        basis.eval_into(tau, &mut vals);
        for j in 0..n {
            let outer = scale * wv * vals[j];
            for k in 0..n {
                entries[j * n + k] += outer * inner[k];
            }
        }
    }
    Ok(entries)
}

/// Time integrals `w_j = ∫_0^T phi_j dτ` of the basis functions.
///
/// The Galerkin source is separable: `g_j(x) = f(x, 0) * w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceProjection {
    pub weights: Vec<f64>,
}

impl SourceProjection {
    pub fn project(&self, initial_value: f64) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().map(move |w| w * initial_value)
    }
}

pub fn source_weights(basis: &TimeBasis) -> Result<SourceProjection> {
    let n = basis.size();
    let rule = GaussRule::legendre(n + 1)?;
    let (ts, ws) = rule.on_interval(0.0, basis.horizon());
    let mut weights = vec![0.0; n];
    let mut vals = vec![0.0; n];
    for (&t, &w) in ts.iter().zip(&ws) {
        basis.eval_into(t, &mut vals);
        for (acc, p) in weights.iter_mut().zip(&vals) {
            *acc += w * p;
        }
    }
    Ok(SourceProjection { weights })
}
