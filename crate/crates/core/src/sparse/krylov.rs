//! Bi-conjugate-gradient iterations for real non-symmetric systems.
//!
//! Both variants solve the left-preconditioned system `M^{-1} A x = M^{-1} b`.
//! The stopping test always uses the true residual `‖b - A x‖ / ‖b‖`: when the
//! recurrence residual meets the target the true residual is recomputed, and
//! if it falls short the recurrences restart from the current iterate with a
//! tightened target.

use super::csr::SparseMatrix;
use super::precond::{IdentityPreconditioner, Preconditioner};
use super::{dot, norm};
use crate::error::{Error, Result};

/// Which Krylov recurrence to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrylovMethod {
    /// Stabilized bi-conjugate gradients.
    Bicgstab,
    /// Textbook bi-conjugate gradients (uses products with `A^T`).
    Bicg,
}

/// How a system was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    Bicgstab,
    BicgstabPrecond,
    Bicg,
    BicgPrecond,
}

impl SolveMethod {
    pub fn name(self) -> &'static str {
        match self {
            SolveMethod::Direct => "direct",
            SolveMethod::Bicgstab => "bicgstab",
            SolveMethod::BicgstabPrecond => "bicgstab+precond",
            SolveMethod::Bicg => "bicg",
            SolveMethod::BicgPrecond => "bicg+precond",
        }
    }
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Breakdown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// True relative residual `‖b - A x‖ / ‖b‖` of the returned vector.
    pub relative_residual: f64,
    pub converged: bool,
    pub method: SolveMethod,
    pub status: SolveStatus,
    /// Restarts taken after a breakdown (at most one).
    pub breakdown_restarts: usize,
}

impl SolveReport {
    /// Converts a failed solve into the matching error.
    pub fn into_result(self) -> Result<SolveReport> {
        match self.status {
            SolveStatus::Converged => Ok(self),
            SolveStatus::MaxIterations => Err(Error::NotConverged {
                iterations: self.iterations,
                residual: self.relative_residual,
            }),
            SolveStatus::Breakdown => Err(Error::Breakdown {
                iterations: self.iterations,
                reason: format!("residual {:e} at breakdown", self.relative_residual),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeConfig {
    pub method: KrylovMethod,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        Self {
            method: KrylovMethod::Bicg,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

/// Solves `A x = b` by bi-conjugate gradients, optionally preconditioned.
pub fn bicg_solve<P: Preconditioner>(
    matrix: &SparseMatrix,
    b: &[f64],
    precond: Option<&P>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let config = IterativeConfig {
        method: KrylovMethod::Bicg,
        tol,
        max_iter,
    };
    iterative_solve(matrix, b, precond, config)
}

pub fn iterative_solve<P: Preconditioner>(
    matrix: &SparseMatrix,
    b: &[f64],
    precond: Option<&P>,
    config: IterativeConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    if b.len() != matrix.dim() {
        return Err(Error::DimensionMismatch {
            expected: matrix.dim(),
            actual: b.len(),
        });
    }
    if !(config.tol > 0.0) || config.max_iter == 0 {
        return Err(Error::Domain(format!(
            "iterative solve needs tol > 0 and max_iter >= 1 (got {}, {})",
            config.tol, config.max_iter
        )));
    }
    let method = match (config.method, precond.is_some()) {
        (KrylovMethod::Bicgstab, false) => SolveMethod::Bicgstab,
        (KrylovMethod::Bicgstab, true) => SolveMethod::BicgstabPrecond,
        (KrylovMethod::Bicg, false) => SolveMethod::Bicg,
        (KrylovMethod::Bicg, true) => SolveMethod::BicgPrecond,
    };
    match precond {
        Some(p) => Ok(run(matrix, b, p, config, method)),
        None => Ok(run(matrix, b, &IdentityPreconditioner, config, method)),
    }
}

/// `M^{-1} A` and its transpose as one operator.
struct LeftOperator<'a, P> {
    matrix: &'a SparseMatrix,
    precond: &'a P,
    scratch: Vec<f64>,
}

impl<P: Preconditioner> LeftOperator<'_, P> {
    fn apply(&mut self, v: &[f64], out: &mut [f64]) {
        self.matrix.matvec_into(v, &mut self.scratch);
        self.precond.apply(&self.scratch, out);
    }

    fn apply_transpose(&mut self, v: &[f64], out: &mut [f64]) {
        self.precond.apply_transpose(v, &mut self.scratch);
        self.matrix.matvec_transpose_into(&self.scratch, out);
    }

    /// Preconditioned residual `M^{-1}(b - A x)` and the true relative residual.
    fn residual(&mut self, b: &[f64], x: &[f64], out: &mut [f64]) -> f64 {
        self.matrix.matvec_into(x, &mut self.scratch);
        for (s, bi) in self.scratch.iter_mut().zip(b) {
            *s = bi - *s;
        }
        let true_norm = norm(&self.scratch);
        self.precond.apply(&self.scratch, out);
        true_norm
    }
}

enum Step {
    /// Recurrence residual reached the current target.
    Target,
    Breakdown,
    Exhausted,
}

fn run<P: Preconditioner>(
    matrix: &SparseMatrix,
    b: &[f64],
    precond: &P,
    config: IterativeConfig,
    method: SolveMethod,
) -> (Vec<f64>, SolveReport) {
    let n = matrix.dim();
    let mut op = LeftOperator {
        matrix,
        precond,
        scratch: vec![0.0; n],
    };
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    let mut report = SolveReport {
        iterations: 0,
        relative_residual: 0.0,
        converged: true,
        method,
        status: SolveStatus::Converged,
        breakdown_restarts: 0,
    };
    if b_norm == 0.0 {
        return (x, report);
    }
    let mut precond_rhs = vec![0.0; n];
    precond.apply(b, &mut precond_rhs);
    let c_norm = norm(&precond_rhs);

    let mut target = config.tol;
    let mut r = vec![0.0; n];
    let mut true_rel = op.residual(b, &x, &mut r) / b_norm;
    loop {
        if true_rel <= config.tol {
            report.status = SolveStatus::Converged;
            break;
        }
        let budget = config.max_iter - report.iterations;
        if budget == 0 {
            report.status = SolveStatus::MaxIterations;
            break;
        }
        let (step, used) = match config.method {
            KrylovMethod::Bicgstab => bicgstab_cycle(&mut op, &mut x, &mut r, target * c_norm, budget),
            KrylovMethod::Bicg => bicg_cycle(&mut op, &mut x, &mut r, target * c_norm, budget),
        };
        report.iterations += used;
        let previous = true_rel;
        true_rel = op.residual(b, &x, &mut r) / b_norm;
        match step {
            Step::Target => {
                if true_rel > config.tol {
                    // recurrence drifted from the true residual
                    target *= (0.5 * config.tol / true_rel).min(0.5);
                    if target < f64::EPSILON * 1e-2 || (used == 0 && true_rel >= previous) {
                        report.status = SolveStatus::MaxIterations;
                        break;
                    }
                }
            }
            Step::Breakdown => {
                if true_rel <= config.tol {
                    continue;
                }
                if report.breakdown_restarts == 0 {
                    log::debug!("{method}: breakdown after {} iterations, restarting", report.iterations);
                    report.breakdown_restarts = 1;
                } else {
                    report.status = SolveStatus::Breakdown;
                    break;
                }
            }
            Step::Exhausted => {
                if true_rel > config.tol {
                    report.status = SolveStatus::MaxIterations;
                    break;
                }
            }
        }
    }
    report.relative_residual = true_rel;
    report.converged = report.status == SolveStatus::Converged;
    (x, report)
}

fn near_zero(value: f64, scale: f64) -> bool {
    !value.is_finite() || value.abs() <= f64::EPSILON * f64::EPSILON * scale
}

/// One BiCGSTAB recurrence from the current iterate; `r` holds the
/// preconditioned residual on entry and is overwritten.
fn bicgstab_cycle<P: Preconditioner>(
    op: &mut LeftOperator<'_, P>,
    x: &mut [f64],
    r: &mut [f64],
    abs_target: f64,
    budget: usize,
) -> (Step, usize) {
    let n = x.len();
    let shadow = r.to_vec();
    let shadow_norm = norm(&shadow);
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    for it in 0..budget {
        let rho_new = dot(&shadow, r);
        if near_zero(rho_new, shadow_norm * norm(r)) {
            return (Step::Breakdown, it);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        op.apply(&p, &mut v);
        let denom = dot(&shadow, &v);
        if near_zero(denom, shadow_norm * norm(&v)) {
            return (Step::Breakdown, it);
        }
        alpha = rho_new / denom;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= abs_target {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return (Step::Target, it + 1);
        }
        op.apply(&s, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 || !tt.is_finite() {
            return (Step::Breakdown, it);
        }
        omega = dot(&t, &s) / tt;
        if near_zero(omega, 1.0) {
            return (Step::Breakdown, it);
        }
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rho = rho_new;
        if norm(r) <= abs_target {
            return (Step::Target, it + 1);
        }
    }
    (Step::Exhausted, budget)
}

/// One BiCG recurrence from the current iterate.
fn bicg_cycle<P: Preconditioner>(
    op: &mut LeftOperator<'_, P>,
    x: &mut [f64],
    r: &mut [f64],
    abs_target: f64,
    budget: usize,
) -> (Step, usize) {
    let n = x.len();
    let mut shadow = r.to_vec();
    let mut p = r.to_vec();
    let mut p_shadow = shadow.clone();
    let mut q = vec![0.0; n];
    let mut q_shadow = vec![0.0; n];
    let mut rho = dot(&shadow, r);
    for it in 0..budget {
        op.apply(&p, &mut q);
        op.apply_transpose(&p_shadow, &mut q_shadow);
        let sigma = dot(&p_shadow, &q);
        if near_zero(sigma, norm(&p_shadow) * norm(&q)) {
            return (Step::Breakdown, it);
        }
        let alpha = rho / sigma;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            shadow[i] -= alpha * q_shadow[i];
        }
        if norm(r) <= abs_target {
            return (Step::Target, it + 1);
        }
        let rho_new = dot(&shadow, r);
        if near_zero(rho_new, norm(&shadow) * norm(r)) {
            return (Step::Breakdown, it + 1);
        }
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
            p_shadow[i] = shadow[i] + beta * p_shadow[i];
        }
    }
    (Step::Exhausted, budget)
}
