//! The assembled block system shared by the 1D and 2D solvers.

use crate::basis::{coupling_matrix, CouplingMatrix, QuadratureSpec, TimeBasis};
use crate::error::Result;
use crate::kernel::MemoryOrder;
use crate::sparse::{
    build_preconditioner, iterative_solve, lu_solve, BlockPreconditioner, IdentityPreconditioner, IterativeConfig,
    KrylovMethod, SolveMethod, SolveReport, SolveStatus, SparseMatrix, DIRECT_SOLVER_THRESHOLD,
};

/// Sparse matrix and right-hand side of the Galerkin system, unknowns ordered
/// basis index outermost, then spatial point.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Number of time basis functions.
    pub n: usize,
    /// Number of spatial points (`m` or `m^2`).
    pub spatial: usize,
    pub spacing: f64,
    pub dimension: usize,
}

impl BlockSystem {
    pub fn unknowns(&self) -> usize {
        self.n * self.spatial
    }
}

/// How to solve the assembled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverChoice {
    /// Direct when the system has at most `DIRECT_SOLVER_THRESHOLD` unknowns.
    Auto,
    Direct,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub choice: SolverChoice,
    pub iterative: IterativeConfig,
    pub precondition: bool,
    pub quadrature: QuadratureSpec,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            choice: SolverChoice::Auto,
            iterative: IterativeConfig::default(),
            precondition: true,
            quadrature: QuadratureSpec::default(),
        }
    }
}

impl SolverOptions {
    pub fn direct() -> Self {
        Self {
            choice: SolverChoice::Direct,
            ..Self::default()
        }
    }

    pub fn iterative(method: KrylovMethod, precondition: bool) -> Self {
        Self {
            choice: SolverChoice::Iterative,
            iterative: IterativeConfig {
                method,
                ..IterativeConfig::default()
            },
            precondition,
            ..Self::default()
        }
    }
}

/// Basis and coupling data for one `(alpha, T, n)` triple.
pub fn time_discretization(
    order: MemoryOrder,
    horizon: f64,
    n: usize,
    quad: QuadratureSpec,
) -> Result<(TimeBasis, CouplingMatrix)> {
    let basis = TimeBasis::new(horizon, n)?;
    let coupling = coupling_matrix(&basis, order, quad)?;
    Ok((basis, coupling))
}

/// Solves the system, returning the coefficients and a report. Non-convergence
/// is returned as an error.
pub fn solve_system(
    system: &BlockSystem,
    coupling: &CouplingMatrix,
    options: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let direct = match options.choice {
        SolverChoice::Direct => true,
        SolverChoice::Iterative => false,
        SolverChoice::Auto => system.unknowns() <= DIRECT_SOLVER_THRESHOLD,
    };
    if direct {
        let x = lu_solve(&system.matrix, &system.rhs)?;
        let relative_residual = system.matrix.relative_residual(&x, &system.rhs)?;
        let report = SolveReport {
            iterations: 0,
            relative_residual,
            converged: true,
            method: SolveMethod::Direct,
            status: SolveStatus::Converged,
            breakdown_restarts: 0,
        };
        return Ok((x, report));
    }
    let (x, report) = if options.precondition {
        let precond = system_preconditioner(system, coupling)?;
        iterative_solve(&system.matrix, &system.rhs, Some(&precond), options.iterative)?
    } else {
        iterative_solve::<IdentityPreconditioner>(&system.matrix, &system.rhs, None, options.iterative)?
    };
    report.into_result()?;
    Ok((x, report))
}

pub fn system_preconditioner(system: &BlockSystem, coupling: &CouplingMatrix) -> Result<BlockPreconditioner> {
    build_preconditioner(coupling, system.spacing, system.dimension, system.spatial)
}
