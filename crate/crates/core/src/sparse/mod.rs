//! Sparse storage and solvers for the Galerkin block systems.

mod csr;
pub mod dense;
mod krylov;
mod lu;
mod market;
mod precond;

pub use csr::{RowBuilder, SparseMatrix, TripletBuilder};
pub use krylov::{
    bicg_solve, iterative_solve, IterativeConfig, KrylovMethod, SolveMethod, SolveReport, SolveStatus,
};
pub use lu::{lu_solve, reverse_cuthill_mckee, BandedLu};
pub use market::{read_matrix_market, write_matrix_market};
pub use precond::{build_preconditioner, BlockPreconditioner, IdentityPreconditioner, Preconditioner};

/// Systems at or below this many unknowns are solved directly by default.
pub const DIRECT_SOLVER_THRESHOLD: usize = 20_000;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
