pub mod analytic;
pub mod basis;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod solver1d;
pub mod solver2d;
pub mod stochastic;
pub mod sparse;
pub mod system;

pub use basis::{coupling_matrix, source_weights, CouplingMatrix, QuadratureSpec, SourceProjection, TimeBasis};
pub use error::{Error, Result};
pub use kernel::{gamma_fn, kernel_eval, MemoryOrder};
pub use solver1d::{assemble_1d, solve_1d, solve_1d_with, sup_error, Grid1D, InitialField1D, SolutionField1D};
pub use system::{solve_system, system_preconditioner, time_discretization, BlockSystem, SolverChoice, SolverOptions};
pub use solver2d::{
    assemble_2d, solve_2d, solve_2d_with, sparsity_bound, verify_sparsity, Grid2D, InitialField2D, SolutionField2D,
};
pub use stochastic::{
    sample_increments, simulate_ensemble, simulate_member, simulate_trajectory, stochastic_convolution, NoiseModel,
    SpatialMode, TimePartition, Trajectory,
};
