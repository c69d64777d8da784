//! Subcommand implementations.

use crate::config::{Command, InitialKind, Method, NoiseKind, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{resolve_output, sibling, Table};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use volterra_core::analytic::{heat_solution, wave_solution, Resolvent};
use volterra_core::sparse::{
    iterative_solve, write_matrix_market, IdentityPreconditioner, IterativeConfig, KrylovMethod, SolveMethod, SolveReport,
};
use volterra_core::stochastic::RNG_ALGORITHM;
use volterra_core::{
    assemble_1d, assemble_2d, simulate_trajectory, solve_1d_with, solve_2d_with, source_weights, system_preconditioner,
    time_discretization, BlockSystem, CouplingMatrix, Grid1D, Grid2D, InitialField1D, InitialField2D, MemoryOrder,
    NoiseModel, SolverChoice, SolverOptions, SpatialMode, TimePartition,
};

/// Files written and a human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    match config.command {
        Command::Solve1d => solve1d(config),
        Command::Solve2d => solve2d(config),
        Command::Stochastic => stochastic(config),
        Command::Validate => validate(config),
        Command::Bench => bench(config),
    }
}

fn order(config: &RunConfig) -> Result<MemoryOrder> {
    Ok(MemoryOrder::new(config.alpha)?)
}

fn solver_options(config: &RunConfig) -> SolverOptions {
    let (choice, method) = match config.method {
        Method::Auto => (SolverChoice::Auto, KrylovMethod::Bicg),
        Method::Direct => (SolverChoice::Direct, KrylovMethod::Bicg),
        Method::Bicg => (SolverChoice::Iterative, KrylovMethod::Bicg),
        Method::Bicgstab => (SolverChoice::Iterative, KrylovMethod::Bicgstab),
    };
    SolverOptions {
        choice,
        iterative: IterativeConfig {
            method,
            tol: config.tol,
            max_iter: config.max_iter,
        },
        precondition: config.precond,
        ..SolverOptions::default()
    }
}

fn krylov(config: &RunConfig) -> IterativeConfig {
    IterativeConfig {
        method: match config.method {
            Method::Bicgstab => KrylovMethod::Bicgstab,
            _ => KrylovMethod::Bicg,
        },
        tol: config.tol,
        max_iter: config.max_iter,
    }
}

fn initial_1d(config: &RunConfig) -> Result<InitialField1D> {
    Ok(InitialField1D::gaussian(config.sigma)?)
}

fn initial_2d(config: &RunConfig) -> Result<InitialField2D> {
    Ok(match config.ic {
        InitialKind::Gaussian => InitialField2D::radial(config.sigma)?,
        InitialKind::Anisotropic => InitialField2D::rotated(config.sigma1, config.sigma2)?,
    })
}

fn echo_config(table: &mut Table, config: &RunConfig) {
    for (k, v) in config.entries() {
        table.meta(format!("{k} = {v}"));
    }
}

fn echo_report(table: &mut Table, report: &SolveReport) {
    table.meta(format!(
        "solver: method = {}, status = {:?}, iterations = {}, relative residual = {:e}, breakdown restarts = {}",
        report.method, report.status, report.iterations, report.relative_residual, report.breakdown_restarts
    ));
}

fn report_line(report: &SolveReport) -> String {
    match report.method {
        SolveMethod::Direct => format!("direct solve, relative residual {:e}", report.relative_residual),
        method => format!(
            "{method} converged in {} iterations, relative residual {:e}",
            report.iterations, report.relative_residual
        ),
    }
}

fn output_times(config: &RunConfig, default: Vec<f64>) -> Vec<f64> {
    if config.times.is_empty() {
        default
    } else {
        config.times.clone()
    }
}

fn equispaced(horizon: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|k| horizon * k as f64 / intervals as f64).collect()
}

fn assemble(config: &RunConfig, dim: usize, m: usize) -> Result<(BlockSystem, CouplingMatrix)> {
    let options = solver_options(config);
    let (basis, coupling) = time_discretization(order(config)?, config.horizon, config.n, options.quadrature)?;
    let weights = source_weights(&basis)?;
    let system = if dim == 1 {
        let grid = Grid1D::new(config.xmin, config.xmax, m)?;
        assemble_1d(&coupling, &weights, &initial_1d(config)?, &grid)?
    } else {
        let grid = Grid2D::new(config.xmin, config.xmax, m)?;
        assemble_2d(&coupling, &weights, &initial_2d(config)?, &grid)?
    };
    Ok((system, coupling))
}

fn dump(system: &BlockSystem, path: &Path) -> Result<PathBuf> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_matrix_market(&system.matrix, BufWriter::new(file)).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

fn dump_requested(config: &RunConfig, dim: usize, outcome: &mut Outcome) -> Result<()> {
    if let Some(path) = &config.dump_matrix {
        let (system, _) = assemble(config, dim, config.m)?;
        outcome.files.push(dump(&system, path)?);
        outcome.summary.push(format!(
            "matrix ({} unknowns, {} nonzeros) written to {}",
            system.unknowns(),
            system.matrix.nnz(),
            path.display()
        ));
    }
    Ok(())
}

fn solve1d(config: &RunConfig) -> Result<Outcome> {
    let grid = Grid1D::new(config.xmin, config.xmax, config.m)?;
    let g = initial_1d(config)?;
    let options = solver_options(config);
    let sol = solve_1d_with(order(config)?, config.horizon, config.n, &grid, &g, &options)?;
    let mut table = Table::new(&["t", "x", "f"]);
    echo_config(&mut table, config);
    echo_report(&mut table, sol.report());
    let points = grid.points();
    for t in output_times(config, vec![config.horizon]) {
        for (x, f) in points.iter().zip(sol.at_time(t)?) {
            table.push(vec![t, *x, f]);
        }
    }
    let path = resolve_output(config.output.as_deref(), "solve1d.csv");
    table.write(&path)?;
    let mut outcome = Outcome {
        files: vec![path.clone()],
        summary: vec![report_line(sol.report()), format!("wrote {}", path.display())],
    };
    dump_requested(config, 1, &mut outcome)?;
    Ok(outcome)
}

fn solve2d(config: &RunConfig) -> Result<Outcome> {
    let grid = Grid2D::new(config.xmin, config.xmax, config.m)?;
    let g = initial_2d(config)?;
    let options = solver_options(config);
    let sol = solve_2d_with(order(config)?, config.horizon, config.n, &grid, &g, &options)?;
    let mut full = Table::new(&["t", "x", "y", "f"]);
    let mut section = Table::new(&["t", "x", "f"]);
    for table in [&mut full, &mut section] {
        echo_config(table, config);
        echo_report(table, sol.report());
    }
    section.meta("section along the grid line nearest y = 0");
    let points = grid.axis().points();
    let m = grid.m();
    for t in output_times(config, vec![config.horizon]) {
        let field = sol.at_time(t)?;
        for (i, x) in points.iter().enumerate() {
            for (l, y) in points.iter().enumerate() {
                full.push(vec![t, *x, *y, field[i * m + l]]);
            }
        }
        for (x, f) in points.iter().zip(sol.section_y0(t)?) {
            section.push(vec![t, *x, f]);
        }
    }
    let path = resolve_output(config.output.as_deref(), "solve2d.csv");
    let section_path = sibling(&path, "section");
    full.write(&path)?;
    section.write(&section_path)?;
    let mut outcome = Outcome {
        files: vec![path.clone(), section_path.clone()],
        summary: vec![
            report_line(sol.report()),
            format!("wrote {} and {}", path.display(), section_path.display()),
        ],
    };
    dump_requested(config, 2, &mut outcome)?;
    Ok(outcome)
}

fn resolvent(config: &RunConfig) -> Result<Resolvent> {
    Ok(Resolvent::try_from(order(config)?)?)
}

fn validate(config: &RunConfig) -> Result<Outcome> {
    let resolvent = resolvent(config)?;
    let grid = Grid1D::new(config.xmin, config.xmax, config.m)?;
    let g = initial_1d(config)?;
    let sol = solve_1d_with(order(config)?, config.horizon, config.n, &grid, &g, &solver_options(config))?;
    let mut table = Table::new(&["t", "x", "numeric", "exact", "error"]);
    let mut worst = (0.0f64, 0.0, 0.0);
    let points = grid.points();
    for t in output_times(config, equispaced(config.horizon, 12)) {
        for (x, f) in points.iter().zip(sol.at_time(t)?) {
            let exact = match resolvent {
                Resolvent::Heat => heat_solution(*x, t, config.sigma)?,
                Resolvent::Wave => wave_solution(*x, t, &g),
            };
            let err = (f - exact).abs();
            if err > worst.0 {
                worst = (err, t, *x);
            }
            table.push(vec![t, *x, f, exact, err]);
        }
    }
    echo_config(&mut table, config);
    echo_report(&mut table, sol.report());
    table.meta(format!("max error = {:e} at t = {}, x = {}", worst.0, worst.1, worst.2));
    let path = resolve_output(config.output.as_deref(), "validate.csv");
    table.write(&path)?;
    Ok(Outcome {
        files: vec![path.clone()],
        summary: vec![
            report_line(sol.report()),
            format!("max error {:e} at t = {}, x = {}", worst.0, worst.1, worst.2),
            format!("wrote {}", path.display()),
        ],
    })
}

fn stochastic(config: &RunConfig) -> Result<Outcome> {
    let resolvent = resolvent(config)?;
    let grid = Grid1D::new(config.xmin, config.xmax, config.m)?;
    let g = initial_1d(config)?;
    let partition = match config.intervals {
        Some(i) => TimePartition::new(config.horizon, i)?,
        None => TimePartition::matching_grid(config.horizon, &grid)?,
    };
    let mode = match config.noise_mode {
        NoiseKind::PerNode => SpatialMode::PerNode,
        NoiseKind::Smooth => SpatialMode::Smooth {
            length: config.correlation_length,
        },
    };
    let model = NoiseModel::new(config.noise, mode, config.seed)?;
    let traj = simulate_trajectory(resolvent, &g, &model, &partition, &grid)?;
    let mut table = Table::new(&["t", "x", "f"]);
    echo_config(&mut table, config);
    table.meta(format!("rng = {RNG_ALGORITHM}"));
    table.meta(format!("time step = {}, intervals = {}", partition.step(), partition.intervals()));
    let points = grid.points();
    for (t, field) in partition.nodes().into_iter().zip(&traj.fields) {
        for (x, f) in points.iter().zip(field) {
            table.push(vec![t, *x, *f]);
        }
    }
    let path = resolve_output(config.output.as_deref(), "stochastic.csv");
    table.write(&path)?;
    Ok(Outcome {
        files: vec![path.clone()],
        summary: vec![
            format!(
                "{} time steps of {}, noise strength {}, seed {}",
                partition.intervals(),
                partition.step(),
                config.noise,
                config.seed
            ),
            format!("wrote {}", path.display()),
        ],
    })
}

fn bench(config: &RunConfig) -> Result<Outcome> {
    let sizes = if config.bench_m.is_empty() {
        vec![config.m]
    } else {
        config.bench_m.clone()
    };
    let iterative = krylov(config);
    let mut table = Table::new(&[
        "m",
        "N",
        "precond_iterations",
        "precond_residual",
        "precond_converged",
        "plain_iterations",
        "plain_residual",
        "plain_converged",
    ]);
    echo_config(&mut table, config);
    let mut outcome = Outcome::default();
    let mut failure = None;
    let mut last = None;
    for &m in &sizes {
        let (system, coupling) = assemble(config, config.dim, m)?;
        let precond = system_preconditioner(&system, &coupling)?;
        let (_, with) = iterative_solve(&system.matrix, &system.rhs, Some(&precond), iterative)?;
        let (_, without) = iterative_solve::<IdentityPreconditioner>(&system.matrix, &system.rhs, None, iterative)?;
        outcome.summary.push(format!(
            "m = {m}, N = {}: preconditioned {} iterations ({:?}), unpreconditioned {} iterations ({:?})",
            system.unknowns(),
            with.iterations,
            with.status,
            without.iterations,
            without.status
        ));
        table.push(vec![
            m as f64,
            system.unknowns() as f64,
            with.iterations as f64,
            with.relative_residual,
            f64::from(u8::from(with.converged)),
            without.iterations as f64,
            without.relative_residual,
            f64::from(u8::from(without.converged)),
        ]);
        if failure.is_none() {
            failure = with.into_result().err();
        }
        last = Some(system);
    }
    table.meta(format!("iterative method = {:?}, tol = {:e}", iterative.method, iterative.tol));
    let path = resolve_output(config.output.as_deref(), "bench.csv");
    table.write(&path)?;
    outcome.files.push(path.clone());
    outcome.summary.push(format!("wrote {}", path.display()));
    if let (Some(p), Some(system)) = (&config.dump_matrix, &last) {
        outcome.files.push(dump(system, p)?);
    }
    match failure {
        Some(err) => Err(err.into()),
        None => Ok(outcome),
    }
}

