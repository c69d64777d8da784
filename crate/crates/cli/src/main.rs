use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use volterra_cli::{run, CliError, Command, RunConfig};

/// Galerkin solvers for Volterra equations between heat (alpha = 1) and
/// wave (alpha = 2) dynamics.
#[derive(Parser, Debug)]
#[command(name = "volterra", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// 1D solution curves at the listed times (columns t,x,f).
    Solve1d(Flags),
    /// 2D field and its y = 0 section (columns t,x,y,f and t,x,f).
    Solve2d(Flags),
    /// One noisy trajectory at every time node, alpha = 1 or 2.
    Stochastic(Flags),
    /// Error table against the closed-form solution, alpha = 1 or 2.
    Validate(Flags),
    /// Iteration counts with and without the block preconditioner.
    Bench(Flags),
}

/// Every flag overrides the matching key of `--config`.
#[derive(Args, Debug, Default)]
struct Flags {
    /// key = value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Memory order in [1, 2].
    #[arg(long)]
    alpha: Option<String>,
    /// Time horizon.
    #[arg(long = "T")]
    horizon: Option<String>,
    /// Number of time basis functions.
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<String>,
    /// Grid points per axis, endpoints included.
    #[arg(long)]
    m: Option<String>,
    /// Spatial dimension for bench (1 or 2).
    #[arg(long)]
    dim: Option<String>,
    /// gaussian | anisotropic
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    sigma1: Option<String>,
    #[arg(long)]
    sigma2: Option<String>,
    /// auto | direct | bicg | bicgstab
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
    /// on | off
    #[arg(long)]
    precond: Option<String>,
    /// Noise strength C.
    #[arg(long)]
    noise: Option<String>,
    /// per-node | smooth
    #[arg(long = "noise-mode")]
    noise_mode: Option<String>,
    #[arg(long = "correlation-length")]
    correlation_length: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Stochastic time steps (default: step <= grid spacing).
    #[arg(long)]
    intervals: Option<String>,
    #[arg(long, short)]
    output: Option<String>,
    /// Comma-separated output times.
    #[arg(long)]
    times: Option<String>,
    /// Comma-separated grid sizes for bench.
    #[arg(long = "bench-m")]
    bench_m: Option<String>,
    /// Write the assembled matrix in Matrix Market format.
    #[arg(long = "dump-matrix")]
    dump_matrix: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        [
            ("alpha", &self.alpha),
            ("T", &self.horizon),
            ("n", &self.n),
            ("xmin", &self.xmin),
            ("xmax", &self.xmax),
            ("m", &self.m),
            ("dim", &self.dim),
            ("ic", &self.ic),
            ("sigma", &self.sigma),
            ("sigma1", &self.sigma1),
            ("sigma2", &self.sigma2),
            ("method", &self.method),
            ("tol", &self.tol),
            ("max-iter", &self.max_iter),
            ("precond", &self.precond),
            ("noise", &self.noise),
            ("noise-mode", &self.noise_mode),
            ("correlation-length", &self.correlation_length),
            ("seed", &self.seed),
            ("intervals", &self.intervals),
            ("output", &self.output),
            ("times", &self.times),
            ("bench-m", &self.bench_m),
            ("dump-matrix", &self.dump_matrix),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

fn build_config(cli: Cli) -> Result<RunConfig, CliError> {
    let (command, flags) = match cli.command {
        Sub::Solve1d(f) => (Command::Solve1d, f),
        Sub::Solve2d(f) => (Command::Solve2d, f),
        Sub::Stochastic(f) => (Command::Stochastic, f),
        Sub::Validate(f) => (Command::Validate, f),
        Sub::Bench(f) => (Command::Bench, f),
    };
    let mut config = RunConfig::new(command);
    if let Some(path) = &flags.config {
        config.apply_file(path)?;
        // the subcommand on the command line wins over a `command` key
        config.command = command;
    }
    for (key, value) in flags.overrides() {
        config.set(key, value)?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = build_config(cli).and_then(|config| {
        log::info!("running {}", config.command);
        run(&config)
    });
    match result {
        Ok(outcome) => {
            for line in outcome.summary {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
