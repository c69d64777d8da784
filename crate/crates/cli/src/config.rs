//! Run configuration: defaults, `key = value` files and command-line overrides.
//!
//! Keys match the long flag names. Later sources win, so flags override the
//! file, which overrides the defaults.

use crate::error::{CliError, Result};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve1d,
    Solve2d,
    Stochastic,
    Validate,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    /// `exp(-|x|^2 / sigma^2)`.
    Gaussian,
    /// `exp(-(x + y)^2 / sigma1^2 - (x - y)^2 / sigma2^2)`, 2D only.
    Anisotropic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Direct up to the size threshold, preconditioned BiCG above it.
    Auto,
    Direct,
    Bicg,
    Bicgstab,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    PerNode,
    Smooth,
}

macro_rules! keyword_enum {
    ($ty:ty, $what:literal, $($variant:path => $name:literal),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = CliError;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(CliError::Config(format!(
                        concat!("unknown ", $what, " '{}' (expected one of: {})"),
                        other,
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }
    };
}

keyword_enum!(Command, "command",
    Command::Solve1d => "solve1d",
    Command::Solve2d => "solve2d",
    Command::Stochastic => "stochastic",
    Command::Validate => "validate",
    Command::Bench => "bench",
);
keyword_enum!(InitialKind, "initial condition",
    InitialKind::Gaussian => "gaussian",
    InitialKind::Anisotropic => "anisotropic",
);
keyword_enum!(Method, "solver method",
    Method::Auto => "auto",
    Method::Direct => "direct",
    Method::Bicg => "bicg",
    Method::Bicgstab => "bicgstab",
);
keyword_enum!(NoiseKind, "noise mode",
    NoiseKind::PerNode => "per-node",
    NoiseKind::Smooth => "smooth",
);

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub horizon: f64,
    pub n: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub m: usize,
    /// Spatial dimension for `bench`; the solve commands fix their own.
    pub dim: usize,
    pub ic: InitialKind,
    pub sigma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub method: Method,
    pub tol: f64,
    pub max_iter: usize,
    pub precond: bool,
    pub noise: f64,
    pub noise_mode: NoiseKind,
    pub correlation_length: f64,
    pub seed: u64,
    /// Stochastic time steps; `None` picks the finest with step <= h.
    pub intervals: Option<usize>,
    pub output: Option<PathBuf>,
    /// Output times; empty means the command's default.
    pub times: Vec<f64>,
    /// Grid sizes swept by `bench`; empty means just `m`.
    pub bench_m: Vec<usize>,
    pub dump_matrix: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            alpha: 1.0,
            horizon: 6.0,
            n: 8,
            xmin: -15.0,
            xmax: 15.0,
            m: 151,
            dim: 2,
            ic: InitialKind::Gaussian,
            sigma: 1.0,
            sigma1: 4.0,
            sigma2: 2.0,
            method: Method::Auto,
            tol: 1e-10,
            max_iter: 10_000,
            precond: true,
            noise: 0.1,
            noise_mode: NoiseKind::PerNode,
            correlation_length: 1.0,
            seed: 0,
            intervals: None,
            output: None,
            times: Vec::new(),
            bench_m: Vec::new(),
            dump_matrix: None,
        }
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "command" => self.command = value.parse()?,
            "alpha" => self.alpha = number(key, value)?,
            "T" => self.horizon = number(key, value)?,
            "n" => self.n = number(key, value)?,
            "xmin" => self.xmin = number(key, value)?,
            "xmax" => self.xmax = number(key, value)?,
            "m" => self.m = number(key, value)?,
            "dim" => self.dim = number(key, value)?,
            "ic" => self.ic = value.parse()?,
            "sigma" => self.sigma = number(key, value)?,
            "sigma1" => self.sigma1 = number(key, value)?,
            "sigma2" => self.sigma2 = number(key, value)?,
            "method" => self.method = value.parse()?,
            "tol" => self.tol = number(key, value)?,
            "max-iter" => self.max_iter = number(key, value)?,
            "precond" => {
                self.precond = match value {
                    "on" | "true" | "yes" => true,
                    "off" | "false" | "no" => false,
                    other => return Err(CliError::Config(format!("precond must be on or off, got '{other}'"))),
                }
            }
            "noise" => self.noise = number(key, value)?,
            "noise-mode" => self.noise_mode = value.parse()?,
            "correlation-length" => self.correlation_length = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "intervals" => self.intervals = Some(number(key, value)?),
            "output" => self.output = Some(PathBuf::from(value)),
            "times" => self.times = list(key, value)?,
            "bench-m" => self.bench_m = list(key, value)?,
            "dump-matrix" => self.dump_matrix = Some(PathBuf::from(value)),
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got '{raw}'", lineno + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text)
    }

    /// `(key, value)` pairs for every set field, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let join = |v: Vec<String>| v.join(",");
        let mut out = vec![
            ("command", self.command.to_string()),
            ("alpha", self.alpha.to_string()),
            ("T", self.horizon.to_string()),
            ("n", self.n.to_string()),
            ("xmin", self.xmin.to_string()),
            ("xmax", self.xmax.to_string()),
            ("m", self.m.to_string()),
            ("dim", self.dim.to_string()),
            ("ic", self.ic.to_string()),
            ("sigma", self.sigma.to_string()),
            ("sigma1", self.sigma1.to_string()),
            ("sigma2", self.sigma2.to_string()),
            ("method", self.method.to_string()),
            ("tol", self.tol.to_string()),
            ("max-iter", self.max_iter.to_string()),
            ("precond", if self.precond { "on" } else { "off" }.to_string()),
            ("noise", self.noise.to_string()),
            ("noise-mode", self.noise_mode.to_string()),
            ("correlation-length", self.correlation_length.to_string()),
            ("seed", self.seed.to_string()),
        ];
        if let Some(i) = self.intervals {
            out.push(("intervals", i.to_string()));
        }
        if let Some(p) = &self.output {
            out.push(("output", p.display().to_string()));
        }
        if !self.times.is_empty() {
            out.push(("times", join(self.times.iter().map(f64::to_string).collect())));
        }
        if !self.bench_m.is_empty() {
            out.push(("bench-m", join(self.bench_m.iter().map(usize::to_string).collect())));
        }
        if let Some(p) = &self.dump_matrix {
            out.push(("dump-matrix", p.display().to_string()));
        }
        out
    }

    /// The config in the file format; `apply_text` reads it back unchanged.
    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if !(1.0..=2.0).contains(&self.alpha) {
            return fail(format!("alpha = {} must lie in [1, 2]", self.alpha));
        }
        if matches!(self.command, Command::Validate | Command::Stochastic) && self.alpha != 1.0 && self.alpha != 2.0 {
            return fail(format!("{} needs alpha = 1 or 2, got {}", self.command, self.alpha));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return fail(format!("T = {} must be finite and > 0", self.horizon));
        }
        if self.n == 0 {
            return fail("n must be >= 1".into());
        }
        if !(self.xmin < self.xmax) || !self.xmin.is_finite() || !self.xmax.is_finite() {
            return fail(format!("need finite xmin < xmax, got [{}, {}]", self.xmin, self.xmax));
        }
        if self.m < 3 || self.bench_m.iter().any(|&m| m < 3) {
            return fail("grid sizes must be >= 3".into());
        }
        if self.dim != 1 && self.dim != 2 {
            return fail(format!("dim = {} must be 1 or 2", self.dim));
        }
        let spatial_dim = match self.command {
            Command::Solve2d => 2,
            Command::Bench => self.dim,
            _ => 1,
        };
        if self.ic == InitialKind::Anisotropic && spatial_dim == 1 {
            return fail("the anisotropic initial condition needs two dimensions".into());
        }
        for (name, v) in [("sigma", self.sigma), ("sigma1", self.sigma1), ("sigma2", self.sigma2)] {
            if !(v > 0.0) || !v.is_finite() {
                return fail(format!("{name} = {v} must be finite and > 0"));
            }
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return fail("need tol > 0 and max-iter >= 1".into());
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return fail(format!("noise = {} must be finite and >= 0", self.noise));
        }
        if !(self.correlation_length > 0.0) {
            return fail("correlation-length must be > 0".into());
        }
        if self.intervals == Some(0) {
            return fail("intervals must be >= 1".into());
        }
        if let Some(t) = self.times.iter().find(|t| !(0.0..=self.horizon).contains(*t)) {
            return fail(format!("output time {t} outside [0, {}]", self.horizon));
        }
        Ok(())
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse '{value}'")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}
