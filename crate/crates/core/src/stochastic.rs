//! Trajectories of the noisy equation in mild form,
//! `f(t) = S(t) g + sum_i S(t - s_i) dW_i`, for the heat and wave limits.
//!
//! Noise is Brownian in time at every grid node, scaled by a constant strength
//! `C`. Randomness comes from ChaCha8 with the master seed as key and the
//! trajectory index as stream, so ensemble members do not depend on the order
//! in which they are drawn.

use crate::analytic::{apply_unchecked, leaks, Resolvent};
use crate::error::{Error, Result};
use crate::solver1d::{Grid1D, InitialField1D};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Name of the generator behind every increment sequence.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), key = seed, stream = trajectory index";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialMode {
    /// Independent increments at every node.
    PerNode,
    /// Per-node increments convolved with a unit-mass Gaussian
    /// `exp(-x^2 / length^2) / (length sqrt(pi))`.
    Smooth { length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    strength: f64,
    mode: SpatialMode,
    seed: u64,
}

impl NoiseModel {
    pub fn new(strength: f64, mode: SpatialMode, seed: u64) -> Result<Self> {
        if !(strength >= 0.0) || !strength.is_finite() {
            return Err(Error::Domain(format!("noise strength C = {strength} must be finite and >= 0")));
        }
        if let SpatialMode::Smooth { length } = mode {
            if !(length > 0.0) || !length.is_finite() {
                return Err(Error::Domain(format!("correlation length {length} must be > 0")));
            }
        }
        Ok(Self { strength, mode, seed })
    }

    pub fn per_node(strength: f64, seed: u64) -> Result<Self> {
        Self::new(strength, SpatialMode::PerNode, seed)
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn mode(&self) -> SpatialMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same noise path with a different strength.
    pub fn with_strength(&self, strength: f64) -> Result<Self> {
        Self::new(strength, self.mode, self.seed)
    }
}

/// Uniform nodes `s_i = i t / I`, `i = 0..=I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePartition {
    final_time: f64,
    intervals: usize,
}

impl TimePartition {
    pub fn new(final_time: f64, intervals: usize) -> Result<Self> {
        if !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::Domain(format!("final time {final_time} must be finite and > 0")));
        }
        if intervals == 0 {
            return Err(Error::Domain("need at least one subinterval".into()));
        }
        Ok(Self { final_time, intervals })
    }

    /// Finest partition whose step does not exceed the grid spacing.
    pub fn matching_grid(final_time: f64, grid: &Grid1D) -> Result<Self> {
        let intervals = (final_time / grid.spacing() - 1e-9).ceil().max(1.0) as usize;
        Self::new(final_time, intervals)
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn step(&self) -> f64 {
        self.final_time / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.final_time
        } else {
            i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.intervals).map(|i| self.node(i)).collect()
    }
}

/// Increments for trajectory 0 of `model`.
pub fn sample_increments(model: &NoiseModel, grid: &Grid1D, partition: &TimePartition) -> Vec<Vec<f64>> {
    sample_increments_for(model, grid, partition, 0)
}

/// Increments `dW_i(x_j)`, `i < I`, for ensemble member `trajectory`.
pub fn sample_increments_for(
    model: &NoiseModel,
    grid: &Grid1D,
    partition: &TimePartition,
    trajectory: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(trajectory);
    let scale = model.strength * partition.step().sqrt();
    let m = grid.len();
    (0..partition.intervals)
        .map(|_| {
            let white: Vec<f64> = (0..m)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    scale * z
                })
                .collect();
            match model.mode {
                SpatialMode::PerNode => white,
                SpatialMode::Smooth { length } => smooth(&white, grid.spacing(), length),
            }
        })
        .collect()
}

fn smooth(field: &[f64], h: f64, length: f64) -> Vec<f64> {
    // exp(-x^2/l^2) drops below 1e-16 beyond ~6.07 l
    let reach = ((6.1 * length / h).ceil() as usize).min(field.len().saturating_sub(1));
    let norm = h / (length * std::f64::consts::PI.sqrt());
    let weights: Vec<f64> = (0..=reach)
        .map(|d| {
            let x = d as f64 * h / length;
            norm * (-x * x).exp()
        })
        .collect();
    let m = field.len();
    (0..m)
        .map(|i| {
            let lo = i.saturating_sub(reach);
            let hi = (i + reach).min(m - 1);
            (lo..=hi).map(|j| weights[i.abs_diff(j)] * field[j]).sum()
        })
        .collect()
}

/// `sum_{i < I} S(t - s_i) dW_i` at `t = partition.final_time()`.
pub fn stochastic_convolution(
    resolvent: Resolvent,
    partition: &TimePartition,
    increments: &[Vec<f64>],
    grid: &Grid1D,
) -> Result<Vec<f64>> {
    if increments.len() != partition.intervals {
        return Err(Error::DimensionMismatch {
            expected: partition.intervals,
            actual: increments.len(),
        });
    }
    let (out, leaked) = convolution_at(resolvent, partition, increments, grid, partition.intervals)?;
    warn_leak(leaked);
    Ok(out)
}

fn warn_leak(leaked: bool) {
    if leaked {
        log::warn!("noise increments reach the grid edges; their outgoing part is dropped");
    }
}

/// The sum truncated to the increments before node `k`, evaluated at `s_k`,
/// and whether any term carried mass off the grid.
fn convolution_at(
    resolvent: Resolvent,
    partition: &TimePartition,
    increments: &[Vec<f64>],
    grid: &Grid1D,
    k: usize,
) -> Result<(Vec<f64>, bool)> {
    let t = partition.node(k);
    let mut out = vec![0.0; grid.len()];
    let mut leaked = false;
    for (i, dw) in increments[..k].iter().enumerate() {
        if dw.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: dw.len(),
            });
        }
        let lag = t - partition.node(i);
        leaked = leaked || leaks(resolvent, lag, dw, grid);
        for (o, v) in out.iter_mut().zip(apply_unchecked(resolvent, lag, dw, grid)) {
            *o += v;
        }
    }
    Ok((out, leaked))
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub resolvent: Resolvent,
    pub model: NoiseModel,
    pub trajectory_index: u64,
    pub grid: Grid1D,
    pub partition: TimePartition,
    /// `f(x_j, s_k)` for `k = 0..=I`.
    pub fields: Vec<Vec<f64>>,
    pub increments: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn final_field(&self) -> &[f64] {
        self.fields.last().expect("a partition has at least two nodes")
    }
}

pub fn simulate_trajectory(
    resolvent: Resolvent,
    g: &InitialField1D,
    model: &NoiseModel,
    partition: &TimePartition,
    grid: &Grid1D,
) -> Result<Trajectory> {
    simulate_member(resolvent, g, model, partition, grid, 0)
}

/// One ensemble member, drawn from stream `trajectory` of the model's seed.
pub fn simulate_member(
    resolvent: Resolvent,
    g: &InitialField1D,
    model: &NoiseModel,
    partition: &TimePartition,
    grid: &Grid1D,
    trajectory: u64,
) -> Result<Trajectory> {
    let increments = sample_increments_for(model, grid, partition, trajectory);
    let mut fields = deterministic_path(resolvent, g, partition, grid)?;
    if model.strength > 0.0 {
        let mut leaked = false;
        for (k, field) in fields.iter_mut().enumerate().skip(1) {
            let (noise, edge) = convolution_at(resolvent, partition, &increments, grid, k)?;
            leaked |= edge;
            for (f, w) in field.iter_mut().zip(noise) {
                *f += w;
            }
        }
        warn_leak(leaked);
    }
    Ok(Trajectory {
        resolvent,
        model: *model,
        trajectory_index: trajectory,
        grid: *grid,
        partition: *partition,
        fields,
        increments,
    })
}

/// `S(s_k) g` at every node.
pub fn deterministic_path(
    resolvent: Resolvent,
    g: &InitialField1D,
    partition: &TimePartition,
    grid: &Grid1D,
) -> Result<Vec<Vec<f64>>> {
    let samples = g.sample(grid);
    partition
        .nodes()
        .into_iter()
        .map(|s| crate::analytic::resolvent_apply(resolvent, s, &samples, grid))
        .collect()
}

/// Members `0..members` of the ensemble.
pub fn simulate_ensemble(
    resolvent: Resolvent,
    g: &InitialField1D,
    model: &NoiseModel,
    partition: &TimePartition,
    grid: &Grid1D,
    members: u64,
) -> Result<Vec<Trajectory>> {
    (0..members)
        .map(|i| simulate_member(resolvent, g, model, partition, grid, i))
        .collect()
}
