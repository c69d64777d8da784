//! Closed-form solutions and resolvent actions for the heat (`alpha = 1`) and
//! wave (`alpha = 2`) limits.

use crate::error::{Error, Result};
use crate::kernel::MemoryOrder;
use crate::solver1d::{Grid1D, InitialField1D, BOUNDARY_DECAY};
use std::f64::consts::PI;

/// Kernel values below this are dropped from the heat convolution.
pub const KERNEL_CUTOFF: f64 = 1e-16;

/// Orders with a known resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolvent {
    /// Gaussian heat kernel `exp(-x^2/4t) / sqrt(4 pi t)`.
    Heat,
    /// d'Alembert shift average `(f(x - t) + f(x + t)) / 2`.
    Wave,
}

impl Resolvent {
    pub fn order(self) -> MemoryOrder {
        match self {
            Resolvent::Heat => MemoryOrder::HEAT,
            Resolvent::Wave => MemoryOrder::WAVE,
        }
    }
}

impl TryFrom<MemoryOrder> for Resolvent {
    type Error = Error;

    fn try_from(order: MemoryOrder) -> Result<Self> {
        if order.is_heat() {
            Ok(Resolvent::Heat)
        } else if order.is_wave() {
            Ok(Resolvent::Wave)
        } else {
            Err(Error::Domain(format!(
                "no closed-form resolvent for alpha = {}; only 1 and 2 are supported",
                order.alpha()
            )))
        }
    }
}

/// Heat solution for Gaussian data `exp(-x^2/sigma^2)`:
/// `sigma / sqrt(sigma^2 + 4t) * exp(-x^2 / (sigma^2 + 4t))`.
pub fn heat_solution(x: f64, t: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma = {sigma} must be > 0")));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time t = {t} must be >= 0")));
    }
    let s2 = sigma * sigma + 4.0 * t;
    Ok(sigma / s2.sqrt() * (-x * x / s2).exp())
}

/// Two-dimensional heat solution for radial Gaussian data
/// `exp(-(x^2 + y^2)/sigma^2)`.
pub fn heat_solution_2d(x: f64, y: f64, t: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!("need sigma > 0 and t >= 0, got {sigma}, {t}")));
    }
    let s2 = sigma * sigma + 4.0 * t;
    Ok(sigma * sigma / s2 * (-(x * x + y * y) / s2).exp())
}

/// d'Alembert solution `(g(x - t) + g(x + t)) / 2` with zero initial velocity.
pub fn wave_solution(x: f64, t: f64, g: &InitialField1D) -> f64 {
    0.5 * (g.eval(x - t) + g.eval(x + t))
}

/// Applies `S(t)` to a field sampled on `grid`. Values off the grid are zero.
///
/// Logs a warning when a non-negligible part of the field would be carried
/// past the grid edges.
pub fn resolvent_apply(resolvent: Resolvent, t: f64, field: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    check_inputs(t, field, grid)?;
    if leaks(resolvent, t, field, grid) {
        log::warn!("resolvent at t = {t} carries field mass past the grid edges");
    }
    Ok(apply_unchecked(resolvent, t, field, grid))
}

fn check_inputs(t: f64, field: &[f64], grid: &Grid1D) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("resolvent time t = {t} must be >= 0")));
    }
    if field.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: field.len(),
        });
    }
    Ok(())
}

/// Whether the action moves more than `BOUNDARY_DECAY` of the field off the grid.
pub fn leaks(resolvent: Resolvent, t: f64, field: &[f64], grid: &Grid1D) -> bool {
    if t == 0.0 {
        return false;
    }
    let h = grid.spacing();
    let reach = match resolvent {
        Resolvent::Heat => heat_window(t, h),
        Resolvent::Wave => (t / h).ceil() as usize,
    };
    let m = field.len();
    let edge = reach.min(m);
    field[..edge]
        .iter()
        .chain(&field[m - edge..])
        .any(|v| v.abs() > BOUNDARY_DECAY)
}

/// Half-width, in grid cells, of the truncated heat kernel.
fn heat_window(t: f64, h: f64) -> usize {
    // exp(-x^2/4t)/sqrt(4 pi t) < cutoff  <=>  x^2 > 4t ln(1/(cutoff sqrt(4 pi t)))
    let arg = 1.0 / (KERNEL_CUTOFF * (4.0 * PI * t).sqrt());
    if arg <= 1.0 {
        return 0;
    }
    ((4.0 * t * arg.ln()).sqrt() / h).floor() as usize
}

pub(crate) fn apply_unchecked(resolvent: Resolvent, t: f64, field: &[f64], grid: &Grid1D) -> Vec<f64> {
    if t == 0.0 {
        return field.to_vec();
    }
    match resolvent {
        Resolvent::Heat => heat_convolution(t, field, grid.spacing()),
        Resolvent::Wave => shift_average(t, field, grid.spacing()),
    }
}

fn heat_convolution(t: f64, field: &[f64], h: f64) -> Vec<f64> {
    let m = field.len();
    let window = heat_window(t, h).min(m.saturating_sub(1));
    let norm = h / (4.0 * PI * t).sqrt();
    let weights: Vec<f64> = (0..=window)
        .map(|d| {
            let x = d as f64 * h;
            norm * (-x * x / (4.0 * t)).exp()
        })
        .collect();
    let mut out = vec![0.0; m];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(m - 1);
        let mut acc = 0.0;
        for (j, f) in field.iter().enumerate().take(hi + 1).skip(lo) {
            acc += weights[i.abs_diff(j)] * f;
        }
        *o = acc;
    }
    out
}

fn shift_average(t: f64, field: &[f64], h: f64) -> Vec<f64> {
    let m = field.len();
    let sample = |pos: f64| -> f64 {
        // pos in grid-index units; zero outside
        if pos < 0.0 || pos > (m - 1) as f64 {
            return 0.0;
        }
        let base = pos.floor() as usize;
        let frac = pos - base as f64;
        if base + 1 >= m || frac == 0.0 {
            return field[base.min(m - 1)];
        }
        (1.0 - frac) * field[base] + frac * field[base + 1]
    };
    let shift = t / h;
    // snap shifts that are integers up to rounding
    let shift = if (shift - shift.round()).abs() < 1e-9 { shift.round() } else { shift };
    (0..m)
        .map(|i| 0.5 * (sample(i as f64 - shift) + sample(i as f64 + shift)))
        .collect()
}
