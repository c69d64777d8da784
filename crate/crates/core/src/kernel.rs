//! Power-law memory kernel `a(t) = t^(alpha-1) / Gamma(alpha)`.
//!
//! `alpha = 1` gives a constant kernel (heat conduction), `alpha = 2` a linear
//! one (wave propagation); values in between interpolate the two.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Order of the memory kernel, restricted to the closed interval `[1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MemoryOrder(f64);

impl MemoryOrder {
    pub const HEAT: MemoryOrder = MemoryOrder(1.0);
    pub const WAVE: MemoryOrder = MemoryOrder(2.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "memory order alpha = {alpha} must lie in [1, 2]"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    pub fn is_heat(self) -> bool {
        self.0 == 1.0
    }

    pub fn is_wave(self) -> bool {
        self.0 == 2.0
    }

    /// Returns a closure evaluating the kernel with `Gamma(alpha)` precomputed.
    ///
    /// The closure does not check the sign of `t`; callers evaluate it only on
    /// non-negative lags.
    pub fn kernel(self) -> impl Fn(f64) -> f64 + Copy {
        let alpha = self.0;
        let inv_gamma = 1.0 / gamma_unchecked(alpha);
        move |t: f64| power_lag(t, alpha - 1.0) * inv_gamma
    }
}

/// `t^p` with the convention `0^0 = 1`.
#[inline]
fn power_lag(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        t
    } else {
        t.powf(p)
    }
}

/// Evaluates `a(t) = t^(alpha-1) / Gamma(alpha)` for `t >= 0`.
pub fn kernel_eval(order: MemoryOrder, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("kernel lag t = {t} must be >= 0")));
    }
    Ok(power_lag(t, order.alpha() - 1.0) / gamma_unchecked(order.alpha()))
}

/// The gamma function for positive real arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!("gamma argument x = {x} must be > 0")));
    }
    Ok(gamma_unchecked(x))
}

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn gamma_unchecked(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 20.0 {
        return (2..x as u64).product::<u64>() as f64;
    }
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}
