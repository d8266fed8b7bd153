//! The smooth weight Φ on [1, 2] and a dyadic smooth partition of unity.

use serde::{Deserialize, Serialize};

use super::quad::adaptive;
use crate::error::{invalid, Result};
use crate::series::Series;

const QUAD_TOL: f64 = 1e-14;
const QUAD_PANELS: usize = 400;

/// `Φ(x) = exp(1 − 1/(1 − (2x−3)²))` on (1, 2), zero elsewhere.
pub fn bump(x: f64) -> f64 {
    if x <= 1.0 || x >= 2.0 {
        return 0.0;
    }
    let y = 2.0 * x - 3.0;
    let d = 1.0 - y * y;
    (1.0 - 1.0 / d).exp()
}

/// `∫ x^w Φ(x) dx`.
pub fn bump_integral(weight_exponent: f64) -> f64 {
    bump_log_moment(weight_exponent, 0)
}

/// `∫ x^w (ln x)^k Φ(x) dx`.
pub fn bump_log_moment(weight_exponent: f64, k: u32) -> f64 {
    adaptive(
        |x: f64| bump(x) * x.powf(weight_exponent) * x.ln().powi(k as i32),
        1.0,
        2.0,
        QUAD_TOL,
        QUAD_TOL,
        QUAD_PANELS,
    )
    .value
}

/// Taylor coefficients in `u` of `B(s0 + u) = ∫ x^{−s0−u} Φ(x) dx`.
pub fn bump_mellin_jet(s0: f64, order: usize) -> Series {
    let mut c = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c.push(sign * bump_log_moment(-s0, k as u32) / fact);
    }
    Series::new(c, order)
}

fn h(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        (-1.0 / y).exp()
    }
}

/// Smooth step: 0 for `y ≤ 0`, 1 for `y ≥ 1`.
pub fn smooth_step(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else if y >= 1.0 {
        1.0
    } else {
        let a = h(y);
        a / (a + h(1.0 - y))
    }
}

/// Members `F_M(x) = ρ(x/M)` for `M = 2^j`, with `ρ(y) = S(log₂y + 1) − S(log₂y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition {
    lo: f64,
    hi: f64,
    exponents: Vec<i32>,
}

impl DyadicPartition {
    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn scales(&self) -> Vec<f64> {
        self.exponents.iter().map(|&j| 2f64.powi(j)).collect()
    }

    /// `F_M(x)` for the member at `index`.
    pub fn member(&self, index: usize, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let u = x.log2() - self.exponents[index] as f64;
        smooth_step(u + 1.0) - smooth_step(u)
    }

    pub fn sum(&self, x: f64) -> f64 {
        (0..self.len()).map(|i| self.member(i, x)).sum()
    }
}

pub fn dyadic_partition(lo: f64, hi: f64) -> Result<DyadicPartition> {
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return invalid(format!("dyadic partition needs 0 < lo < hi, got [{lo}, {hi}]"));
    }
    let j0 = lo.log2().floor() as i32;
    let j1 = hi.log2().ceil() as i32;
    Ok(DyadicPartition { lo, hi, exponents: (j0..=j1).collect() })
}
