//! Special functions and the kernels of the approximate functional equation.

pub mod bump;
pub mod gamma;
pub mod kernels;
pub mod quad;
pub mod zeta;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use bump::{bump, bump_integral, bump_log_moment, bump_mellin_jet, dyadic_partition, DyadicPartition};
pub use gamma::{ln_gamma, ln_gamma_real};
pub use kernels::{
    afe_residual, g_shift, kernel_g, v_shift, w_kernel, x_factor, AfeResidual, ContourRule, Kernel, VKernel,
};
pub use zeta::{chi, zeta, zeta_eval, zeta_laurent_jet, zeta_real, LAURENT_RADIUS, MAX_LAURENT_ORDER, ZetaMethod, ZetaValue, EULER_GAMMA, STIELTJES};

/// Largest admissible `|α|·log_scale` and `|β|·log_scale`.
pub const SHIFT_BOUND: f64 = 10.0;

/// Real shifts `(α, β)` together with the scale `L = log T` they are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftPair {
    pub alpha: f64,
    pub beta: f64,
    pub log_scale: f64,
}

impl ShiftPair {
    pub fn new(alpha: f64, beta: f64, log_scale: f64) -> Result<Self> {
        if !(log_scale.is_finite() && log_scale > 0.0) {
            return invalid(format!("log scale must be positive, got {log_scale}"));
        }
        if !(alpha.is_finite() && beta.is_finite()) {
            return invalid("shifts must be finite");
        }
        if alpha.abs() * log_scale > SHIFT_BOUND || beta.abs() * log_scale > SHIFT_BOUND {
            return invalid(format!(
                "shifts ({alpha}, {beta}) exceed {SHIFT_BOUND}/L with L = {log_scale}"
            ));
        }
        Ok(Self { alpha, beta, log_scale })
    }

    /// Shifts measured against `L = ln t`.
    pub fn at_height(alpha: f64, beta: f64, t: f64) -> Result<Self> {
        Self::new(alpha, beta, t.ln())
    }

    pub fn zero(log_scale: f64) -> Self {
        Self { alpha: 0.0, beta: 0.0, log_scale }
    }

    pub fn sum(&self) -> f64 {
        self.alpha + self.beta
    }

    pub fn swapped(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha, log_scale: self.log_scale }
    }

    /// `(−β, −α)`, the shifts of the dual sum.
    pub fn reflected(&self) -> Self {
        Self { alpha: -self.beta, beta: -self.alpha, log_scale: self.log_scale }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_bound() {
        let l = 1e4f64.ln();
        assert!(ShiftPair::new(10.0 / l, -10.0 / l, l).is_ok());
        assert!(ShiftPair::new(10.5 / l, 0.0, l).is_err());
        assert!(ShiftPair::new(0.0, 0.0, 0.0).is_err());
        let s = ShiftPair::new(0.1, 0.2, l).unwrap();
        assert_eq!(s.reflected().alpha, -0.2);
        assert_eq!(s.swapped().beta, 0.1);
    }
}
