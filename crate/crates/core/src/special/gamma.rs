//! Complex log-Gamma via the Stirling series.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2k} / (2k(2k-1))` for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling threshold: below it the argument is shifted up by recursion.
const STIRLING_RADIUS: f64 = 10.0;

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pw = inv;
    for c in STIRLING {
        corr += pw * c;
        pw *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

/// A logarithm of `Γ(z)`. The imaginary part is correct modulo `2π`; every
/// consumer exponentiates differences of these values.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 && z.im.abs() < STIRLING_RADIUS {
        // reflection: Γ(z)Γ(1-z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin(z * PI) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// `ln sin(w)` without overflow for large `|Im w|`.
pub fn ln_sin(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    if w.im > 15.0 {
        // sin w = -e^{-iw}(1 - e^{2iw}) / (2i)
        -i * w + (Complex64::new(1.0, 0.0) - (2.0 * i * w).exp()).ln() + Complex64::new(0.0, 0.5).ln()
    } else if w.im < -15.0 {
        i * w + (Complex64::new(1.0, 0.0) - (-2.0 * i * w).exp()).ln() + Complex64::new(0.0, -0.5).ln()
    } else {
        w.sin().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_values() {
        assert!((ln_gamma_real(1.0)).abs() < 1e-14);
        assert!((ln_gamma_real(2.0)).abs() < 1e-14);
        assert!((ln_gamma_real(0.5) - PI.sqrt().ln()).abs() < 1e-14);
        // Γ(10) = 9!
        assert!((ln_gamma_real(10.0) - 362880f64.ln()).abs() < 1e-13);
        // Γ(-0.5) = -2√π: log of the modulus
        let z = ln_gamma(Complex64::new(-0.5, 0.0));
        assert!((z.exp().re - (-2.0 * PI.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn recurrence_holds_off_axis() {
        for &(x, y) in &[(0.25, 3.0), (0.3, 25.0), (-0.7, 40.0), (5.0, -7.0), (0.25, 5000.0)] {
            let z = Complex64::new(x, y);
            let lhs = (ln_gamma(z + 1.0) - ln_gamma(z)).exp();
            assert!(((lhs - z) / z).norm() < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn reflection_modulus_on_half_line() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for t in [0.5, 3.0, 10.0, 40.0] {
            let lg = ln_gamma(Complex64::new(0.5, t));
            let lhs = 2.0 * lg.re;
            let rhs = PI.ln() - (PI * t).cosh().ln();
            assert!((lhs - rhs).abs() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn ln_sin_large_imaginary() {
        let w = Complex64::new(0.3, 20.0);
        let direct = w.sin().ln();
        let d = (ln_sin(w) - direct).exp();
        assert!((d - 1.0).norm() < 1e-12);
        let w = Complex64::new(0.3, -20.0);
        let d = (ln_sin(w) - w.sin().ln()).exp();
        assert!((d - 1.0).norm() < 1e-12);
    }
}
