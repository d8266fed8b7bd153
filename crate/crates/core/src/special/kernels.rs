//! The kernels `G`, `W`, `g_{α,β}`, `X_{α,β,t}`, `V_{α,β}` and the
//! approximate-functional-equation residual.
//!
//! Contour integrals use the trapezoid rule on a vertical line. For arguments
//! where `x^{−s}` grows to the right the line `Re s = −2` is used instead,
//! adding the residue `1` from the simple pole at the origin.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::gamma::ln_gamma;
use super::zeta::zeta;
use super::ShiftPair;
use crate::error::{invalid, Result};
use crate::sum::ComplexSum;

const CONTOUR_ABSCISSA: f64 = 2.0;

/// The even entire weight in the contour integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    /// `e^{s²}(s₀² − 4s²)/s₀²`, vanishing at `±s₀/2`.
    PoleAnnihilating { s0: f64 },
    /// `e^{s²}`.
    Gaussian,
}

impl Kernel {
    /// The pole annihilator for `s₀ = α+β`, or the Gaussian when `s₀ = 0`.
    pub fn for_shifts(shifts: &ShiftPair) -> Self {
        let s0 = shifts.sum();
        if s0 == 0.0 {
            Kernel::Gaussian
        } else {
            Kernel::PoleAnnihilating { s0 }
        }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let e = (s * s).exp();
        match *self {
            Kernel::Gaussian => e,
            Kernel::PoleAnnihilating { s0 } => e * (1.0 - s * s * (4.0 / (s0 * s0))),
        }
    }
}

/// `G(s) = e^{s²}((α+β)² − 4s²)/(α+β)²`.
pub fn kernel_g(s: Complex64, shifts: &ShiftPair) -> Result<Complex64> {
    if shifts.sum() == 0.0 {
        return invalid("G is undefined pointwise at α+β = 0; use the jet evaluators");
    }
    Ok(Kernel::PoleAnnihilating { s0: shifts.sum() }.eval(s))
}

/// Trapezoid step and truncation height for vertical contours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourRule {
    pub step: f64,
    pub half_width: f64,
}

impl Default for ContourRule {
    fn default() -> Self {
        Self { step: 0.125, half_width: 12.0 }
    }
}

impl ContourRule {
    pub fn halved(&self) -> Self {
        Self { step: 0.5 * self.step, half_width: self.half_width }
    }

    fn ordinates(&self) -> impl Iterator<Item = f64> + '_ {
        let n = (self.half_width / self.step).ceil() as i64;
        (-n..=n).map(move |j| j as f64 * self.step)
    }

    fn node_count(&self) -> usize {
        2 * (self.half_width / self.step).ceil() as usize + 1
    }
}

/// `(1/2πi) ∫ x^{−w} K(w) dw/w` along `Re w = ±2`.
pub fn w_kernel_with(x: f64, kernel: Kernel, rule: ContourRule) -> f64 {
    let lx = x.ln();
    let c = if lx >= 0.0 { CONTOUR_ABSCISSA } else { -CONTOUR_ABSCISSA };
    let mut acc = ComplexSum::new();
    for y in rule.ordinates() {
        let w = Complex64::new(c, y);
        acc.add(kernel.eval(w) / w * (-w * lx).exp());
    }
    let v = acc.value().re * rule.step / (2.0 * PI);
    if c > 0.0 {
        v
    } else {
        1.0 + v
    }
}

/// `W(x)` with the kernel selected by [`Kernel::for_shifts`].
pub fn w_kernel(x: f64, shifts: &ShiftPair) -> Result<f64> {
    if !(x > 0.0) {
        return invalid(format!("W needs x > 0, got {x}"));
    }
    Ok(w_kernel_with(x, Kernel::for_shifts(shifts), ContourRule::default()))
}

fn check_height(t: f64) -> Result<()> {
    if !(t >= 10.0 && t.is_finite()) {
        return invalid(format!("height t = {t} is below 10"));
    }
    Ok(())
}

fn half(z: Complex64) -> Complex64 {
    z * 0.5
}

fn ln_g_denominator(t: f64, shifts: &ShiftPair) -> Complex64 {
    ln_gamma(half(Complex64::new(0.5 + shifts.alpha, t))) + ln_gamma(half(Complex64::new(0.5 + shifts.beta, -t)))
}

fn ln_g_numerator(s: Complex64, t: f64, shifts: &ShiftPair) -> Complex64 {
    -s * PI.ln()
        + ln_gamma(half(s + Complex64::new(0.5 + shifts.alpha, t)))
        + ln_gamma(half(s + Complex64::new(0.5 + shifts.beta, -t)))
}

/// `g_{α,β}(s,t) = π^{−s} Γ((½+α+s+it)/2) Γ((½+β+s−it)/2) / (Γ((½+α+it)/2) Γ((½+β−it)/2))`.
pub fn g_shift(s: Complex64, t: f64, shifts: &ShiftPair) -> Result<Complex64> {
    check_height(t)?;
    Ok((ln_g_numerator(s, t, shifts) - ln_g_denominator(t, shifts)).exp())
}

/// `X_{α,β,t} = π^{α+β} Γ((½−α−it)/2) Γ((½−β+it)/2) / (Γ((½+α+it)/2) Γ((½+β−it)/2))`.
pub fn x_factor(t: f64, shifts: &ShiftPair) -> Result<Complex64> {
    check_height(t)?;
    let num = ln_gamma(half(Complex64::new(0.5 - shifts.alpha, -t)))
        + ln_gamma(half(Complex64::new(0.5 - shifts.beta, t)))
        + shifts.sum() * PI.ln();
    Ok((num - ln_g_denominator(t, shifts)).exp())
}

/// Precomputed trapezoid weights for `V_{α,β}(·, t)` on both contours.
#[derive(Debug, Clone)]
pub struct VKernel {
    t: f64,
    step: f64,
    y0: f64,
    right: Vec<Complex64>,
    left: Vec<Complex64>,
}

impl VKernel {
    pub fn new(t: f64, shifts: &ShiftPair, rule: ContourRule) -> Result<Self> {
        check_height(t)?;
        let kernel = Kernel::for_shifts(shifts);
        let den = ln_g_denominator(t, shifts);
        let scale = rule.step / (2.0 * PI);
        let weights = |c: f64| -> Vec<Complex64> {
            rule.ordinates()
                .map(|y| {
                    let s = Complex64::new(c, y);
                    kernel.eval(s) / s * (ln_g_numerator(s, t, shifts) - den).exp() * scale
                })
                .collect()
        };
        let y0 = rule.ordinates().next().unwrap_or(0.0);
        debug_assert_eq!(rule.node_count(), rule.ordinates().count());
        Ok(Self { t, step: rule.step, y0, right: weights(CONTOUR_ABSCISSA), left: weights(-CONTOUR_ABSCISSA) })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `V_{α,β}(x, t)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let lx = x.ln();
        let right = lx >= (self.t / (2.0 * PI)).ln();
        let (weights, c) = if right { (&self.right, CONTOUR_ABSCISSA) } else { (&self.left, -CONTOUR_ABSCISSA) };
        // x^{−s_j} = x^{−c} · e^{−i y_j ln x}, stepped by a fixed rotation
        let rot = Complex64::from_polar(1.0, -self.step * lx);
        let mut ph = Complex64::from_polar((-c * lx).exp(), -self.y0 * lx);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, k) in weights.iter().enumerate() {
            if j % 64 == 63 {
                ph = Complex64::from_polar((-c * lx).exp(), -(self.y0 + j as f64 * self.step) * lx);
            }
            acc += k * ph;
            ph *= rot;
        }
        if right {
            acc
        } else {
            acc + 1.0
        }
    }
}

/// `V_{α,β}(x, t)` with the default contour rule.
pub fn v_shift(x: f64, t: f64, shifts: &ShiftPair) -> Result<Complex64> {
    if !(x > 0.0) {
        return invalid(format!("V needs x > 0, got {x}"));
    }
    Ok(VKernel::new(t, shifts, ContourRule::default())?.eval(x))
}

/// Sums are truncated at `m₁m₂ ≤ e^{AFE_LOG_CUT}·t/2π` unless told otherwise.
pub const AFE_LOG_CUT: f64 = 10.0;

const AFE_BLOCK: u64 = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeResidual {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub truncation: u64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub relative: f64,
}

fn afe_block(
    k0: u64,
    k1: u64,
    t: f64,
    shifts: &ShiftPair,
    v1: &VKernel,
    v2: &VKernel,
) -> (ComplexSum, ComplexSum) {
    let width = (k1 - k0) as usize;
    let mut c1 = vec![Complex64::new(0.0, 0.0); width];
    let mut c2 = vec![Complex64::new(0.0, 0.0); width];
    let (a, b) = (shifts.alpha, shifts.beta);
    for m1 in 1..k1 {
        let lo = k0.div_ceil(m1).max(1);
        let hi = (k1 - 1) / m1;
        if lo > hi {
            continue;
        }
        let l1 = (m1 as f64).ln();
        let p1 = Complex64::from_polar((-(0.5 + a) * l1).exp(), -t * l1);
        let p2 = Complex64::from_polar((-(0.5 - b) * l1).exp(), -t * l1);
        for m2 in lo..=hi {
            let l2 = (m2 as f64).ln();
            let idx = (m1 * m2 - k0) as usize;
            let ph = Complex64::from_polar(1.0, t * l2);
            c1[idx] += p1 * ph * (-(0.5 + b) * l2).exp();
            c2[idx] += p2 * ph * (-(0.5 - a) * l2).exp();
        }
    }
    let mut s1 = ComplexSum::new();
    let mut s2 = ComplexSum::new();
    for (i, (x1, x2)) in c1.iter().zip(&c2).enumerate() {
        let k = (k0 + i as u64) as f64;
        s1.add(x1 * v1.eval(k));
        s2.add(x2 * v2.eval(k));
    }
    (s1, s2)
}

/// `|ζ(½+α+it)ζ(½+β−it) − (Σ₁ + X_{α,β,t} Σ₂)|` for the two `V`-weighted sums
/// truncated at `m₁m₂ ≤ truncation`. Both sums carry the phase `(m₂/m₁)^{it}`.
pub fn afe_residual(t: f64, shifts: &ShiftPair, truncation: Option<u64>) -> Result<AfeResidual> {
    if !(50.0..=5000.0).contains(&t) {
        return invalid(format!("afe residual needs t in [50, 5000], got {t}"));
    }
    let floor = t.powf(1.25).ceil() as u64;
    let auto = (AFE_LOG_CUT.exp() * t / (2.0 * PI)).ceil() as u64;
    let truncation = truncation.unwrap_or(auto.max(floor));
    if truncation < floor {
        return invalid(format!("truncation {truncation} does not cover m1*m2 <= t^(5/4) = {floor}"));
    }
    let v1 = VKernel::new(t, shifts, ContourRule::default())?;
    let v2 = VKernel::new(t, &shifts.reflected(), ContourRule::default())?;

    let end = truncation + 1;
    let blocks: Vec<(u64, u64)> =
        (0..end.div_ceil(AFE_BLOCK)).map(|i| ((i * AFE_BLOCK).max(1), ((i + 1) * AFE_BLOCK).min(end))).collect();
    let partials: Vec<(ComplexSum, ComplexSum)> =
        blocks.par_iter().map(|&(k0, k1)| afe_block(k0, k1, t, shifts, &v1, &v2)).collect();
    let mut s1 = ComplexSum::new();
    let mut s2 = ComplexSum::new();
    for (p1, p2) in &partials {
        s1.merge(p1);
        s2.merge(p2);
    }
    let rhs = s1.value() + x_factor(t, shifts)? * s2.value();
    let lhs = zeta(Complex64::new(0.5 + shifts.alpha, t))? * zeta(Complex64::new(0.5 + shifts.beta, -t))?;
    let residual = (lhs - rhs).norm();
    Ok(AfeResidual {
        t,
        alpha: shifts.alpha,
        beta: shifts.beta,
        truncation,
        lhs,
        rhs,
        residual,
        relative: residual / lhs.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn erfc(x: f64) -> f64 {
        libm::erfc(x)
    }

    /// Closed form of the `W` integral by differentiating under the integral sign in `ln x`.
    fn w_closed(x: f64, kernel: Kernel) -> f64 {
        let l = x.ln();
        let gauss = 0.5 * erfc(l / 2.0);
        match kernel {
            Kernel::Gaussian => gauss,
            Kernel::PoleAnnihilating { s0 } => gauss - l * (-l * l / 4.0).exp() / (s0 * s0 * PI.sqrt()),
        }
    }

    fn shifts(a: f64, b: f64) -> ShiftPair {
        ShiftPair::new(a, b, 1e4f64.ln()).unwrap()
    }

    #[test]
    fn g_values() {
        let sh = shifts(0.1, 0.19);
        let s0 = sh.sum();
        assert_eq!(kernel_g(Complex64::new(0.0, 0.0), &sh).unwrap(), Complex64::new(1.0, 0.0));
        assert!(kernel_g(Complex64::new(s0 / 2.0, 0.0), &sh).unwrap().norm() < 1e-15);
        let z = Complex64::new(0.37, -1.2);
        assert!((kernel_g(z, &sh).unwrap() - kernel_g(-z, &sh).unwrap()).norm() < 1e-15);
        assert!(kernel_g(z, &shifts(0.1, -0.1)).is_err());
    }

    #[test]
    fn w_matches_closed_form() {
        for kernel in [Kernel::PoleAnnihilating { s0: 0.29 }, Kernel::Gaussian] {
            for x in [1e-6, 0.01, 0.5, 1.0, 3.0, 1e3, 1e6] {
                let w = w_kernel_with(x, kernel, ContourRule::default());
                assert!((w - w_closed(x, kernel)).abs() < 1e-12, "x = {x}, {kernel:?}: {w}");
            }
        }
        let sh = shifts(0.1, 0.19);
        assert!((w_kernel(1e-6, &sh).unwrap() - 1.0).abs() < 1e-4);
        assert!(w_kernel(1e6, &sh).unwrap().abs() < 1e-10);
        assert!(w_kernel(1e3, &sh).unwrap().abs() > 1e-4);
    }

    #[test]
    fn w_step_halving() {
        let k = Kernel::PoleAnnihilating { s0: 0.2 };
        for x in [0.02, 0.9, 40.0] {
            let a = w_kernel_with(x, k, ContourRule::default());
            let b = w_kernel_with(x, k, ContourRule::default().halved());
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn g_shift_asymptotics() {
        let z = shifts(0.0, 0.0);
        assert_eq!(g_shift(Complex64::new(0.0, 0.0), 500.0, &z).unwrap(), Complex64::new(1.0, 0.0));
        let t = 1e4;
        let g = g_shift(Complex64::new(1.0, 0.0), t, &z).unwrap();
        let want = t / (2.0 * PI);
        assert!((g - want).norm() / want < 1e-3);
        assert!(g_shift(Complex64::new(1.0, 0.0), 5.0, &z).is_err());
    }

    #[test]
    fn x_factor_asymptotics() {
        let z = shifts(0.0, 0.0);
        let x = x_factor(1e3, &z).unwrap();
        assert!((x - 1.0).norm() < 1e-2);
        assert!((x.norm() - 1.0).abs() < 1e-12);
        let sh = shifts(0.05, 0.07);
        let mut prev = f64::INFINITY;
        for t in [1e2, 1e3, 1e4] {
            let d = (x_factor(t, &sh).unwrap() * (t / (2.0 * PI)).powf(sh.sum()) - 1.0).norm();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn v_reduces_to_w() {
        let z = shifts(0.0, 0.0);
        let (x, t) = (10.0, 1e3);
        let v = v_shift(x, t, &z).unwrap();
        let w = w_kernel_with(2.0 * PI * x / t, Kernel::Gaussian, ContourRule::default());
        assert!((v - w).norm() < 10.0 * t.powf(-0.5));
        assert!(v.im.abs() < 1e-2);
        assert!((v_shift(1.0, 1e6, &z).unwrap() - 1.0).norm() < 1e-2);
    }

    #[test]
    fn v_step_halving_and_decay() {
        let t: f64 = 800.0;
        let sh = ShiftPair::at_height(1.0 / t.ln(), 1.0 / t.ln(), t).unwrap();
        let a = VKernel::new(t, &sh, ContourRule::default()).unwrap();
        let b = VKernel::new(t, &sh, ContourRule::default().halved()).unwrap();
        let scaled: Vec<f64> = (0..40)
            .map(|i| {
                let x = t * 10f64.powf(3.0 * i as f64 / 39.0);
                assert!((a.eval(x) - b.eval(x)).norm() < 1e-8);
                a.eval(x).norm() * (1.0 + x / t).powi(3)
            })
            .collect();
        let peak = scaled.iter().cloned().fold(0.0, f64::max);
        assert!(peak.is_finite() && peak < 1e4, "{peak}");
        assert!(scaled[30..].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn afe_holds_on_the_line() {
        let t = 100.0;
        let r = afe_residual(t, &ShiftPair::at_height(0.0, 0.0, t).unwrap(), None).unwrap();
        assert!(r.relative < 1e-3, "{r:?}");
        assert!(afe_residual(t, &ShiftPair::at_height(0.0, 0.0, t).unwrap(), Some(100)).is_err());
        assert!(afe_residual(20.0, &ShiftPair::at_height(0.0, 0.0, 20.0).unwrap(), None).is_err());
    }

    #[test]
    fn afe_holds_for_unequal_shifts() {
        let t = 120.0;
        for (a, b) in [(0.2, -0.2), (0.15, -0.05), (-0.1, 0.25)] {
            let r = afe_residual(t, &ShiftPair::at_height(a, b, t).unwrap(), None).unwrap();
            assert!(r.relative < 1e-6, "{r:?}");
        }
    }
}
