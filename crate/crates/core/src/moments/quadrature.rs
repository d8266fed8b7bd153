//! Direct quadrature of `∫ ζ(1/2+α+it) ζ(1/2+β−it) |A(1/2+it)|² Φ(t/T) dt`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Method, MomentReport};
use crate::error::{invalid, Result};
use crate::mollifier::CoefficientTable;
use crate::special::quad::adaptive;
use crate::special::{bump, bump_integral, zeta_eval, ShiftPair};
use crate::sum::ComplexSum;

pub const MAX_QUADRATURE_HEIGHT: f64 = 2.0e5;
pub const MAX_QUADRATURE_LEN: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureControl {
    /// Width of the top-level panels tiling `[T, 2T]`.
    pub panel_width: f64,
    /// Target error relative to the whole integral.
    pub rel_tol: f64,
    /// Subdivision cap inside each top-level panel.
    pub max_subpanels: usize,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self { panel_width: 1.0, rel_tol: 1e-9, max_subpanels: 64 }
    }
}

/// Direct evaluation of `A(1/2 + it)`.
struct Mollifier {
    terms: Vec<(f64, f64)>,
}

impl Mollifier {
    fn new(c: &CoefficientTable) -> Self {
        let terms = c
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| {
                let n = (i + 1) as f64;
                (v / n.sqrt(), n.ln())
            })
            .collect();
        Self { terms }
    }

    fn norm_sqr(&self, t: f64) -> f64 {
        let mut acc = ComplexSum::new();
        for &(w, l) in &self.terms {
            acc.add(Complex64::from_polar(w, -t * l));
        }
        acc.value().norm_sqr()
    }
}

struct Integrand<'a> {
    alpha: f64,
    beta: f64,
    height: f64,
    mollifier: &'a Mollifier,
}

impl Integrand<'_> {
    fn eval(&self, t: f64) -> (Complex64, bool) {
        let w = bump(t / self.height);
        if w == 0.0 {
            return (Complex64::new(0.0, 0.0), false);
        }
        let left = zeta_eval(Complex64::new(0.5 + self.alpha, t));
        let (zl, dl) = match left {
            Ok(z) => (z.value, z.degraded),
            Err(_) => return (Complex64::new(f64::NAN, f64::NAN), true),
        };
        let (zr, dr) = if self.beta == self.alpha {
            (zl, false)
        } else {
            match zeta_eval(Complex64::new(0.5 + self.beta, t)) {
                Ok(z) => (z.value, z.degraded),
                Err(_) => return (Complex64::new(f64::NAN, f64::NAN), true),
            }
        };
        (zl * zr.conj() * (self.mollifier.norm_sqr(t) * w), dl || dr)
    }
}

pub fn quadrature_i(
    coeffs: &CoefficientTable,
    shifts: &ShiftPair,
    t: f64,
    control: &QuadratureControl,
) -> Result<MomentReport> {
    if !(10.0..=MAX_QUADRATURE_HEIGHT).contains(&t) {
        return invalid(format!("quadrature needs 10 <= T <= {MAX_QUADRATURE_HEIGHT}, got {t}"));
    }
    if coeffs.len() > MAX_QUADRATURE_LEN {
        return invalid(format!("quadrature needs N <= {MAX_QUADRATURE_LEN}, got {}", coeffs.len()));
    }
    if !(control.panel_width > 0.0 && control.rel_tol > 0.0 && control.max_subpanels >= 1) {
        return invalid("panel width, tolerance and subdivision cap must be positive");
    }
    let mollifier = Mollifier::new(coeffs);
    let f = Integrand { alpha: shifts.alpha, beta: shifts.beta, height: t, mollifier: &mollifier };

    let panels = (t / control.panel_width).ceil() as usize;
    let width = t / panels as f64;
    let pilot: f64 = (0..1024)
        .map(|i| f.eval(t * (1.0 + (i as f64 + 0.5) / 1024.0)).0.norm())
        .sum::<f64>()
        / 1024.0;
    let abs_tol = control.rel_tol * pilot * width;

    let results: Vec<_> = (0..panels)
        .into_par_iter()
        .map(|p| {
            let a = t + p as f64 * width;
            let b = if p + 1 == panels { 2.0 * t } else { a + width };
            let degraded = std::cell::Cell::new(false);
            let q = adaptive(
                |x| {
                    let (v, d) = f.eval(x);
                    if d {
                        degraded.set(true);
                    }
                    v
                },
                a,
                b,
                abs_tol,
                0.0,
                control.max_subpanels,
            );
            (q, degraded.get())
        })
        .collect();

    let mut total = ComplexSum::new();
    let mut report = MomentReport::new(Method::Quadrature, t, shifts.alpha, shifts.beta, coeffs.len(), coeffs.len());
    for (q, zeta_degraded) in &results {
        total.add(q.value);
        report.error_estimate += q.error;
        report.panel_count += q.panels;
        report.degraded |= !q.converged || *zeta_degraded;
    }
    let value = total.value();
    if !value.re.is_finite() {
        return invalid("quadrature produced a non-finite value");
    }
    report.value = value.re;
    report.imaginary = value.im;
    report.t_integral = t * bump_integral(0.0);
    report.pair_count = (coeffs.len() as u64).pow(2);
    Ok(report)
}
