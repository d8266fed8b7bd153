//! The differential operator `Q(−∂_α/L) Q(−∂_β/L)` applied through jets, and
//! the resulting lower-bound estimate for the proportion of critical zeros.

use serde::{Deserialize, Serialize};
use std::fmt::Write;

use super::jet::BivariateJet;
use super::main_term::{main_term_jet, MainTermOptions};
use crate::error::{invalid, Error, Result};
use crate::mollifier::{conrey_coeffs, feng_coeffs, presets, trimmed_length, two_piece_coeffs, CoefficientTable, UnitPolynomial};
use crate::special::{bump_integral, ShiftPair};

/// `Σ q_i q_j (−1/L)^{i+j} ∂^i_α ∂^j_β` applied to a jet.
pub fn contract_q(jet: &BivariateJet, q: &UnitPolynomial, log_scale: f64) -> Result<f64> {
    let deg = q.degree();
    if jet.order() < 2 * deg {
        return invalid(format!("jet order {} is below 2·deg Q = {}", jet.order(), 2 * deg));
    }
    let mut w = Vec::with_capacity(deg + 1);
    let mut fact = 1.0;
    let mut scale = 1.0;
    for (i, &c) in q.coeffs().iter().enumerate() {
        if i > 0 {
            fact *= i as f64;
            scale *= -1.0 / log_scale;
        }
        w.push(c * scale * fact);
    }
    Ok(jet.contract(&w, &w))
}

/// `Q(−∂_α/L) Q(−∂_β/L) I(α, β)` at `α = β = eval_point`, with `L = log T`.
pub fn apply_q_operator(
    q: &UnitPolynomial,
    coeffs: &CoefficientTable,
    t: f64,
    eval_point: f64,
    opts: &MainTermOptions,
) -> Result<f64> {
    if opts.jet_order < 2 * q.degree() {
        return invalid(format!("jet order {} is below 2·deg Q = {}", opts.jet_order, 2 * q.degree()));
    }
    let shifts = ShiftPair::at_height(eval_point, eval_point, t)?;
    let (jet, _) = main_term_jet(coeffs, coeffs, &shifts, t, opts)?;
    contract_q(&jet, q, t.ln())
}

/// The two-piece mollifier: a Conrey piece of length `T^{θ₁}` and a Feng
/// piece of length `T^{θ₂}`, both trimmed by `1/log T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPieceSpec {
    pub theta1: f64,
    pub theta2: f64,
    pub p1: UnitPolynomial,
    /// `P_2..P_K`.
    pub feng: Vec<UnitPolynomial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaConfig {
    pub r: f64,
    pub q: UnitPolynomial,
    pub t: f64,
    /// `None` is the trivial mollifier `A ≡ 1`.
    pub mollifier: Option<TwoPieceSpec>,
    pub options: MainTermOptions,
}

impl KappaConfig {
    /// The published parameter set.
    pub fn feng2011(t: f64) -> Self {
        Self {
            r: presets::R,
            q: presets::q(),
            t,
            mollifier: Some(TwoPieceSpec {
                theta1: presets::THETA1,
                theta2: presets::THETA2,
                p1: presets::p1(),
                feng: vec![presets::p2(), presets::p3()],
            }),
            options: MainTermOptions::default(),
        }
    }

    /// `A ≡ 1` and `Q ≡ 1` at the same `R`.
    pub fn trivial(r: f64, t: f64) -> Self {
        Self { r, q: UnitPolynomial::constant(1.0), t, mollifier: None, options: MainTermOptions::default() }
    }

    /// Mollifier coefficients with the `σ₀` weight removed, and the two lengths.
    pub fn coefficients(&self) -> Result<(CoefficientTable, usize, usize)> {
        let Some(spec) = &self.mollifier else {
            return Ok((CoefficientTable::delta_one(), 1, 1));
        };
        let l = self.t.ln();
        let shift = -self.r / l;
        let n1 = trimmed_length(self.t, spec.theta1);
        let n2 = trimmed_length(self.t, spec.theta2);
        let conrey = conrey_coeffs(n1, &spec.p1, shift)?;
        let feng = feng_coeffs(n2, &spec.feng, spec.feng.len() + 1, shift, l)?;
        Ok((two_piece_coeffs(&conrey, &feng)?.on_half_line(), n1, n2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub t: f64,
    pub n1: usize,
    pub n2: usize,
    /// The operator applied to the smoothed main term.
    pub e_value: f64,
    /// `e_value / (T ∫Φ)`, read as the mean of `|VA(σ₀+it)|²`.
    pub mean: f64,
    pub kappa: f64,
}

/// `1 − log(m)/R` with `m = 𝔈 / (T∫Φ)`.
///
/// The smoothed integral is read as `T·∫Φ` times a sharp mean; this is a
/// heuristic normalization and the result is a finite-`T` trend, not a bound.
pub fn kappa_lower_bound(config: &KappaConfig) -> Result<KappaEstimate> {
    if !(config.r > 0.0 && config.r.is_finite()) {
        return invalid(format!("R = {} must be positive", config.r));
    }
    let (coeffs, n1, n2) = config.coefficients()?;
    let l = config.t.ln();
    let e_value = apply_q_operator(&config.q, &coeffs, config.t, -config.r / l, &config.options)?;
    let mean = e_value / (config.t * bump_integral(0.0));
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::InvalidResult(format!("smoothed mean {mean} is not positive")));
    }
    Ok(KappaEstimate { t: config.t, n1, n2, e_value, mean, kappa: 1.0 - mean.ln() / config.r })
}

pub fn kappa_csv(rows: &[KappaEstimate]) -> String {
    let mut out = String::from("T,N1,N2,E_value,kappa_est\n");
    for r in rows {
        let _ = writeln!(out, "{:?},{},{},{:?},{:?}", r.t, r.n1, r.n2, r.e_value, r.kappa);
    }
    out
}
