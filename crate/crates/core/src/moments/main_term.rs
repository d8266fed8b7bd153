//! Closed-form main terms of the twisted second moment.
//!
//! Writing `d = hm`, `e = hn` with `(m, n) = 1`, the double sum over `d, e`
//! becomes
//!
//! ```text
//! I_M = T [ ζ(1+s) B₀ S(α, β) + ζ(1−s) (2π/T)^s B(s) S(−β, −α) ],   s = α + β,
//! S(α, β) = Σ_q q⁻¹ Σ_{k | q} μ(k) k^{−1−α−β} A_q(α) B_q(β),
//! A_q(α) = Σ_{m ≤ N/q} a_{qm} m^{−1−α},   B_q(β) = Σ_{n ≤ K/q} b_{qn} n^{−1−β},
//! ```
//!
//! with `B(s) = ∫ x^{−s} Φ(x) dx` and `B₀ = B(0)`. Jet mode carries `S` as a
//! bivariate Taylor series and splits `ζ(1±s) = ±1/s + R(±s)`; the two `1/s`
//! parts combine into an exactly divisible jet.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::jet::BivariateJet;
use super::report::{Method, MomentReport};
use crate::arith::{gcd, Sieve};
use crate::error::{invalid, Error, Result};
use crate::mollifier::{convolve_coeffs, CoefficientTable};
use crate::series::Series;
use crate::special::zeta::regular_part_taylor;
use crate::special::{
    bump_integral, bump_log_moment, bump_mellin_jet, zeta_laurent_jet, zeta_real, ShiftPair, EULER_GAMMA,
    LAURENT_RADIUS, MAX_LAURENT_ORDER,
};
use crate::sum::CompensatedSum;

pub const DEFAULT_JET_ORDER: usize = 12;
pub const MAX_JET_ORDER: usize = 40;
pub const DEFAULT_PAIR_BUDGET: u64 = 4_000_000_000;
/// Smallest `T` accepted by the main-term evaluators.
pub const MIN_HEIGHT: f64 = 10.0;

const PROJECTION_THRESHOLD: f64 = 8.0;
const PROJECTION_ORDER: usize = MAX_LAURENT_ORDER;
const Q_CHUNK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    Pointwise,
    Jet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTermOptions {
    pub jet_order: usize,
    pub pair_budget: u64,
}

impl Default for MainTermOptions {
    fn default() -> Self {
        Self { jet_order: DEFAULT_JET_ORDER, pair_budget: DEFAULT_PAIR_BUDGET }
    }
}

fn check_height(t: f64) -> Result<()> {
    if !(t >= MIN_HEIGHT && t.is_finite()) {
        return invalid(format!("T = {t} must be a finite number >= {MIN_HEIGHT}"));
    }
    Ok(())
}

fn check_budget(pairs: u64, budget: u64) -> Result<()> {
    if pairs > budget {
        return Err(Error::BudgetExceeded { required: pairs, budget });
    }
    Ok(())
}

fn pair_count(a: &[f64], b: &[f64]) -> u64 {
    (a.len() as u64).saturating_mul(b.len() as u64)
}

/// Squarefree divisors of every `q ≤ min(N, K)` whose blocks are not both empty.
struct Blocks<'a> {
    a: &'a [f64],
    b: &'a [f64],
    qs: Vec<(usize, Vec<(usize, i8)>)>,
}

impl<'a> Blocks<'a> {
    fn new(a: &'a [f64], b: &'a [f64]) -> Result<Self> {
        let top = a.len().min(b.len());
        let sieve = Sieve::new(top.max(1))?;
        let qs = (1..=top)
            .filter(|&q| {
                let live = |c: &[f64]| (q..=c.len()).step_by(q).any(|d| c[d - 1] != 0.0);
                live(a) && live(b)
            })
            .map(|q| (q, sieve.squarefree_divisors(q)))
            .collect();
        Ok(Self { a, b, qs })
    }

    /// `(S(α, β), S(−β, −α))` pointwise, each as a compensated sum over `q`.
    fn pointwise(&self, alpha: f64, beta: f64) -> (CompensatedSum, CompensatedSum) {
        let s = alpha + beta;
        let parts: Vec<(f64, f64)> = self
            .qs
            .par_chunks(Q_CHUNK)
            .flat_map_iter(|chunk| {
                chunk.iter().map(|(q, divs)| {
                    let q = *q;
                    let block = |c: &[f64], x: f64, y: f64| {
                        let mut sx = CompensatedSum::new();
                        let mut sy = CompensatedSum::new();
                        for m in 1..=c.len() / q {
                            let v = c[q * m - 1];
                            if v == 0.0 {
                                continue;
                            }
                            let lm = (m as f64).ln();
                            sx.add(v * (-(1.0 + x) * lm).exp());
                            sy.add(v * (-(1.0 + y) * lm).exp());
                        }
                        (sx.value(), sy.value())
                    };
                    let (a_plus, a_minus) = block(self.a, alpha, -beta);
                    let (b_plus, b_minus) = block(self.b, beta, -alpha);
                    let mut k_plus = CompensatedSum::new();
                    let mut k_minus = CompensatedSum::new();
                    for &(k, mu) in divs {
                        let lk = (k as f64).ln();
                        k_plus.add(mu as f64 * (-(1.0 + s) * lk).exp());
                        k_minus.add(mu as f64 * (-(1.0 - s) * lk).exp());
                    }
                    let qf = q as f64;
                    (k_plus.value() * a_plus * b_plus / qf, k_minus.value() * a_minus * b_minus / qf)
                })
            })
            .collect();
        let mut s1 = CompensatedSum::new();
        let mut s2 = CompensatedSum::new();
        for (x, y) in parts {
            s1.add(x);
            s2.add(y);
        }
        (s1, s2)
    }

    /// Taylor coefficients of `Σ_m c_{qm} m^{−1}(km)^{−x₀−u}` in `u`.
    fn block_series(c: &[f64], q: usize, k: usize, x0: f64, order: usize) -> Vec<f64> {
        let mut acc = vec![CompensatedSum::new(); order + 1];
        let lk = (k as f64).ln();
        for m in 1..=c.len() / q {
            let v = c[q * m - 1];
            if v == 0.0 {
                continue;
            }
            let l = lk + (m as f64).ln();
            let mut term = v / m as f64 * (-x0 * l).exp();
            for (i, slot) in acc.iter_mut().enumerate() {
                slot.add(term);
                term *= -l / (i + 1) as f64;
            }
        }
        acc.iter().map(CompensatedSum::value).collect()
    }

    /// Jet of `S(α, β)` at `(α₀, β₀)`, with the compensation term of `c₀₀`.
    fn jet(&self, alpha0: f64, beta0: f64, order: usize) -> (BivariateJet, f64) {
        let size = (order + 1) * (order + 2) / 2;
        let parts: Vec<Vec<f64>> = self
            .qs
            .par_chunks(Q_CHUNK)
            .map(|chunk| {
                let mut local = BivariateJet::zero(alpha0, beta0, order);
                for (q, divs) in chunk {
                    for &(k, mu) in divs {
                        let sa = Self::block_series(self.a, *q, k, alpha0, order);
                        let sb = Self::block_series(self.b, *q, k, beta0, order);
                        local.add_outer(&sa, &sb, mu as f64 / (k * q) as f64);
                    }
                }
                let mut raw = Vec::with_capacity(size);
                for i in 0..=order {
                    for j in 0..=order - i {
                        raw.push(local.coeff(i, j));
                    }
                }
                raw
            })
            .collect();
        let mut sums = vec![CompensatedSum::new(); size];
        for part in &parts {
            for (s, &v) in sums.iter_mut().zip(part) {
                s.add(v);
            }
        }
        let residual = sums[0].residual();
        let raw = sums.iter().map(CompensatedSum::value).collect();
        (BivariateJet::from_raw(alpha0, beta0, order, raw), residual)
    }

    /// `Σ (coprime m, n) a_{hm} b_{hn}/(hmn) · (c − ln m − ln n)`.
    fn limit(&self, c: f64) -> (CompensatedSum, CompensatedSum) {
        let parts: Vec<(f64, f64)> = self
            .qs
            .par_chunks(Q_CHUNK)
            .flat_map_iter(|chunk| {
                chunk.iter().map(move |(q, divs)| {
                    let q = *q;
                    let block = |tab: &[f64]| {
                        let mut s0 = CompensatedSum::new();
                        let mut s1 = CompensatedSum::new();
                        for m in 1..=tab.len() / q {
                            let v = tab[q * m - 1] / m as f64;
                            s0.add(v);
                            s1.add(v * (m as f64).ln());
                        }
                        (s0.value(), s1.value())
                    };
                    let (a0, a1) = block(self.a);
                    let (b0, b1) = block(self.b);
                    let mut plain = CompensatedSum::new();
                    let mut logged = CompensatedSum::new();
                    for &(k, mu) in divs {
                        let w = mu as f64 / k as f64;
                        plain.add(w * a0 * b0);
                        logged.add(w * ((c - 2.0 * (k as f64).ln()) * a0 * b0 - a1 * b0 - a0 * b1));
                    }
                    let qf = q as f64;
                    (plain.value() / qf, logged.value() / qf)
                })
            })
            .collect();
        let mut plain = CompensatedSum::new();
        let mut logged = CompensatedSum::new();
        for (x, y) in parts {
            plain.add(x);
            logged.add(y);
        }
        (plain, logged)
    }
}

fn base_report(method: Method, a: &[f64], b: &[f64], shifts: (f64, f64), t: f64) -> MomentReport {
    let mut r = MomentReport::new(method, t, shifts.0, shifts.1, a.len(), b.len());
    r.pair_count = pair_count(a, b);
    r.t_integral = t * bump_integral(0.0);
    r
}

fn pointwise(a: &[f64], b: &[f64], shifts: &ShiftPair, t: f64) -> Result<MomentReport> {
    let s = shifts.sum();
    if s == 0.0 {
        return Err(Error::Pole);
    }
    let blocks = Blocks::new(a, b)?;
    let (s1, s2) = blocks.pointwise(shifts.alpha, shifts.beta);
    let b0 = bump_integral(0.0);
    let e = (2.0 * PI / t).powf(s) * bump_integral(-s);
    let mut r = base_report(Method::Pointwise, a, b, (shifts.alpha, shifts.beta), t);
    r.zeta_plus = t * zeta_real(1.0 + s)? * b0 * s1.value();
    r.zeta_minus = t * zeta_real(1.0 - s)? * e * s2.value();
    r.value = r.zeta_plus + r.zeta_minus;
    r.residual = t * b0 * s1.residual().abs().max(s2.residual().abs());
    Ok(r)
}

/// Univariate `(2π/T)^{s₀+u} B(s₀+u)`.
fn exponent_series(s0: f64, t: f64, order: usize) -> Series {
    let ln_ratio = (2.0 * PI / t).ln();
    let power = Series::new(vec![s0 * ln_ratio, ln_ratio], order).exp();
    power.mul(&bump_mellin_jet(s0, order))
}

struct JetPieces {
    plus: BivariateJet,
    minus: BivariateJet,
    pole: BivariateJet,
    residual: f64,
    cancellation: f64,
}

impl JetPieces {
    fn total(&self) -> BivariateJet {
        self.plus.add(&self.minus).add(&self.pole)
    }
}

fn jet_direct(blocks: &Blocks, alpha0: f64, beta0: f64, t: f64, order: usize) -> Result<JetPieces> {
    let s0 = alpha0 + beta0;
    let (s1, residual) = blocks.jet(alpha0, beta0, order);
    let (s2, _) = blocks.jet(-beta0, -alpha0, order);
    let s2 = s2.reflect();
    let zp = zeta_laurent_jet(&Series::variable(s0, order), order)?;
    let zm = zeta_laurent_jet(&Series::new(vec![-s0, -1.0], order), order)?;
    let (zp, zm) = match (zp.to_series(), zm.to_series()) {
        (Some(p), Some(m)) => (p, m),
        _ => return Err(Error::Pole),
    };
    let b0 = bump_integral(0.0);
    let e = exponent_series(s0, t, order);
    let plus = BivariateJet::from_sum(&zp.scale(t * b0), alpha0, beta0, order).mul(&s1);
    let minus = BivariateJet::from_sum(&zm.mul(&e).scale(t), alpha0, beta0, order).mul(&s2);
    Ok(JetPieces {
        plus,
        minus,
        pole: BivariateJet::zero(alpha0, beta0, order),
        residual: t * b0 * residual,
        cancellation: 0.0,
    })
}

/// Jet at the nearest point of `α + β = 0`, where the pole parts cancel by
/// exact division, translated back to `(α₀, β₀)`.
fn jet_projected(blocks: &Blocks, alpha0: f64, beta0: f64, t: f64, order: usize) -> Result<JetPieces> {
    let h = 0.5 * (alpha0 + beta0);
    let (ap, bp) = (alpha0 - h, beta0 - h);
    let big = PROJECTION_ORDER;
    let (s1, residual) = blocks.jet(ap, bp, big + 1);
    let (s2, _) = blocks.jet(-bp, -ap, big + 1);
    let s2 = s2.reflect();
    let b0 = bump_integral(0.0);
    let e = BivariateJet::from_sum(&exponent_series(0.0, t, big + 1), ap, bp, big + 1);
    let es2 = e.mul(&s2);
    let d = s1.scale(b0).sub(&es2);
    let (pole, cancellation) = d.divide_by_sum()?;

    let r = regular_part_taylor(0.0, big);
    let r_minus: Vec<f64> = r.iter().enumerate().map(|(k, c)| if k % 2 == 0 { *c } else { -c }).collect();
    let rp = BivariateJet::from_sum(&Series::new(r, big), ap, bp, big);
    let rm = BivariateJet::from_sum(&Series::new(r_minus, big), ap, bp, big);
    let plus = rp.mul(&s1.truncate(big)).scale(t * b0);
    let minus = rm.mul(&es2.truncate(big)).scale(t);
    let pole = pole.scale(t);
    let back = |j: &BivariateJet| j.translate(h, h).truncate(order);
    Ok(JetPieces {
        plus: back(&plus),
        minus: back(&minus),
        pole: back(&pole),
        residual: t * b0 * residual,
        cancellation: t * cancellation,
    })
}

fn jet_pieces(a: &[f64], b: &[f64], alpha0: f64, beta0: f64, t: f64, order: usize) -> Result<JetPieces> {
    if order > MAX_JET_ORDER {
        return invalid(format!("jet order {order} exceeds {MAX_JET_ORDER}"));
    }
    let s0 = alpha0 + beta0;
    let blocks = Blocks::new(a, b)?;
    let spread = (t / (2.0 * PI)).ln().abs() + (a.len() as f64).ln() + (b.len() as f64).ln() + 1.0;
    if s0.abs() * spread < PROJECTION_THRESHOLD {
        jet_projected(&blocks, alpha0, beta0, t, order)
    } else {
        if s0.abs() > LAURENT_RADIUS {
            return invalid(format!("|α+β| = {} is too large for the jet expansion", s0.abs()));
        }
        jet_direct(&blocks, alpha0, beta0, t, order)
    }
}

/// Bivariate Taylor jet of the main term at `(α₀, β₀)` for the index set
/// `d ≤ N` (table `a`), `e ≤ K` (table `b`).
pub fn main_term_jet(
    a: &CoefficientTable,
    b: &CoefficientTable,
    shifts: &ShiftPair,
    t: f64,
    opts: &MainTermOptions,
) -> Result<(BivariateJet, MomentReport)> {
    check_height(t)?;
    check_budget(pair_count(a.values(), b.values()), opts.pair_budget)?;
    let p = jet_pieces(a.values(), b.values(), shifts.alpha, shifts.beta, t, opts.jet_order)?;
    let jet = p.total();
    let mut r = base_report(Method::Jet, a.values(), b.values(), (shifts.alpha, shifts.beta), t);
    r.value = jet.value();
    r.zeta_plus = p.plus.value();
    r.zeta_minus = p.minus.value();
    r.pole_term = p.pole.value();
    r.residual = p.residual;
    r.error_estimate = p.cancellation;
    Ok((jet, r))
}

/// The two-table main term (distinct coefficient sequences on `d` and `e`).
pub fn main_term_upsilon(
    a: &CoefficientTable,
    b: &CoefficientTable,
    shifts: &ShiftPair,
    t: f64,
    mode: EvalMode,
    opts: &MainTermOptions,
) -> Result<MomentReport> {
    check_height(t)?;
    check_budget(pair_count(a.values(), b.values()), opts.pair_budget)?;
    match mode {
        EvalMode::Pointwise => pointwise(a.values(), b.values(), shifts, t),
        EvalMode::Jet => main_term_jet(a, b, shifts, t, opts).map(|(_, r)| r),
    }
}

pub fn main_term_i(
    coeffs: &CoefficientTable,
    shifts: &ShiftPair,
    t: f64,
    mode: EvalMode,
    opts: &MainTermOptions,
) -> Result<MomentReport> {
    main_term_upsilon(coeffs, coeffs, shifts, t, mode, opts)
}

/// Main term for the convolved sequence `𝔞 = a ∗ b` on `d, e ≤ NK`.
pub fn main_term_j(
    a: &CoefficientTable,
    b: &CoefficientTable,
    shifts: &ShiftPair,
    t: f64,
    mode: EvalMode,
    opts: &MainTermOptions,
) -> Result<MomentReport> {
    if a.len() < b.len() {
        return invalid(format!("need N >= K, got N = {} and K = {}", a.len(), b.len()));
    }
    let len = (a.len() as u64).saturating_mul(b.len() as u64);
    check_budget(len.saturating_mul(len), opts.pair_budget)?;
    let conv = convolve_coeffs(a, b)?;
    main_term_i(&conv, shifts, t, mode, opts)
}

/// The `α, β → 0` closed form
/// `Σ a_d b_e/[d,e] ∫(log(t(d,e)²/2πde) + 2γ) Φ(t/T) dt`.
pub fn main_term_limit_upsilon(
    a: &CoefficientTable,
    b: &CoefficientTable,
    t: f64,
    opts: &MainTermOptions,
) -> Result<MomentReport> {
    check_height(t)?;
    check_budget(pair_count(a.values(), b.values()), opts.pair_budget)?;
    let blocks = Blocks::new(a.values(), b.values())?;
    let b0 = bump_integral(0.0);
    let b1 = bump_log_moment(0.0, 1);
    let c = (t / (2.0 * PI)).ln() + 2.0 * EULER_GAMMA + b1 / b0;
    let (plain, logged) = blocks.limit(c);
    let mut r = base_report(Method::Limit, a.values(), b.values(), (0.0, 0.0), t);
    r.value = t * b0 * logged.value();
    r.zeta_plus = t * EULER_GAMMA * b0 * plain.value();
    r.zeta_minus = r.zeta_plus;
    r.pole_term = r.value - r.zeta_plus - r.zeta_minus;
    r.residual = t * b0 * logged.residual().abs();
    Ok(r)
}

pub fn main_term_limit(coeffs: &CoefficientTable, t: f64, opts: &MainTermOptions) -> Result<MomentReport> {
    main_term_limit_upsilon(coeffs, coeffs, t, opts)
}

/// Unstructured double loop over `d ≤ N`, `e ≤ K`. `None` evaluates the
/// `α, β → 0` limit; otherwise `α + β ≠ 0` is required.
pub fn main_term_naive(
    a: &CoefficientTable,
    b: &CoefficientTable,
    shifts: Option<&ShiftPair>,
    t: f64,
    opts: &MainTermOptions,
) -> Result<MomentReport> {
    check_height(t)?;
    check_budget(pair_count(a.values(), b.values()), opts.pair_budget)?;
    let b0 = bump_integral(0.0);
    let (alpha, beta) = shifts.map_or((0.0, 0.0), |s| (s.alpha, s.beta));
    let s = alpha + beta;
    let mut r = base_report(Method::Naive, a.values(), b.values(), (alpha, beta), t);
    let rows: Vec<CompensatedSum> = match shifts {
        None => {
            let b1 = bump_log_moment(0.0, 1);
            let c = (t / (2.0 * PI)).ln() + 2.0 * EULER_GAMMA + b1 / b0;
            a.values()
                .par_iter()
                .enumerate()
                .map(|(i, &ad)| {
                    let d = (i + 1) as u64;
                    let mut acc = CompensatedSum::new();
                    for (j, &be) in b.values().iter().enumerate() {
                        let e = (j + 1) as u64;
                        let g = gcd(d, e);
                        let lcm = (d / g * e) as f64;
                        let mn = ((d / g) * (e / g)) as f64;
                        acc.add(ad * be / lcm * t * b0 * (c - mn.ln()));
                    }
                    acc
                })
                .collect()
        }
        Some(_) => {
            if s == 0.0 {
                return Err(Error::Pole);
            }
            let zp = zeta_real(1.0 + s)?;
            let zm = zeta_real(1.0 - s)? * bump_integral(-s);
            a.values()
                .par_iter()
                .enumerate()
                .map(|(i, &ad)| {
                    let d = (i + 1) as u64;
                    let mut acc = CompensatedSum::new();
                    for (j, &be) in b.values().iter().enumerate() {
                        let e = (j + 1) as u64;
                        let g = gcd(d, e);
                        let lcm = (d / g * e) as f64;
                        let (df, ef, gf) = (d as f64, e as f64, g as f64);
                        let twist = gf.powf(s) / (df.powf(alpha) * ef.powf(beta));
                        let y = 2.0 * PI * df * ef / (gf * gf * t);
                        acc.add(ad * be / lcm * twist * t * (zp * b0 + zm * y.powf(s)));
                    }
                    acc
                })
                .collect()
        }
    };
    let mut total = CompensatedSum::new();
    for row in &rows {
        total.merge(row);
    }
    r.value = total.value();
    r.zeta_plus = r.value;
    r.residual = total.residual().abs();
    Ok(r)
}
