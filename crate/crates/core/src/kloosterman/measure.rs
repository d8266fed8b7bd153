//! Direct evaluation of bilinear and trilinear Kloosterman-type sums against
//! the shapes of their known upper bounds (with `ε = 0`).
//!
//! Nothing here asserts a bound; each evaluation returns `lhs`, `rhs` and
//! their ratio, and campaigns emit one CSV row per trial.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::{gcd, mod_inverse};
use crate::error::{invalid, Result};
use crate::sum::{CompensatedSum, ComplexSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl RatioReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 } }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn characters(n: u64) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect()
}

/// `|Σ_{a∼A} Σ_{m∼M, n∼N, (m,n)=1} ν_a α_m β_n e(a m̄ / n)|` against
/// `‖α‖‖β‖‖ν‖(1 + A/MN)^{1/2}((AMN)^{7/20}(M+N)^{1/4} + (AMN)^{3/8}(AN+AM)^{1/8})`.
///
/// `nu[i]` is the coefficient of `a = a0 + i`, and likewise for `alpha`, `beta`.
/// The modulus `n = 1` is excluded.
pub fn bilinear_sum_measure(
    nu: &[f64],
    alpha: &[f64],
    beta: &[f64],
    a0: u64,
    m0: u64,
    n0: u64,
) -> Result<RatioReport> {
    if a0 == 0 || m0 == 0 || n0 == 0 {
        return invalid("block starts must be positive");
    }
    let max_len = 2000;
    if nu.len() > max_len || alpha.len() > max_len || beta.len() > max_len {
        return invalid(format!("block lengths are capped at {max_len}"));
    }
    let partials: Vec<ComplexSum> = beta
        .par_iter()
        .enumerate()
        .map(|(j, &b)| {
            let n = n0 + j as u64;
            let mut acc = ComplexSum::new();
            if n == 1 || b == 0.0 {
                return acc;
            }
            let chars = characters(n);
            for (i, &am) in alpha.iter().enumerate() {
                let m = m0 + i as u64;
                if am == 0.0 || gcd(m, n) != 1 {
                    continue;
                }
                let mbar = mod_inverse(m as i64, n).expect("coprime") as u128;
                let mut inner = Complex64::new(0.0, 0.0);
                for (k, &v) in nu.iter().enumerate() {
                    let a = (a0 + k as u64) as u128;
                    inner += chars[((a * mbar) % n as u128) as usize] * v;
                }
                acc.add(inner * (am * b));
            }
            acc
        })
        .collect();
    let mut total = ComplexSum::new();
    for p in &partials {
        total.merge(p);
    }
    let (a, m, n) = (a0 as f64, m0 as f64, n0 as f64);
    let amn = a * m * n;
    let rhs = norm2(alpha) * norm2(beta) * norm2(nu) * (1.0 + a / (m * n)).sqrt()
        * (amn.powf(7.0 / 20.0) * (m + n).powf(0.25) + amn.powf(3.0 / 8.0) * (a * n + a * m).powf(0.125));
    Ok(RatioReport::new(total.value().norm(), rhs))
}

/// `Σ_{v≤V, b≤B, (bϱ,v)=1} |Σ_{n≤N} Σ_{a≤A, (a,v)=1} c(a,n) e(n·\overline{ϱab}/v)|` against
/// `(ABNV)^{1/2}{(BV)^{1/2} + (A+N)^{1/4}[BV(N+ϱA)(V+ϱA²) + ϱA²B²N]^{1/4}}`.
///
/// `c[(a−1)·N + (n−1)]` holds `c(a, n)`.
pub fn trilinear_sum_measure(c: &[Complex64], a_len: usize, b_len: usize, n_len: usize, v_len: usize, rho: u64) -> Result<RatioReport> {
    if a_len == 0 || b_len == 0 || n_len == 0 || v_len == 0 || rho == 0 {
        return invalid("all block sizes and rho must be positive");
    }
    if a_len.max(b_len).max(n_len).max(v_len) > 500 {
        return invalid("block sizes are capped at 500");
    }
    if c.len() != a_len * n_len {
        return invalid(format!("expected {} coefficients, got {}", a_len * n_len, c.len()));
    }
    if c.iter().any(|z| z.norm() > 1.0 + 1e-12) {
        return invalid("coefficients must satisfy |c(a,n)| <= 1");
    }
    let partials: Vec<CompensatedSum> = (1..=v_len as u64)
        .into_par_iter()
        .map(|v| {
            let chars = characters(v);
            let mut acc = CompensatedSum::new();
            if gcd(rho % v, v) != 1 {
                return acc;
            }
            for b in 1..=b_len as u64 {
                if gcd(b % v, v) != 1 {
                    continue;
                }
                let mut inner = Complex64::new(0.0, 0.0);
                for a in 1..=a_len as u64 {
                    if gcd(a % v, v) != 1 {
                        continue;
                    }
                    let prod = ((rho as u128 * a as u128 % v as u128) * b as u128 % v as u128) as i64;
                    let inv = mod_inverse(prod, v).expect("coprime") as u128;
                    let row = &c[(a as usize - 1) * n_len..a as usize * n_len];
                    for (j, &z) in row.iter().enumerate() {
                        let n = (j + 1) as u128;
                        inner += z * chars[((n * inv) % v as u128) as usize];
                    }
                }
                acc.add(inner.norm());
            }
            acc
        })
        .collect();
    let mut total = CompensatedSum::new();
    for p in &partials {
        total.merge(p);
    }
    let (a, b, n, v, r) = (a_len as f64, b_len as f64, n_len as f64, v_len as f64, rho as f64);
    let bracket = b * v * (n + r * a) * (v + r * a * a) + r * a * a * b * b * n;
    let rhs = (a * b * n * v).sqrt() * ((b * v).sqrt() + (a + n).powf(0.25) * bracket.powf(0.25));
    Ok(RatioReport::new(total.value(), rhs))
}

/// One row of a measurement campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub params: Vec<(String, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub seed: u64,
}

/// Header from the first row's parameter names, then one line per row.
pub fn rows_to_csv(rows: &[MeasurementRow]) -> String {
    let mut out = String::new();
    if let Some(first) = rows.first() {
        for (name, _) in &first.params {
            out.push_str(name);
            out.push(',');
        }
    }
    out.push_str("lhs,rhs,ratio,seed\n");
    for r in rows {
        for (_, v) in &r.params {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{:.12e},{:.12e},{:.12e},{}\n", r.lhs, r.rhs, r.ratio, r.seed));
    }
    out
}

/// Per-trial seed derived from the master seed (splitmix64 step).
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn signs(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Random `±1` coefficients on `[A,2A) × [M,2M) × [N,2N)`.
pub fn bilinear_campaign(a: u64, m: u64, n: u64, trials: u64, seed: u64) -> Result<Vec<MeasurementRow>> {
    (0..trials)
        .map(|t| {
            let s = trial_seed(seed, t);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let nu = signs(&mut rng, a as usize);
            let al = signs(&mut rng, m as usize);
            let be = signs(&mut rng, n as usize);
            let r = bilinear_sum_measure(&nu, &al, &be, a, m, n)?;
            Ok(MeasurementRow {
                params: vec![("A".into(), a as f64), ("M".into(), m as f64), ("N".into(), n as f64)],
                lhs: r.lhs,
                rhs: r.rhs,
                ratio: r.ratio,
                seed: s,
            })
        })
        .collect()
}

/// Random unimodular coefficients on `A × N`.
pub fn trilinear_campaign(
    a: usize,
    b: usize,
    n: usize,
    v: usize,
    rho: u64,
    trials: u64,
    seed: u64,
) -> Result<Vec<MeasurementRow>> {
    (0..trials)
        .map(|t| {
            let s = trial_seed(seed, t);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let c: Vec<Complex64> =
                (0..a * n).map(|_| Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>())).collect();
            let r = trilinear_sum_measure(&c, a, b, n, v, rho)?;
            Ok(MeasurementRow {
                params: vec![
                    ("A".into(), a as f64),
                    ("B".into(), b as f64),
                    ("N".into(), n as f64),
                    ("V".into(), v as f64),
                    ("rho".into(), rho as f64),
                ],
                lhs: r.lhs,
                rhs: r.rhs,
                ratio: r.ratio,
                seed: s,
            })
        })
        .collect()
}
