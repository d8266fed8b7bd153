use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::{gcd, mod_inverse};
use crate::error::{invalid, Result};

/// A complete Kloosterman sum together with its Weil certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KloostermanRecord {
    pub a: i64,
    pub b: i64,
    pub c: u64,
    pub value: Complex64,
    pub weil_bound: f64,
    pub satisfied: bool,
}

fn divisor_count(mut n: u64) -> u64 {
    let mut count = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        count *= e + 1;
        p += 1;
    }
    if n > 1 {
        count *= 2;
    }
    count
}

fn residue(a: i64, c: u64) -> u64 {
    a.rem_euclid(c as i64) as u64
}

/// `τ(c)·√c·√gcd(a, b, c)`.
pub fn weil_bound(a: i64, b: i64, c: u64) -> f64 {
    let g = gcd(gcd(residue(a, c), residue(b, c)), c);
    divisor_count(c) as f64 * (c as f64).sqrt() * (g as f64).sqrt()
}

/// Inverses and additive characters modulo a fixed `c`.
#[derive(Debug, Clone)]
pub struct KloostermanTable {
    c: u64,
    units: Vec<(u64, u64)>,
    chars: Vec<Complex64>,
    tau: u64,
}

impl KloostermanTable {
    pub fn new(c: u64) -> Result<Self> {
        if c == 0 {
            return invalid("Kloosterman modulus must be at least 1");
        }
        let units = (0..c)
            .filter_map(|x| mod_inverse(x as i64, c).filter(|_| gcd(x, c) == 1).map(|inv| (x, inv)))
            .collect();
        let chars = (0..c).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / c as f64)).collect();
        Ok(Self { c, units, chars, tau: divisor_count(c) })
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    pub fn eval(&self, a: i64, b: i64) -> KloostermanRecord {
        let c = self.c;
        let (ar, br) = (residue(a, c) as u128, residue(b, c) as u128);
        let mut value = Complex64::new(0.0, 0.0);
        for &(x, xi) in &self.units {
            let k = (ar * x as u128 + br * xi as u128) % c as u128;
            value += self.chars[k as usize];
        }
        let g = gcd(gcd(ar as u64, br as u64), c);
        let weil_bound = self.tau as f64 * (c as f64).sqrt() * (g as f64).sqrt();
        KloostermanRecord { a, b, c, value, weil_bound, satisfied: value.norm() <= weil_bound * (1.0 + 1e-12) + 1e-9 }
    }
}

/// `S(a, b; c) = Σ_{x mod c, (x,c)=1} e((ax + b·x̄)/c)`.
pub fn complete_kloosterman(a: i64, b: i64, c: u64) -> Result<KloostermanRecord> {
    Ok(KloostermanTable::new(c)?.eval(a, b))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeilSummary {
    pub checked: u64,
    pub failures: Vec<KloostermanRecord>,
    /// Largest `|S| / bound` seen.
    pub max_ratio: f64,
}

impl WeilSummary {
    fn absorb(&mut self, r: &KloostermanRecord) {
        self.checked += 1;
        if r.weil_bound > 0.0 {
            self.max_ratio = self.max_ratio.max(r.value.norm() / r.weil_bound);
        }
        if !r.satisfied {
            self.failures.push(*r);
        }
    }

    fn merge(&mut self, other: WeilSummary) {
        self.checked += other.checked;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self.failures.extend(other.failures);
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Every `(a, b)` modulo `c` for `c ≤ exhaustive_max`, then `samples` random
/// triples with `c ≤ c_max`.
pub fn weil_campaign(exhaustive_max: u64, c_max: u64, samples: usize, seed: u64) -> Result<WeilSummary> {
    if c_max == 0 {
        return invalid("c_max must be at least 1");
    }
    let exhaustive: Vec<WeilSummary> = (1..=exhaustive_max)
        .into_par_iter()
        .map(|c| {
            let table = KloostermanTable::new(c).expect("c >= 1");
            let mut s = WeilSummary::default();
            for a in 0..c as i64 {
                for b in 0..c as i64 {
                    s.absorb(&table.eval(a, b));
                }
            }
            s
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples: Vec<(u64, i64, i64)> = (0..samples)
        .map(|_| {
            let c = rng.gen_range(1..=c_max);
            (c, rng.gen_range(0..c as i64), rng.gen_range(0..c as i64))
        })
        .collect();
    triples.sort_unstable();
    let mut groups: Vec<&[(u64, i64, i64)]> = Vec::new();
    let mut start = 0;
    for i in 1..=triples.len() {
        if i == triples.len() || triples[i].0 != triples[start].0 {
            groups.push(&triples[start..i]);
            start = i;
        }
    }
    let sampled: Vec<WeilSummary> = groups
        .par_iter()
        .map(|g| {
            let table = KloostermanTable::new(g[0].0).expect("c >= 1");
            let mut s = WeilSummary::default();
            for &(_, a, b) in g.iter() {
                s.absorb(&table.eval(a, b));
            }
            s
        })
        .collect();

    let mut total = WeilSummary::default();
    for s in exhaustive.into_iter().chain(sampled) {
        total.merge(s);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncompleteSum {
    pub value: Complex64,
    /// `F^{1/2} v^{1/4} (1 + F^{1/2} v^{−1/2}) (n, v)^{1/2}`.
    pub bound: f64,
    pub ratio: f64,
    /// Number of admissible `f`.
    pub terms: u64,
}

pub const MAX_INTERVAL: u64 = 1_000_000;

/// `μ²(f)` for `f` in `[lo, hi]` by a segmented sieve over `p²`.
fn squarefree_segment(lo: u64, hi: u64) -> Vec<bool> {
    let mut sf = vec![true; (hi - lo + 1) as usize];
    let root = (hi as f64).sqrt() as u64 + 1;
    let mut composite = vec![false; root as usize + 1];
    for p in 2..=root {
        if composite[p as usize] {
            continue;
        }
        for q in (p * p..=root).step_by(p as usize) {
            composite[q as usize] = true;
        }
        let p2 = p * p;
        if p2 > hi {
            break;
        }
        let mut m = lo.div_ceil(p2) * p2;
        while m <= hi {
            sf[(m - lo) as usize] = false;
            m += p2;
        }
    }
    sf
}

/// `Σ_{f ∈ [f_lo, f_hi], (f, v·e) = 1} [μ²(f)] · e(−n·\overline{ef}/v)`.
pub fn incomplete_kloosterman(
    f_lo: u64,
    f_hi: u64,
    e_val: i64,
    v: u64,
    n_val: i64,
    squarefree_weight: bool,
) -> Result<IncompleteSum> {
    if v == 0 {
        return invalid("modulus v must be at least 1");
    }
    if f_lo == 0 || f_hi < f_lo {
        return invalid(format!("interval [{f_lo}, {f_hi}] is empty or contains 0"));
    }
    let len = f_hi - f_lo + 1;
    if len > MAX_INTERVAL {
        return invalid(format!("interval length {len} exceeds {MAX_INTERVAL}"));
    }
    let e_abs = e_val.unsigned_abs();
    if gcd(residue(e_val, v), v) != 1 {
        return invalid(format!("multiplier {e_val} is not coprime to {v}"));
    }
    let sf = if squarefree_weight { Some(squarefree_segment(f_lo, f_hi)) } else { None };
    let ve = v as u128 * e_abs.max(1) as u128;
    let er = residue(e_val, v);
    let nr = residue(n_val, v) as u128;
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for f in f_lo..=f_hi {
        if gcd(f, (ve % f as u128) as u64) != 1 {
            continue;
        }
        if let Some(ref sf) = sf {
            if !sf[(f - f_lo) as usize] {
                continue;
            }
        }
        let ef = (er as u128 * (f % v) as u128 % v as u128) as i64;
        let inv = mod_inverse(ef, v).expect("coprime by construction") as u128;
        let k = (nr * inv) % v as u128;
        value += Complex64::from_polar(1.0, -2.0 * PI * k as f64 / v as f64);
        terms += 1;
    }
    let ff = len as f64;
    let vf = v as f64;
    let g = gcd(nr as u64, v) as f64;
    let bound = ff.sqrt() * vf.powf(0.25) * (1.0 + ff.sqrt() / vf.sqrt()) * g.sqrt();
    Ok(IncompleteSum { value, bound, ratio: value.norm() / bound, terms })
}
