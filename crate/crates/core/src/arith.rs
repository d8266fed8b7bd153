//! Sieved arithmetic functions and Dirichlet convolution on finite tables.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Mobius,
    VonMangoldt,
    Convolution,
    Custom,
}

/// A real arithmetic function on `1..=limit`.
///
/// Storage has a dead slot at index 0 so that `table[n]` reads naturally.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithTable {
    kind: TableKind,
    values: Vec<f64>,
}

impl ArithTable {
    /// Build from values for `n = 1..=values.len()`.
    pub fn from_values(values: &[f64], kind: TableKind) -> Result<Self> {
        if values.is_empty() {
            return invalid("table limit must be at least 1");
        }
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(0.0);
        v.extend_from_slice(values);
        Ok(Self { kind, values: v })
    }

    /// Build by evaluating `f(n)` for `n = 1..=limit`.
    pub fn from_fn(limit: usize, kind: TableKind, f: impl Fn(usize) -> f64) -> Result<Self> {
        if limit == 0 {
            return invalid("table limit must be at least 1");
        }
        let values = std::iter::once(0.0).chain((1..=limit).map(f)).collect();
        Ok(Self { kind, values })
    }

    /// The all-ones table `1(n)`.
    pub fn ones(limit: usize) -> Result<Self> {
        Self::from_fn(limit, TableKind::Custom, |_| 1.0)
    }

    pub fn limit(&self) -> usize {
        self.values.len() - 1
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    /// Entries for `n = 1..=limit`.
    pub fn values(&self) -> &[f64] {
        &self.values[1..]
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }
}

impl std::ops::Index<usize> for ArithTable {
    type Output = f64;
    fn index(&self, n: usize) -> &f64 {
        &self.values[n]
    }
}

/// Smallest-prime-factor sieve; the source of every multiplicative function
/// used in the crate.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: usize) -> Result<Self> {
        if limit == 0 {
            return invalid("sieve limit must be at least 1");
        }
        if limit > u32::MAX as usize {
            return invalid("sieve limit exceeds 2^32");
        }
        let mut spf = vec![0u32; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip > limit {
                    break;
                }
                spf[ip] = p;
            }
        }
        Ok(Self { spf, primes })
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn smallest_prime_factor(&self, n: usize) -> usize {
        self.spf[n] as usize
    }

    /// Prime factorization as `(p, exponent)` pairs in increasing `p`.
    pub fn factorize(&self, mut n: usize) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    pub fn mobius(&self, n: usize) -> i8 {
        let mut n = n;
        let mut sign = 1i8;
        while n > 1 {
            let p = self.spf[n] as usize;
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        sign
    }

    pub fn is_squarefree(&self, n: usize) -> bool {
        self.mobius(n) != 0
    }

    /// `Λ(n)`, recomputed exactly as `ln p` from the sieved factor.
    pub fn von_mangoldt(&self, n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let p = self.spf[n] as usize;
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    }

    pub fn divisor_count(&self, n: usize) -> u64 {
        self.factorize(n)
            .iter()
            .map(|&(_, e)| e as u64 + 1)
            .product()
    }

    pub fn euler_phi(&self, n: usize) -> u64 {
        self.factorize(n)
            .iter()
            .fold(n as u64, |acc, &(p, _)| acc / p as u64 * (p as u64 - 1))
    }

    /// Squarefree divisors of `n` with their Möbius signs.
    pub fn squarefree_divisors(&self, n: usize) -> Vec<(usize, i8)> {
        let mut out = vec![(1usize, 1i8)];
        for (p, _) in self.factorize(n) {
            let len = out.len();
            for i in 0..len {
                let (d, s) = out[i];
                out.push((d * p, -s));
            }
        }
        out
    }

    /// All divisors of `n`, unsorted.
    pub fn divisors(&self, n: usize) -> Vec<usize> {
        let mut out = vec![1usize];
        for (p, e) in self.factorize(n) {
            let len = out.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Extended Euclid on signed integers: returns `(g, x, y)` with `ax + by = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m` in `0..m`, or `None` when `gcd(a, m) != 1`.
/// Modulus 1 maps everything to 0.
pub fn mod_inverse(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let m_i = m as i64;
    let (g, x, _) = ext_gcd(a.rem_euclid(m_i), m_i);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m_i) as u64)
}

pub fn sieve_mobius(limit: usize) -> Result<ArithTable> {
    let sieve = Sieve::new(limit)?;
    ArithTable::from_fn(limit, TableKind::Mobius, |n| sieve.mobius(n) as f64)
}

pub fn sieve_von_mangoldt(limit: usize) -> Result<ArithTable> {
    let sieve = Sieve::new(limit)?;
    ArithTable::from_fn(limit, TableKind::VonMangoldt, |n| sieve.von_mangoldt(n))
}

/// `(f * g)(n) = Σ_{d | n} f(d) g(n/d)`, iterating `d` then multiples of `d`.
pub fn dirichlet_convolve(f: &ArithTable, g: &ArithTable) -> Result<ArithTable> {
    if f.limit() != g.limit() {
        return invalid(format!(
            "convolution limits differ: {} vs {}",
            f.limit(),
            g.limit()
        ));
    }
    let limit = f.limit();
    let mut out = vec![0.0; limit + 1];
    for d in 1..=limit {
        let fd = f[d];
        if fd == 0.0 {
            continue;
        }
        for (k, m) in (d..=limit).step_by(d).enumerate() {
            out[m] += fd * g[k + 1];
        }
    }
    Ok(ArithTable {
        kind: TableKind::Convolution,
        values: out,
    })
}

/// `μ * Λ^{*k}`; `k = 0` returns the Möbius table itself.
pub fn mu_lambda_power(k: usize, limit: usize) -> Result<ArithTable> {
    let mut acc = sieve_mobius(limit)?;
    if k == 0 {
        return Ok(acc);
    }
    let lambda = sieve_von_mangoldt(limit)?;
    for _ in 0..k {
        acc = dirichlet_convolve(&acc, &lambda)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force divisor sum, used as an independent oracle.
    fn naive_convolve(f: &[f64], g: &[f64], n: usize) -> f64 {
        (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| f[d - 1] * g[n / d - 1])
            .sum()
    }

    #[test]
    fn mobius_examples() {
        let mu = sieve_mobius(40).unwrap();
        assert_eq!(mu[1], 1.0);
        assert_eq!(mu[4], 0.0);
        assert_eq!(mu[30], -1.0);
        assert!(mu.values().iter().all(|&v| v == -1.0 || v == 0.0 || v == 1.0));
        assert_eq!(mu.values().len(), 40);
    }

    #[test]
    fn von_mangoldt_examples() {
        let lam = sieve_von_mangoldt(20).unwrap();
        assert_eq!(lam[8], 2f64.ln());
        assert_eq!(lam[6], 0.0);
        assert_eq!(lam[7], 7f64.ln());
        assert_eq!(lam[1], 0.0);
    }

    #[test]
    fn zero_limit_rejected() {
        assert!(sieve_mobius(0).is_err());
        assert!(sieve_von_mangoldt(0).is_err());
    }

    #[test]
    fn mismatched_limits_rejected() {
        let a = sieve_mobius(10).unwrap();
        let b = sieve_mobius(11).unwrap();
        assert!(dirichlet_convolve(&a, &b).is_err());
    }

    #[test]
    fn mobius_inversion_identity() {
        let mu = sieve_mobius(200).unwrap();
        let one = ArithTable::ones(200).unwrap();
        let e = dirichlet_convolve(&mu, &one).unwrap();
        assert_eq!(e[1], 1.0);
        assert!(e.values()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mu_lambda_at_primes() {
        let t = mu_lambda_power(1, 100).unwrap();
        for p in [2usize, 3, 5, 7, 97] {
            assert!((t[p] - (p as f64).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn mu_lambda_squared_at_twelve_matches_enumeration() {
        // Oracle: sum μ(m)Λ(l1)Λ(l2) over all ordered factorizations m·l1·l2 = 12.
        let sieve = Sieve::new(12).unwrap();
        let mut oracle = 0.0;
        for m in 1..=12usize {
            for l1 in 1..=12usize {
                for l2 in 1..=12usize {
                    if m * l1 * l2 == 12 {
                        oracle +=
                            sieve.mobius(m) as f64 * sieve.von_mangoldt(l1) * sieve.von_mangoldt(l2);
                    }
                }
            }
        }
        let t = mu_lambda_power(2, 12).unwrap();
        assert!((t[12] - oracle).abs() < 1e-13, "{} vs {}", t[12], oracle);
        // 12 = 2^2 * 3: closed form 2 ln2 ln3 - ln^2 2 + ... check against the
        // explicit enumeration value rather than a hand formula.
        assert!(oracle.abs() > 0.1);
    }

    #[test]
    fn mu_lambda_power_zero_is_mobius() {
        assert_eq!(mu_lambda_power(0, 500).unwrap(), sieve_mobius(500).unwrap());
    }

    #[test]
    fn mu_lambda_squared_at_pq() {
        let t = mu_lambda_power(2, 1000).unwrap();
        for (p, q) in [(2usize, 3usize), (5, 7), (11, 13), (3, 31)] {
            let expect = 2.0 * (p as f64).ln() * (q as f64).ln();
            assert!((t[p * q] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_lambda_power_vanishes_at_one() {
        for k in 1..5 {
            assert_eq!(mu_lambda_power(k, 10).unwrap()[1], 0.0);
        }
    }

    #[test]
    fn chebyshev_identity() {
        let lam = sieve_von_mangoldt(10_000).unwrap();
        let one = ArithTable::ones(10_000).unwrap();
        let s = dirichlet_convolve(&lam, &one).unwrap();
        for n in 1..=10_000 {
            assert!((s[n] - (n as f64).ln()).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn multiplicative_helpers() {
        let s = Sieve::new(1000).unwrap();
        assert_eq!(s.divisor_count(360), 24);
        assert_eq!(s.euler_phi(36), 12);
        assert_eq!(s.euler_phi(1), 1);
        let mut d = s.divisors(12);
        d.sort();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(s.squarefree_divisors(12).len(), 4);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(mod_inverse(-1, 5), Some(4));
    }

    proptest! {
        #[test]
        fn convolution_matches_divisor_sum(
            f in prop::collection::vec(-3.0f64..3.0, 60),
            g in prop::collection::vec(-3.0f64..3.0, 60),
        ) {
            let ft = ArithTable::from_values(&f, TableKind::Custom).unwrap();
            let gt = ArithTable::from_values(&g, TableKind::Custom).unwrap();
            let h = dirichlet_convolve(&ft, &gt).unwrap();
            for n in 1..=60 {
                prop_assert!((h[n] - naive_convolve(&f, &g, n)).abs() < 1e-12);
            }
        }

        #[test]
        fn convolution_commutes_and_associates(
            f in prop::collection::vec(-2.0f64..2.0, 48),
            g in prop::collection::vec(-2.0f64..2.0, 48),
            k in prop::collection::vec(-2.0f64..2.0, 48),
        ) {
            let ft = ArithTable::from_values(&f, TableKind::Custom).unwrap();
            let gt = ArithTable::from_values(&g, TableKind::Custom).unwrap();
            let kt = ArithTable::from_values(&k, TableKind::Custom).unwrap();
            let fg = dirichlet_convolve(&ft, &gt).unwrap();
            let gf = dirichlet_convolve(&gt, &ft).unwrap();
            let left = dirichlet_convolve(&fg, &kt).unwrap();
            let gk = dirichlet_convolve(&gt, &kt).unwrap();
            let right = dirichlet_convolve(&ft, &gk).unwrap();
            for n in 1..=48 {
                prop_assert!((fg[n] - gf[n]).abs() < 1e-12);
                prop_assert!((left[n] - right[n]).abs() < 1e-10);
            }
        }

        #[test]
        fn mobius_inversion_round_trip(
            f in prop::collection::vec(-5.0f64..5.0, 1..2000usize),
        ) {
            let n = f.len();
            let ft = ArithTable::from_values(&f, TableKind::Custom).unwrap();
            let one = ArithTable::ones(n).unwrap();
            let mu = sieve_mobius(n).unwrap();
            let back = dirichlet_convolve(&dirichlet_convolve(&ft, &one).unwrap(), &mu).unwrap();
            for i in 1..=n {
                prop_assert!((back[i] - f[i - 1]).abs() < 1e-12);
            }
        }
    }
}
