//! Heath-Brown's identities for `μ` and `Λ` with `K = 2`, evaluated by
//! direct summation over factorizations.

use crate::arith::Sieve;
use crate::error::{invalid, Result};

/// Right-hand sides of both identities for all `n ≤ 2U`.
#[derive(Debug, Clone)]
pub struct HeathBrown {
    u: u64,
    z: usize,
    sieve: Sieve,
}

impl HeathBrown {
    pub fn new(u: u64) -> Result<Self> {
        if u == 0 {
            return invalid("U must be at least 1");
        }
        let limit = 2 * u as usize;
        let z = (limit as f64).sqrt().floor() as usize;
        // guard against rounding in the square root
        let z = (z.saturating_sub(1)..=z + 1).filter(|m| m * m <= limit).max().unwrap_or(1);
        Ok(Self { u, z, sieve: Sieve::new(limit)? })
    }

    /// The cut-off `(2U)^{1/2}` on the `m` variables.
    pub fn cutoff(&self) -> usize {
        self.z
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > 2 * self.u {
            return invalid(format!("identity holds only for 1 <= n <= 2U = {}", 2 * self.u));
        }
        Ok(n as usize)
    }

    fn small_divisors(&self, n: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.sieve
            .divisors(n)
            .into_iter()
            .filter(move |&m| m <= self.z)
            .filter_map(|m| match self.sieve.mobius(m) {
                0 => None,
                mu => Some((m, mu as f64)),
            })
    }

    /// `2μ(n)[n ≤ z] − Σ_{m₁m₂n₁ = n, m_i ≤ z} μ(m₁)μ(m₂)`.
    pub fn mu(&self, n: u64) -> Result<f64> {
        let n = self.check(n)?;
        let mut first = 0.0;
        if n <= self.z {
            first = 2.0 * self.sieve.mobius(n) as f64;
        }
        let mut second = 0.0;
        for (m1, mu1) in self.small_divisors(n) {
            for (_, mu2) in self.small_divisors(n / m1) {
                second += mu1 * mu2;
            }
        }
        Ok(first - second)
    }

    /// `2Σ_{m₁n₁ = n, m₁ ≤ z} μ(m₁) log n₁ − Σ_{m₁m₂n₁n₂ = n, m_i ≤ z} μ(m₁)μ(m₂) log n₂`.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        let n = self.check(n)?;
        let mut first = 0.0;
        for (m1, mu1) in self.small_divisors(n) {
            first += mu1 * ((n / m1) as f64).ln();
        }
        let mut second = 0.0;
        for (m1, mu1) in self.small_divisors(n) {
            for (m2, mu2) in self.small_divisors(n / m1) {
                let rest = n / (m1 * m2);
                let logs: f64 = self.sieve.divisors(rest).into_iter().map(|n2| (n2 as f64).ln()).sum();
                second += mu1 * mu2 * logs;
            }
        }
        Ok(2.0 * first - second)
    }
}

pub fn heath_brown_mu(n: u64, u: u64) -> Result<f64> {
    HeathBrown::new(u)?.mu(n)
}

pub fn heath_brown_lambda(n: u64, u: u64) -> Result<f64> {
    HeathBrown::new(u)?.lambda(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_up_to_two_u() {
        let u = 120;
        let hb = HeathBrown::new(u).unwrap();
        let sieve = Sieve::new(2 * u as usize).unwrap();
        for n in 1..=2 * u {
            assert_eq!(hb.mu(n).unwrap(), sieve.mobius(n as usize) as f64, "n = {n}");
            assert!((hb.lambda(n).unwrap() - sieve.von_mangoldt(n as usize)).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn primes_and_range() {
        assert!((heath_brown_lambda(997, 500).unwrap() - 997f64.ln()).abs() < 1e-9);
        assert!(heath_brown_mu(1001, 500).is_err());
        assert!(heath_brown_mu(0, 500).is_err());
        assert_eq!(HeathBrown::new(500).unwrap().cutoff(), 31);
    }

    #[test]
    fn fails_beyond_the_range() {
        // z = 2 puts n = 9 outside z²
        let hb = HeathBrown { u: 100, z: 2, sieve: Sieve::new(200).unwrap() };
        assert_ne!(hb.mu(9).unwrap(), 0.0);
    }
}
