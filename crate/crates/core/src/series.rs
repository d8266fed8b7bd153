//! Univariate truncated power series and truncated Laurent series.

use serde::{Deserialize, Serialize};

/// `Σ_{k≤order} c_k u^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn new(mut coeffs: Vec<f64>, order: usize) -> Self {
        coeffs.resize(order + 1, 0.0);
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: f64, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// `c + u`
    pub fn variable(c: f64, order: usize) -> Self {
        Self::new(vec![c, 1.0], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self::new((0..=n).map(|k| self.coeffs[k] + o.coeffs[k]).collect(), n)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        Self::new((0..=n).map(|k| self.coeffs[k] - o.coeffs[k]).collect(), n)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect(), self.order())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut c = vec![0.0; n + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Self::new(c, n)
    }

    /// `1/f`; requires `f(0) != 0`.
    pub fn recip(&self) -> Self {
        let n = self.order();
        let c0 = self.coeffs[0];
        assert!(c0 != 0.0, "reciprocal of a series with zero constant term");
        let mut g = vec![0.0; n + 1];
        g[0] = 1.0 / c0;
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| self.coeffs[j] * g[k - j]).sum();
            g[k] = -s / c0;
        }
        Self::new(g, n)
    }

    /// `exp(f)` by the recurrence `k E_k = Σ j f_j E_{k-j}`.
    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut e = vec![0.0; n + 1];
        e[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.coeffs[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Self::new(e, n)
    }

    /// `f(g(u))` where `g(0) = 0` (Horner in series arithmetic).
    pub fn compose(&self, g: &Self) -> Self {
        assert!(g.coeffs[0] == 0.0, "inner series must vanish at 0");
        let n = self.order().min(g.order());
        let g = g.truncate(n);
        let mut acc = Self::zero(n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Re-centre: coefficients of `f(h + u)`.
    pub fn shift(&self, h: f64) -> Self {
        let n = self.order();
        let mut out = vec![0.0; n + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let mut binom = 1.0;
            let mut hp = 1.0;
            // contribution of c u^j after substitution: c Σ_k C(j,k) h^{j-k} u^k
            let mut terms = vec![0.0; j + 1];
            for m in 0..=j {
                // m = j - k
                terms[j - m] = binom * hp;
                binom = binom * (j - m) as f64 / (m + 1) as f64;
                hp *= h;
            }
            for (k, t) in terms.into_iter().enumerate() {
                out[k] += c * t;
            }
        }
        Self::new(out, n)
    }
}

/// `Σ_{k=val}^{order} c_k u^k` with a possibly negative valuation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    val: i32,
    order: i32,
    coeffs: Vec<f64>,
}

impl LaurentSeries {
    pub fn new(val: i32, coeffs: Vec<f64>, order: i32) -> Self {
        let mut coeffs = coeffs;
        let len = (order - val + 1).max(0) as usize;
        coeffs.resize(len, 0.0);
        Self { val, order, coeffs }
    }

    pub fn from_series(s: &Series) -> Self {
        Self::new(0, s.coeffs().to_vec(), s.order() as i32)
    }

    pub fn valuation(&self) -> i32 {
        self.val
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Coefficient of `u^k`.
    pub fn coeff(&self, k: i32) -> f64 {
        if k < self.val || k > self.order {
            0.0
        } else {
            self.coeffs[(k - self.val) as usize]
        }
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(0)
    }

    pub fn principal_part_vanishes(&self, tol: f64) -> bool {
        (self.val..0).all(|k| self.coeff(k).abs() <= tol)
    }

    pub fn add(&self, o: &Self) -> Self {
        let val = self.val.min(o.val);
        let order = self.order.min(o.order);
        Self::new(val, (val..=order).map(|k| self.coeff(k) + o.coeff(k)).collect(), order)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let val = self.val + o.val;
        // the product is known up to min(order_a + val_b, order_b + val_a)
        let order = (self.order + o.val).min(o.order + self.val);
        let mut c = vec![0.0; (order - val + 1).max(0) as usize];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k < c.len() {
                    c[k] += a * b;
                }
            }
        }
        Self::new(val, c, order)
    }

    /// The non-negative part as an ordinary series, if there is no pole.
    pub fn to_series(&self) -> Option<Series> {
        if self.val < 0 && !self.principal_part_vanishes(0.0) {
            return None;
        }
        let order = self.order.max(0) as usize;
        Some(Series::new((0..=order as i32).map(|k| self.coeff(k)).collect(), order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    #[test]
    fn exp_series() {
        let e = Series::variable(0.0, 6).exp();
        for k in 0..=6 {
            assert!((e.coeff(k) - 1.0 / fact(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn recip_and_mul() {
        let f = Series::new(vec![2.0, 1.0, -0.5, 0.25], 8);
        let one = f.mul(&f.recip());
        assert!((one.coeff(0) - 1.0).abs() < 1e-15);
        for k in 1..=8 {
            assert!(one.coeff(k).abs() < 1e-14);
        }
    }

    #[test]
    fn shift_reproduces_values() {
        let f = Series::new(vec![1.0, -2.0, 0.5, 3.0], 3);
        let g = f.shift(0.3);
        for &u in &[0.0, 0.1, -0.4] {
            assert!((g.eval(u) - f.eval(0.3 + u)).abs() < 1e-14);
        }
    }

    #[test]
    fn compose_exp_of_log() {
        // exp(log(1+u)) = 1 + u
        let order = 10;
        let mut l = vec![0.0; order + 1];
        for k in 1..=order {
            l[k] = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
        }
        let log1p = Series::new(l, order);
        let exp = Series::variable(0.0, order).exp();
        let r = exp.compose(&log1p);
        assert!((r.coeff(0) - 1.0).abs() < 1e-15);
        assert!((r.coeff(1) - 1.0).abs() < 1e-15);
        for k in 2..=order {
            assert!(r.coeff(k).abs() < 1e-13, "k = {k}: {}", r.coeff(k));
        }
    }

    #[test]
    fn laurent_pole_cancels() {
        // (1/u + 1) * u = 1 + u
        let f = LaurentSeries::new(-1, vec![1.0, 1.0], 4);
        let u = LaurentSeries::new(1, vec![1.0], 6);
        let p = f.mul(&u);
        assert_eq!(p.valuation(), 0);
        assert_eq!(p.constant_term(), 1.0);
        assert_eq!(p.coeff(1), 1.0);
        assert_eq!(p.order(), 5);
        let s = f.add(&LaurentSeries::new(-1, vec![-1.0], 4));
        assert!(s.principal_part_vanishes(0.0));
        assert_eq!(s.to_series().unwrap().coeff(0), 1.0);
    }
}
