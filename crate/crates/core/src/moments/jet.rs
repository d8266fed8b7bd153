//! Truncated bivariate Taylor series in `(δα, δβ)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::series::Series;

/// Taylor coefficients `c_ij` of `f(α₀ + δα, β₀ + δβ)` for `i + j ≤ order`.
///
/// `c_ij = ∂^i_α ∂^j_β f / (i! j!)`; [`BivariateJet::derivative`] undoes the
/// factorials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateJet {
    alpha0: f64,
    beta0: f64,
    order: usize,
    coeffs: Vec<f64>,
}

fn offset(order: usize, i: usize) -> usize {
    i * (order + 1) - i * (i.saturating_sub(1)) / 2
}

fn binomial_rows(n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for k in 1..=n {
        let prev = &rows[k - 1];
        let mut row = vec![1.0; k + 1];
        for j in 1..k {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

impl BivariateJet {
    pub fn zero(alpha0: f64, beta0: f64, order: usize) -> Self {
        let len = (order + 1) * (order + 2) / 2;
        Self { alpha0, beta0, order, coeffs: vec![0.0; len] }
    }

    /// Row-major coefficients: `c_00..c_0n, c_10..c_1(n−1), …`.
    pub(crate) fn from_raw(alpha0: f64, beta0: f64, order: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), (order + 1) * (order + 2) / 2);
        Self { alpha0, beta0, order, coeffs }
    }

    pub fn constant(c: f64, alpha0: f64, beta0: f64, order: usize) -> Self {
        let mut j = Self::zero(alpha0, beta0, order);
        j.coeffs[0] = c;
        j
    }

    pub fn base(&self) -> (f64, f64) {
        (self.alpha0, self.beta0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        offset(self.order, i) + j
    }

    /// `c_ij`, zero above the truncation order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            return 0.0;
        }
        self.coeffs[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i + j <= self.order, "({i}, {j}) above order {}", self.order);
        let k = self.idx(i, j);
        self.coeffs[k] = v;
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `∂^i_α ∂^j_β f` at the base point.
    pub fn derivative(&self, i: usize, j: usize) -> f64 {
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        self.coeff(i, j) * fact(i) * fact(j)
    }

    pub fn eval(&self, da: f64, db: f64) -> f64 {
        let mut total = 0.0;
        let mut pa = 1.0;
        for i in 0..=self.order {
            let mut pb = 1.0;
            for j in 0..=self.order - i {
                total += self.coeff(i, j) * pa * pb;
                pb *= db;
            }
            pa *= da;
        }
        total
    }

    fn same_base(&self, o: &Self) {
        assert!(
            self.alpha0 == o.alpha0 && self.beta0 == o.beta0,
            "jets expanded at different points"
        );
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut out = Self::zero(self.alpha0, self.beta0, order);
        for i in 0..=order {
            for j in 0..=order - i {
                out.set(i, j, self.coeff(i, j));
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_base(o);
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.alpha0, self.beta0, order);
        for i in 0..=order {
            for j in 0..=order - i {
                out.set(i, j, self.coeff(i, j) + o.coeff(i, j));
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_base(o);
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.alpha0, self.beta0, order);
        for i1 in 0..=order {
            for j1 in 0..=order - i1 {
                let a = self.coeff(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=order - i1 - j1 {
                    for j2 in 0..=order - i1 - j1 - i2 {
                        let k = out.idx(i1 + i2, j1 + j2);
                        out.coeffs[k] += a * o.coeff(i2, j2);
                    }
                }
            }
        }
        out
    }

    /// `exp(f)` by the series of the non-constant part.
    pub fn exp(&self) -> Self {
        let c0 = self.coeffs[0];
        let mut g = self.clone();
        g.coeffs[0] = 0.0;
        let mut total = Self::constant(1.0, self.alpha0, self.beta0, self.order);
        let mut power = total.clone();
        for k in 1..=self.order {
            power = power.mul(&g).scale(1.0 / k as f64);
            total = total.add(&power);
        }
        total.scale(c0.exp())
    }

    /// `a(δα)·b(δβ)`.
    pub fn outer(a: &Series, b: &Series, alpha0: f64, beta0: f64, order: usize) -> Self {
        let mut out = Self::zero(alpha0, beta0, order);
        out.add_outer(a.coeffs(), b.coeffs(), 1.0);
        out
    }

    /// `c_ij += w·a_i·b_j` for every `i + j ≤ order`.
    pub fn add_outer(&mut self, a: &[f64], b: &[f64], w: f64) {
        for (i, &ai) in a.iter().enumerate().take(self.order + 1) {
            if ai == 0.0 {
                continue;
            }
            let row = offset(self.order, i);
            let top = (self.order - i + 1).min(b.len());
            let wa = w * ai;
            for (c, &bj) in self.coeffs[row..row + top].iter_mut().zip(b) {
                *c += wa * bj;
            }
        }
    }

    /// `f(δα + δβ)` from the univariate series `f(u)`.
    pub fn from_sum(f: &Series, alpha0: f64, beta0: f64, order: usize) -> Self {
        let binom = binomial_rows(order);
        let mut out = Self::zero(alpha0, beta0, order);
        for k in 0..=order.min(f.order()) {
            let fk = f.coeff(k);
            for i in 0..=k {
                out.set(i, k - i, fk * binom[k][i]);
            }
        }
        out
    }

    /// `g(α, β) = f(−β, −α)`, expanded at `(−β₀, −α₀)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::zero(-self.beta0, -self.alpha0, self.order);
        for i in 0..=self.order {
            for j in 0..=self.order - i {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                out.set(i, j, sign * self.coeff(j, i));
            }
        }
        out
    }

    /// Exact quotient by `δα + δβ`, one order lower.
    ///
    /// Returns the quotient and the largest coefficient of the remainder,
    /// which vanishes exactly when `f` is divisible.
    pub fn divide_by_sum(&self) -> Result<(Self, f64)> {
        if self.order == 0 {
            return invalid("cannot divide an order-0 jet");
        }
        let n = self.order - 1;
        let mut q = Self::zero(self.alpha0, self.beta0, n);
        let mut residual = self.coeffs[0].abs();
        for k in 1..=self.order {
            // c_{k−j, j} = q_{k−j−1, j} + q_{k−j, j−1}
            let mut carry = 0.0;
            for j in 0..k {
                let v = self.coeff(k - j, j) - carry;
                q.set(k - j - 1, j, v);
                carry = v;
            }
            residual = residual.max((self.coeff(0, k) - carry).abs());
        }
        Ok((q, residual))
    }

    /// Re-expand at `(α₀ + hα, β₀ + hβ)`.
    pub fn translate(&self, ha: f64, hb: f64) -> Self {
        let n = self.order;
        let binom = binomial_rows(n);
        let powers = |h: f64| -> Vec<f64> {
            let mut p = vec![1.0; n + 1];
            for k in 1..=n {
                p[k] = p[k - 1] * h;
            }
            p
        };
        let (pa, pb) = (powers(ha), powers(hb));
        let mut out = Self::zero(self.alpha0 + ha, self.beta0 + hb, n);
        for i in 0..=n {
            for j in 0..=n - i {
                let mut acc = 0.0;
                for p in i..=n {
                    let wa = binom[p][i] * pa[p - i];
                    for q in j..=n - p {
                        acc += self.coeff(p, q) * wa * binom[q][j] * pb[q - j];
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `Σ x_i y_j c_ij` over the full grid.
    pub fn contract(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, &xi) in x.iter().enumerate().take(self.order + 1) {
            for (j, &yj) in y.iter().enumerate().take(self.order + 1 - i) {
                total += xi * yj * self.coeff(i, j);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn from_fn(order: usize, f: impl Fn(usize, usize) -> f64) -> BivariateJet {
        let mut j = BivariateJet::zero(0.1, -0.2, order);
        for a in 0..=order {
            for b in 0..=order - a {
                j.set(a, b, f(a, b));
            }
        }
        j
    }

    #[test]
    fn exp_of_linear_is_outer_product() {
        let order = 8;
        let mut lin = BivariateJet::zero(0.0, 0.0, order);
        lin.set(0, 0, 0.3);
        lin.set(1, 0, -1.5);
        lin.set(0, 1, 2.0);
        let e = lin.exp();
        let a = Series::new(vec![0.0, -1.5], order).exp();
        let b = Series::new(vec![0.0, 2.0], order).exp();
        let want = BivariateJet::outer(&a, &b, 0.0, 0.0, order).scale(0.3f64.exp());
        for i in 0..=order {
            for j in 0..=order - i {
                assert_relative_eq!(e.coeff(i, j), want.coeff(i, j), max_relative = 1e-12, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let q = from_fn(8, |a, b| 1.0 / (1.0 + a as f64 + 2.0 * b as f64));
        let mut sum = BivariateJet::zero(0.1, -0.2, 8);
        sum.set(1, 0, 1.0);
        sum.set(0, 1, 1.0);
        let f = sum.mul(&q);
        let (back, residual) = f.divide_by_sum().unwrap();
        assert!(residual < 1e-15);
        for a in 0..=7 {
            for b in 0..=7 - a {
                assert_relative_eq!(back.coeff(a, b), q.coeff(a, b), max_relative = 1e-13);
            }
        }
        let (_, residual) = from_fn(3, |_, _| 1.0).divide_by_sum().unwrap();
        assert!(residual > 0.5);
    }

    #[test]
    fn translation_of_a_polynomial_is_exact() {
        let f = from_fn(4, |a, b| (a + 2 * b) as f64 - 1.5);
        let g = f.translate(0.3, -0.7);
        for &(x, y) in &[(0.0, 0.0), (0.2, 0.1), (-0.4, 0.5)] {
            assert_relative_eq!(g.eval(x, y), f.eval(x + 0.3, y - 0.7), max_relative = 1e-13);
        }
        assert_eq!(g.base(), (0.1 + 0.3, -0.2 - 0.7));
    }

    #[test]
    fn reflection_and_sum_embedding() {
        let f = from_fn(5, |a, b| (1 + a * 3 + b) as f64);
        let g = f.reflect();
        assert_relative_eq!(g.eval(0.05, -0.02), f.eval(0.02, -0.05), max_relative = 1e-14);
        let s = Series::new(vec![1.0, 2.0, -3.0, 0.5], 5);
        let h = BivariateJet::from_sum(&s, 0.0, 0.0, 5);
        assert_relative_eq!(h.eval(0.1, 0.05), s.eval(0.15), max_relative = 1e-14);
        assert_eq!(h.derivative(1, 1), -6.0);
    }

    fn jet_strategy(order: usize) -> impl Strategy<Value = BivariateJet> {
        let len = (order + 1) * (order + 2) / 2;
        prop::collection::vec(-2.0..2.0f64, len).prop_map(move |coeffs| BivariateJet {
            alpha0: 0.0,
            beta0: 0.0,
            order,
            coeffs,
        })
    }

    proptest! {
        #[test]
        fn truncation_commutes_with_products(a in jet_strategy(6), b in jet_strategy(6), k in 0usize..=6) {
            let lhs = a.mul(&b).truncate(k);
            let rhs = a.truncate(k).mul(&b.truncate(k));
            for i in 0..=k {
                for j in 0..=k - i {
                    prop_assert!((lhs.coeff(i, j) - rhs.coeff(i, j)).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn products_commute(a in jet_strategy(5), b in jet_strategy(5)) {
            let (x, y) = (a.mul(&b), b.mul(&a));
            for (p, q) in x.coeffs.iter().zip(&y.coeffs) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }
    }
}
