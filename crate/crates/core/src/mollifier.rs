//! Mollifier coefficient tables.

use crate::arith::{mu_lambda_power, Sieve};
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Real polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitPolynomial {
    coeffs: Vec<f64>,
}

impl UnitPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0) + other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        Self::new(c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }
}

/// The polynomials and parameters of the two-piece κ computation.
pub mod presets {
    use super::UnitPolynomial;

    pub const R: f64 = 1.3025;
    pub const K: usize = 3;
    pub const THETA1: f64 = 4.0 / 7.0;
    pub const THETA2: f64 = 6.0 / 11.0;

    /// `P₁(x) = x + 0.327608 x(1−x) − 1.62086 x(1−x)² − 0.160377 x(1−x)³ + 1.29018 x(1−x)⁴`
    pub fn p1() -> UnitPolynomial {
        let x = UnitPolynomial::identity();
        let one_minus_x = UnitPolynomial::new(vec![1.0, -1.0]);
        [1.0, 0.327608, -1.62086, -0.160377, 1.29018]
            .iter()
            .enumerate()
            .fold(UnitPolynomial::constant(0.0), |acc, (j, &c)| {
                acc.add(&x.mul(&one_minus_x.pow(j as u32)).scale(c))
            })
    }

    /// `P₂(x) = 0.197567x + 2.40831x²`
    pub fn p2() -> UnitPolynomial {
        UnitPolynomial::new(vec![0.0, 0.197567, 2.40831])
    }

    /// `P₃(x) = 0.649142x + 1.042x²`
    pub fn p3() -> UnitPolynomial {
        UnitPolynomial::new(vec![0.0, 0.649142, 1.042])
    }

    /// `Q(x) = 0.491203 + 0.630413(1−2x) − 0.149615(1−2x)³ + 0.0279997(1−2x)⁵`
    pub fn q() -> UnitPolynomial {
        let y = UnitPolynomial::new(vec![1.0, -2.0]);
        UnitPolynomial::constant(0.491203)
            .add(&y.scale(0.630413))
            .add(&y.pow(3).scale(-0.149615))
            .add(&y.pow(5).scale(0.0279997))
    }
}

/// Mollifier length `⌊T^θ / log T⌋`: the `θ − ε` trimming.
pub fn trimmed_length(t: f64, theta: f64) -> usize {
    (t.powf(theta) / t.ln()).floor().max(1.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    Generic,
    Conrey,
    Feng,
    TwoPiece,
    Convolution,
}

impl CoeffKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoeffKind::Generic => "generic",
            CoeffKind::Conrey => "conrey",
            CoeffKind::Feng => "feng",
            CoeffKind::TwoPiece => "two_piece",
            CoeffKind::Convolution => "convolution",
        }
    }
}

/// Real coefficients `a_1..a_N` of a Dirichlet polynomial `Σ a_n n^{-s}`.
///
/// `sigma0_shift` records the exponent `σ₀ − 1/2` of the weight `n^{σ₀−1/2}`
/// already folded into the values (0 for unweighted tables).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    kind: CoeffKind,
    values: Vec<f64>,
    sigma0_shift: f64,
    growth_constant: f64,
}

impl CoefficientTable {
    pub fn new(kind: CoeffKind, values: Vec<f64>, sigma0_shift: f64) -> Result<Self> {
        if values.is_empty() {
            return invalid("coefficient table must have length at least 1");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("coefficient table contains a non-finite value");
        }
        let growth_constant = values
            .iter()
            .enumerate()
            .map(|(i, a)| a.abs() / ((i + 1) as f64).powf(0.1))
            .fold(0.0, f64::max);
        Ok(Self {
            kind,
            values,
            sigma0_shift,
            growth_constant,
        })
    }

    pub fn generic(values: Vec<f64>) -> Result<Self> {
        Self::new(CoeffKind::Generic, values, 0.0)
    }

    /// `δ_{n=1}`: the unmollified case `A ≡ 1`.
    pub fn delta_one() -> Self {
        Self::new(CoeffKind::Generic, vec![1.0], 0.0).unwrap()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> CoeffKind {
        self.kind
    }

    pub fn sigma0_shift(&self) -> f64 {
        self.sigma0_shift
    }

    /// `max_n |a_n| / n^{0.1}`, recorded at build time.
    pub fn growth_constant(&self) -> f64 {
        self.growth_constant
    }

    /// Values for `n = 1..=N` (index `n - 1`).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `a_n`, with `a_n = 0` past the end.
    pub fn get(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.values.get(n - 1).copied().unwrap_or(0.0)
    }

    /// Coefficients of `A(s + σ₀ − 1/2)`, i.e. the weight `n^{σ₀−1/2}` removed.
    /// This is the polynomial that multiplies `ζ(1/2 + it)` when the weighted
    /// mollifier is evaluated at `σ₀ + it`.
    pub fn on_half_line(&self) -> Self {
        if self.sigma0_shift == 0.0 {
            return self.clone();
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, a)| a * ((i + 1) as f64).powf(-self.sigma0_shift))
            .collect();
        Self::new(self.kind, values, 0.0).unwrap()
    }

    /// Parse a two-column `n a_n` listing. Blank lines and `#` comments are
    /// skipped; missing indices are zero.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
            let (Some(n), Some(a), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "expected two columns".into(),
                });
            };
            let n: usize = n.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad index {n:?}"),
            })?;
            let a: f64 = a.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("bad value {a:?}"),
            })?;
            if n == 0 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: "index must be at least 1".into(),
                });
            }
            pairs.push((n, a));
        }
        let len = pairs.iter().map(|p| p.0).max().unwrap_or(0);
        if len == 0 {
            return invalid("coefficient file has no entries");
        }
        let mut values = vec![0.0; len];
        for (n, a) in pairs {
            values[n - 1] = a;
        }
        Self::generic(values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(e.to_string()))?;
        Self::parse(&text)
    }

    /// Two-column dump readable by [`CoefficientTable::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.values.iter().enumerate() {
            writeln!(out, "{} {:e}", i + 1, a).unwrap();
        }
        out
    }
}

fn log_ratio(n: usize, len: usize) -> f64 {
    if len == 1 {
        return 1.0;
    }
    let ln_len = (len as f64).ln();
    (ln_len - (n as f64).ln()) / ln_len
}

/// Conrey coefficients `a_n = μ(n) n^{shift} P(log(N/n)/log N)`.
pub fn conrey_coeffs(len: usize, p: &UnitPolynomial, sigma0_shift: f64) -> Result<CoefficientTable> {
    if len == 0 {
        return invalid("mollifier length must be at least 1");
    }
    let sieve = Sieve::new(len)?;
    let values = (1..=len)
        .map(|n| {
            let mu = sieve.mobius(n);
            if mu == 0 {
                0.0
            } else {
                mu as f64 * (n as f64).powf(sigma0_shift) * p.eval(log_ratio(n, len))
            }
        })
        .collect();
    CoefficientTable::new(CoeffKind::Conrey, values, sigma0_shift)
}

/// Feng coefficients
/// `a_n = n^{shift} Σ_{2≤k≤K} μ²(n)(μ∗Λ^{∗k})(n) P_k(log(N/n)/log N) / ℓ^k`
/// where `ℓ = log_scale` (normally `log T`). `polys[i]` is `P_{i+2}`.
pub fn feng_coeffs(
    len: usize,
    polys: &[UnitPolynomial],
    k_max: usize,
    sigma0_shift: f64,
    log_scale: f64,
) -> Result<CoefficientTable> {
    if len == 0 {
        return invalid("mollifier length must be at least 1");
    }
    if k_max < 2 {
        return invalid(format!("Feng mollifier needs K >= 2, got {k_max}"));
    }
    if polys.len() != k_max - 1 {
        return invalid(format!(
            "expected {} polynomials P_2..P_K, got {}",
            k_max - 1,
            polys.len()
        ));
    }
    if !(log_scale > 0.0) {
        return invalid("log scale must be positive");
    }
    let sieve = Sieve::new(len)?;
    let mut values = vec![0.0; len];
    for (idx, k) in (2..=k_max).enumerate() {
        let table = mu_lambda_power(k, len)?;
        let norm = log_scale.powi(k as i32);
        for n in 1..=len {
            if !sieve.is_squarefree(n) || table[n] == 0.0 {
                continue;
            }
            values[n - 1] += table[n] * polys[idx].eval(log_ratio(n, len)) / norm;
        }
    }
    if sigma0_shift != 0.0 {
        for (i, v) in values.iter_mut().enumerate() {
            *v *= ((i + 1) as f64).powf(sigma0_shift);
        }
    }
    CoefficientTable::new(CoeffKind::Feng, values, sigma0_shift)
}

/// `ψ₁ + ψ₂`: entrywise sum, padded to the longer length.
pub fn two_piece_coeffs(c1: &CoefficientTable, c2: &CoefficientTable) -> Result<CoefficientTable> {
    if c1.sigma0_shift != c2.sigma0_shift {
        return invalid("two-piece mollifier needs both pieces at the same σ₀");
    }
    let len = c1.len().max(c2.len());
    let values = (1..=len).map(|n| c1.get(n) + c2.get(n)).collect();
    CoefficientTable::new(CoeffKind::TwoPiece, values, c1.sigma0_shift)
}

/// Conrey piece with `P₁` on `⌊T^{θ₁}/log T⌋` plus Feng piece with `P₂, P₃`
/// on `⌊T^{θ₂}/log T⌋`, weighted by `n^{shift}`.
pub fn preset_two_piece(t: f64, theta1: f64, theta2: f64, sigma0_shift: f64) -> Result<CoefficientTable> {
    if !(t > 1.0 && t.is_finite()) {
        return invalid(format!("T = {t} must exceed 1"));
    }
    let conrey = conrey_coeffs(trimmed_length(t, theta1), &presets::p1(), sigma0_shift)?;
    let feng = feng_coeffs(
        trimmed_length(t, theta2),
        &[presets::p2(), presets::p3()],
        presets::K,
        sigma0_shift,
        t.ln(),
    )?;
    two_piece_coeffs(&conrey, &feng)
}

/// Upper limit on convolution lengths.
pub const MAX_CONVOLUTION_LEN: usize = 1 << 28;

/// `𝔞_d = Σ_{nk=d} a_n b_k` on `d ≤ N·K`.
pub fn convolve_coeffs(a: &CoefficientTable, b: &CoefficientTable) -> Result<CoefficientTable> {
    let len = match a.len().checked_mul(b.len()) {
        Some(l) if l <= MAX_CONVOLUTION_LEN => l,
        _ => return invalid("convolution length overflows"),
    };
    let shift = if a.len() == 1 {
        b.sigma0_shift
    } else if b.len() == 1 || a.sigma0_shift == b.sigma0_shift {
        a.sigma0_shift
    } else {
        return invalid("convolved tables carry different σ₀ weights");
    };
    let mut values = vec![0.0; len];
    for (i, &an) in a.values.iter().enumerate() {
        if an == 0.0 {
            continue;
        }
        let n = i + 1;
        for (j, &bk) in b.values.iter().enumerate() {
            values[n * (j + 1) - 1] += an * bk;
        }
    }
    CoefficientTable::new(CoeffKind::Convolution, values, shift)
}
