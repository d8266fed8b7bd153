//! The Riemann zeta function near the critical strip and its Laurent jet at 1.
//!
//! Below `T_SWITCH` (and everywhere off the critical line) `ζ(s)` is computed
//! by Euler–Maclaurin summation with an adaptive number of Bernoulli
//! corrections. On the line `Re s = 1/2` above `T_SWITCH` the Riemann–Siegel
//! formula with corrections `C_0..C_4` is used.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::gamma::{ln_gamma, ln_sin};
use crate::error::{invalid, Error, Result};
use crate::series::{LaurentSeries, Series};
use crate::sum::ComplexSum;

pub const T_SWITCH: f64 = 1.0e4;
pub const MAX_HEIGHT: f64 = 1.0e7;

/// `B_{2k} / (2k)!` for k = 1..=30.
const BERNOULLI_RATIO: [f64; 30] = [
    0.083333333333333333333,
    -0.0013888888888888888889,
    0.000033068783068783068783,
    -8.2671957671957671958e-7,
    2.0876756987868098979e-8,
    -5.2841901386874931848e-10,
    1.3382536530684678833e-11,
    -3.3896802963225828668e-13,
    8.5860620562778445641e-15,
    -2.174868698558061873e-16,
    5.5090028283602295152e-18,
    -1.3954464685812523341e-19,
    3.5347070396294674717e-21,
    -8.9535174270375468504e-23,
    2.2679524523376830603e-24,
    -5.7447906688722024453e-26,
    1.4551724756148649019e-27,
    -3.6859949406653101782e-29,
    9.336734257095044672e-31,
    -2.3650224157006299346e-32,
    5.9906717624821343047e-34,
    -1.5174548844682902617e-35,
    3.8437581254541882322e-37,
    -9.7363530726466910353e-39,
    2.4662470442006809571e-40,
    -6.2470767418207436931e-42,
    1.5824030244644914298e-43,
    -4.0082736859489359685e-45,
    1.0153075855569556312e-46,
    -2.5718041582418717499e-48,
];

const MIN_BERNOULLI_TERMS: usize = 6;

/// Stieltjes constants `γ_0..γ_48`.
pub const STIELTJES: [f64; 49] = [
    0.577215664901532860606512090082,
    -0.0728158454836767248605863758749,
    -0.00969036319287231848453038603521,
    0.00205383442030334586616004654275,
    0.00232537006546730005746817017753,
    0.000793323817301062701753334877444,
    -0.000238769345430199609872421841908,
    -0.000527289567057751046074097505479,
    -0.000352123353803039509602052165001,
    -0.0000343947744180880481779146237982,
    0.000205332814909064794683722289237,
    0.000270184439543903526672902082068,
    0.000167272912105140193353501543341,
    -0.0000274638066037601588600076036934,
    -0.000209209262059299945837139697345,
    -0.000283468655320241446642934474997,
    -0.000199696858308969774707784563203,
    0.0000262770371099183366994665976305,
    0.000307368408149252826592754751949,
    0.000503605453047355629055596437717,
    0.000466343561511559449400594824434,
    0.000104437769756000115810795674368,
    -0.000541599582203997701655196173174,
    -0.00124396209040824577929974159954,
    -0.00158851127890356156190619661152,
    -0.00107459195273848882472429198735,
    0.000656803518637154431504773003356,
    0.00347783691361853820900735957426,
    0.00640006853170062945810722822195,
    0.00737115177047223913441240242356,
    0.00355772885557316094791353774891,
    -0.00751332599781522893313516008158,
    -0.0257037291084204017934878837803,
    -0.0451067341080802199049828496996,
    -0.051126928021508464425075820038,
    -0.0203730436038613127057518973025,
    0.0724821588168113337338004442204,
    0.236026382274301502720981762199,
    0.428963446384809152736861546539,
    0.517921842692923718978893057516,
    0.24872155939461546508449191044,
    -0.71957484690130035068887391122,
    -2.63879492733573453578828167565,
    -5.26493031235502382881103285958,
    -7.18874588950352728234209482458,
    -5.0723445899163724922989404048,
    6.60991560909696581383997510659,
    34.0397749821587482476611521122,
    78.6824797632425849560384842094,
];

pub const EULER_GAMMA: f64 = STIELTJES[0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZetaMethod {
    EulerMaclaurin,
    RiemannSiegel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: Complex64,
    /// Size of the first neglected correction.
    pub error_estimate: f64,
    pub degraded: bool,
    pub method: ZetaMethod,
}

/// `ζ(s)`, discarding the diagnostics.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    zeta_eval(s).map(|z| z.value)
}

pub fn zeta_real(x: f64) -> Result<f64> {
    zeta(Complex64::new(x, 0.0)).map(|z| z.re)
}

pub fn zeta_eval(s: Complex64) -> Result<ZetaValue> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return invalid(format!("non-finite argument {s}"));
    }
    if s.im.abs() > MAX_HEIGHT {
        return invalid(format!("|Im s| = {} exceeds {MAX_HEIGHT}", s.im.abs()));
    }
    if s.re == 0.5 && s.im.abs() > T_SWITCH {
        let z = riemann_siegel(s.im.abs());
        let value = if s.im < 0.0 { z.value.conj() } else { z.value };
        return Ok(ZetaValue { value, ..z });
    }
    Ok(euler_maclaurin(s, None))
}

/// Euler–Maclaurin with an optional fixed number of Bernoulli terms.
pub fn euler_maclaurin(s: Complex64, bernoulli_terms: Option<usize>) -> ZetaValue {
    let n = (s.norm() / PI).ceil() as usize + 20;
    let nf = n as f64;
    let ln_n = nf.ln();

    let mut head = ComplexSum::new();
    for k in 1..n {
        head.add((-s * (k as f64).ln()).exp());
    }
    let n_pow = (-s * ln_n).exp();
    let one = Complex64::new(1.0, 0.0);
    head.add(n_pow * nf / (s - one));
    head.add(n_pow * 0.5);

    // term_k = B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}
    let mut poch = s;
    let mut pw = n_pow / nf;
    let inv_n2 = 1.0 / (nf * nf);
    let max_terms = bernoulli_terms.unwrap_or(BERNOULLI_RATIO.len()).min(BERNOULLI_RATIO.len());
    let mut last = f64::INFINITY;
    let mut used = 0;
    for (k, &b) in BERNOULLI_RATIO.iter().enumerate().take(max_terms) {
        let term = poch * pw * b;
        head.add(term);
        last = term.norm();
        used = k + 1;
        let j = 2.0 * (k + 1) as f64;
        poch *= (s + (j - 1.0)) * (s + j);
        pw *= inv_n2;
        if bernoulli_terms.is_none() && used >= MIN_BERNOULLI_TERMS {
            let next = (poch * pw * BERNOULLI_RATIO.get(k + 1).copied().unwrap_or(0.0)).norm();
            if next <= 1e-17 * head.value().norm().max(1e-300) {
                last = next;
                break;
            }
        }
    }
    let value = head.value();
    let error_estimate = if used == 0 { f64::INFINITY } else { last };
    ZetaValue {
        value,
        error_estimate,
        degraded: error_estimate > 1e-8 * value.norm().max(1e-4),
        method: ZetaMethod::EulerMaclaurin,
    }
}

/// Riemann–Siegel theta function, asymptotic form (`t` ≥ 10).
pub fn rs_theta(t: f64) -> f64 {
    let t2 = t * t;
    let inv = 1.0 / t;
    let inv3 = inv / t2;
    let inv5 = inv3 / t2;
    let inv7 = inv5 / t2;
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + inv / 48.0
        + 7.0 * inv3 / 5760.0
        + 31.0 * inv5 / 80640.0
        + 127.0 * inv7 / 430080.0
}

fn psi(z: Complex64) -> Complex64 {
    let two_pi = 2.0 * PI;
    ((z * z - z - 1.0 / 16.0) * two_pi).cos() / (z * two_pi).cos()
}

const PSI_RADIUS: f64 = 0.5;
const PSI_NODES: usize = 64;

/// `Ψ^{(k)}(p)` for k = 0..=12, by the trapezoid rule on a Cauchy circle.
fn psi_derivatives(p: f64) -> [f64; 13] {
    let mut acc = [Complex64::new(0.0, 0.0); 13];
    for j in 0..PSI_NODES {
        let phi = 2.0 * PI * (j as f64 + 0.5) / PSI_NODES as f64;
        let e = Complex64::from_polar(1.0, phi);
        let f = psi(Complex64::new(p, 0.0) + e * PSI_RADIUS);
        let mut rot = Complex64::new(1.0, 0.0);
        let e_inv = e.conj();
        for a in acc.iter_mut() {
            *a += f * rot;
            rot *= e_inv;
        }
    }
    let mut out = [0.0; 13];
    let mut fact = 1.0;
    let mut rk = 1.0;
    for (k, a) in acc.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
            rk *= PSI_RADIUS;
        }
        out[k] = a.re * fact / (rk * PSI_NODES as f64);
    }
    out
}

/// Hardy's `Z(t)` by Riemann–Siegel, with the first five correction terms.
pub fn hardy_z(t: f64) -> (f64, f64) {
    let tau = (t / (2.0 * PI)).sqrt();
    let n = tau.floor() as usize;
    let p = tau - n as f64;
    let theta = rs_theta(t);

    let mut main = crate::sum::CompensatedSum::new();
    for k in 1..=n {
        let kf = k as f64;
        main.add((theta - t * kf.ln()).cos() / kf.sqrt());
    }

    let d = psi_derivatives(p);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let c = [
        d[0],
        -d[3] / (96.0 * pi2),
        d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4),
        -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5308416.0 * pi6),
        d[0] / (128.0 * pi2) + d[4] / (2048.0 * pi4) + d[8] / (2359296.0 * pi6) + d[12] / (2038431744.0 * pi8),
    ];
    let inv_tau = 1.0 / tau;
    let mut corr = 0.0;
    let mut pw = 1.0;
    for ck in c {
        corr += ck * pw;
        pw *= inv_tau;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let remainder = sign * corr / tau.sqrt();
    // size of the first omitted term, of order τ^{-11/2}
    let err = pw / tau.sqrt() * 0.01;
    (2.0 * main.value() + remainder, err)
}

fn riemann_siegel(t: f64) -> ZetaValue {
    let (z, err) = hardy_z(t);
    let theta = rs_theta(t);
    let value = Complex64::from_polar(z, -theta);
    ZetaValue {
        value,
        error_estimate: err,
        degraded: err > 1e-4 * z.abs().max(1e-4),
        method: ZetaMethod::RiemannSiegel,
    }
}

/// `χ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s)`, so that `ζ(s) = χ(s) ζ(1−s)`.
pub fn chi(s: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let ln = s * 2f64.ln() + (s - one) * PI.ln() + ln_sin(s * (PI / 2.0)) + ln_gamma(one - s);
    ln.exp()
}

/// Taylor coefficients at `y0` of `R(y) = ζ(1+y) − 1/y = Σ (−1)^k γ_k y^k / k!`.
pub(crate) fn regular_part_taylor(y0: f64, order: usize) -> Vec<f64> {
    let kmax = STIELTJES.len() - 1;
    // r_k = (−1)^k γ_k / k!
    let mut r = Vec::with_capacity(kmax + 1);
    let mut fact = 1.0;
    for (k, g) in STIELTJES.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        r.push(sign * g / fact);
    }
    if y0 == 0.0 {
        return r[..=order].to_vec();
    }
    Series::new(r, kmax).shift(y0).coeffs()[..=order].to_vec()
}

/// Largest `|s|` at which the stored Stieltjes expansion is used.
pub const LAURENT_RADIUS: f64 = 4.0;

/// Largest usable jet order.
pub const MAX_LAURENT_ORDER: usize = STIELTJES.len() - 1;

/// Compose `ζ(1+s)` with the series `s = x(u)`, keeping the pole symbolically.
///
/// When `x(0) ≠ 0` the result is an ordinary series (valuation 0); when
/// `x(0) = 0` and `x'(0) ≠ 0` it has a simple pole at `u = 0`.
pub fn zeta_laurent_jet(s_offset: &Series, order: usize) -> Result<LaurentSeries> {
    if order > MAX_LAURENT_ORDER {
        return invalid(format!("order {order} exceeds the {} stored Stieltjes constants", STIELTJES.len()));
    }
    let x0 = s_offset.coeff(0);
    if x0.abs() > LAURENT_RADIUS {
        return invalid(format!("expansion point |s| = {} is outside the Laurent disc", x0.abs()));
    }
    let mut w = s_offset.truncate(order);
    w = Series::new(
        std::iter::once(0.0).chain(w.coeffs()[1..].iter().copied()).collect(),
        order,
    );
    if x0 != 0.0 {
        let mut f = regular_part_taylor(x0, order);
        let mut pw = 1.0 / x0;
        for (j, fj) in f.iter_mut().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *fj += sign * pw;
            pw /= x0;
        }
        let jet = Series::new(f, order).compose(&w);
        return Ok(LaurentSeries::from_series(&jet));
    }
    let x1 = s_offset.coeff(1);
    if x1 == 0.0 {
        return invalid("offset series has zero constant and zero linear part");
    }
    // 1/x(u) = u^{-1} / (x_1 + x_2 u + …)
    let avail = s_offset.order();
    let top = order.min(avail.saturating_sub(1));
    let quotient = Series::new(s_offset.coeffs()[1..].to_vec(), top + 1).recip();
    let pole = LaurentSeries::new(-1, quotient.coeffs().to_vec(), top as i32);
    let reg = Series::new(regular_part_taylor(0.0, order), order).compose(&w);
    Ok(pole.add(&LaurentSeries::from_series(&reg)))
}
