use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pointwise,
    Jet,
    Limit,
    Naive,
    Quadrature,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pointwise => "pointwise",
            Method::Jet => "jet",
            Method::Limit => "limit",
            Method::Naive => "naive",
            Method::Quadrature => "quadrature",
        }
    }
}

/// One evaluation of the twisted second moment.
///
/// For the closed-form methods `value = zeta_plus + zeta_minus + pole_term`:
/// the two zeta pieces carry the regular parts of `ζ(1+s)` and `ζ(1−s)` (the
/// whole factors when no pole is split off) and `pole_term` the cancelled
/// `±1/s` parts. Quadrature reports leave the pieces at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub method: Method,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Lengths of the left and right coefficient tables.
    pub n: usize,
    pub k: usize,
    pub value: f64,
    pub zeta_plus: f64,
    pub zeta_minus: f64,
    pub pole_term: f64,
    /// `∫Φ(t/T) dt`.
    pub t_integral: f64,
    /// Imaginary part left over by quadrature.
    pub imaginary: f64,
    pub pair_count: u64,
    /// Running compensation of the outermost pair sum, in value units.
    pub residual: f64,
    pub error_estimate: f64,
    pub panel_count: usize,
    pub degraded: bool,
}

impl MomentReport {
    pub(crate) fn new(method: Method, t: f64, alpha: f64, beta: f64, n: usize, k: usize) -> Self {
        Self {
            method,
            t,
            alpha,
            beta,
            n,
            k,
            value: 0.0,
            zeta_plus: 0.0,
            zeta_minus: 0.0,
            pole_term: 0.0,
            t_integral: 0.0,
            imaginary: 0.0,
            pair_count: 0,
            residual: 0.0,
            error_estimate: 0.0,
            panel_count: 0,
            degraded: false,
        }
    }

    pub fn pieces_sum(&self) -> f64 {
        self.zeta_plus + self.zeta_minus + self.pole_term
    }

    pub fn pieces_consistent(&self, rel_tol: f64) -> bool {
        if self.method == Method::Quadrature {
            return true;
        }
        let scale = self.value.abs().max(self.zeta_plus.abs()).max(self.zeta_minus.abs()).max(f64::MIN_POSITIVE);
        (self.value - self.pieces_sum()).abs() <= rel_tol * scale
    }

    pub fn relative_deviation(&self, other: &MomentReport) -> f64 {
        (self.value - other.value).abs() / other.value.abs()
    }

    /// Flat `key=value` lines; floats use the shortest round-trip form.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        put("method", self.method.as_str().to_string());
        put("T", format!("{:?}", self.t));
        put("alpha", format!("{:?}", self.alpha));
        put("beta", format!("{:?}", self.beta));
        put("N", self.n.to_string());
        put("K", self.k.to_string());
        put("value", format!("{:?}", self.value));
        put("zeta_plus", format!("{:?}", self.zeta_plus));
        put("zeta_minus", format!("{:?}", self.zeta_minus));
        put("pole_term", format!("{:?}", self.pole_term));
        put("t_integral", format!("{:?}", self.t_integral));
        put("imaginary", format!("{:?}", self.imaginary));
        put("pair_count", self.pair_count.to_string());
        put("residual", format!("{:?}", self.residual));
        put("error_estimate", format!("{:?}", self.error_estimate));
        put("panel_count", self.panel_count.to_string());
        put("degraded", self.degraded.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_round_trips_floats() {
        let mut r = MomentReport::new(Method::Jet, 1e4, 0.1, -0.2, 7, 3);
        r.value = 0.1 + 0.2;
        r.zeta_plus = 0.1;
        r.zeta_minus = 0.2;
        let text = r.to_key_value();
        let line = text.lines().find(|l| l.starts_with("value=")).unwrap();
        assert_eq!(line["value=".len()..].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert!(text.contains("method=jet\n"));
        assert!(r.pieces_consistent(1e-15));
        r.pole_term = 1.0;
        assert!(!r.pieces_consistent(1e-10));
    }
}
