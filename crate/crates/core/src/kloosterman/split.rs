//! Type I / Type II classification of a tuple of dyadic scales.
//!
//! With `C = 2^{4s+3}`, a tuple `X_1..X_{4s+3}` is Type I when some
//! `X_i ≥ U/(C·W)`; otherwise a subset `S` with `W/C ≤ ∏_S X_i ≤ C·U/W` is
//! produced, either a single index or the shortest qualifying prefix.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    TypeI,
    TypeII,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSplit {
    pub decision: SplitKind,
    /// Zero-based indices into the input tuple.
    pub subset: Vec<usize>,
    pub product: f64,
    /// `2^{4s+3}`.
    pub slack: f64,
    pub lower: f64,
    pub upper: f64,
}

impl RangeSplit {
    /// Whether the recorded witness satisfies the postcondition.
    pub fn holds(&self) -> bool {
        match self.decision {
            SplitKind::TypeI => self.product >= self.lower,
            SplitKind::TypeII => self.lower <= self.product && self.product <= self.upper,
        }
    }
}

pub fn type_split(ranges: &[f64], u: f64, w: f64) -> Result<RangeSplit> {
    let len = ranges.len();
    if len < 3 || (len - 3) % 4 != 0 {
        return invalid(format!("expected 4s+3 ranges, got {len}"));
    }
    let s = (len - 3) / 4;
    let c = 2f64.powi((4 * s + 3) as i32);
    if !(u >= 1.0 && u.is_finite()) {
        return invalid(format!("U = {u} must be at least 1"));
    }
    if !(w >= 1.0 && w <= c * u.cbrt()) {
        return invalid(format!("W = {w} must lie in [1, 2^(4s+3) U^(1/3)]"));
    }
    if ranges.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
        return invalid("every range must be at least 1");
    }
    let product: f64 = ranges.iter().product();
    if product < u / c || product > 2.0 * u {
        return invalid(format!("product {product} outside [U/2^(4s+3), 2U]"));
    }
    let root = (2.0 * u).sqrt();
    if let Some(i) = ranges[..2 * s + 2].iter().position(|&x| x > root) {
        return invalid(format!("range {i} exceeds (2U)^(1/2)"));
    }

    let type_one = u / (c * w);
    if let Some(i) = ranges.iter().position(|&x| x >= type_one) {
        return Ok(RangeSplit {
            decision: SplitKind::TypeI,
            subset: vec![i],
            product: ranges[i],
            slack: c,
            lower: type_one,
            upper: f64::INFINITY,
        });
    }
    let (lower, upper) = (w / c, c * u / w);
    let split = |subset: Vec<usize>, product: f64| RangeSplit {
        decision: SplitKind::TypeII,
        subset,
        product,
        slack: c,
        lower,
        upper,
    };
    if let Some(i) = ranges.iter().position(|&x| lower <= x && x <= upper) {
        return Ok(split(vec![i], ranges[i]));
    }
    let mut prefix = 1.0;
    for (i, &x) in ranges.iter().enumerate() {
        prefix *= x;
        if prefix >= lower {
            return Ok(split((0..=i).collect(), prefix));
        }
    }
    invalid("no prefix reaches W/2^(4s+3); U is too small for this W")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn long_smooth_variable_is_type_one() {
        let u = 2f64.powi(20);
        let r = type_split(&[1.0, 1.0, u], u, u.powf(1.0 / 6.0)).unwrap();
        assert_eq!(r.decision, SplitKind::TypeI);
        assert_eq!(r.subset, vec![2]);
        assert!(r.holds());
    }

    #[test]
    fn short_variables_use_a_prefix() {
        // s = 1: seven ranges, C = 128
        let u = 2f64.powi(40);
        let mut xs = [2f64.powi(5); 7];
        xs[6] = 2f64.powi(10);
        let r = type_split(&xs, u, 2f64.powi(13)).unwrap();
        assert_eq!(r.decision, SplitKind::TypeII);
        assert_eq!(r.subset, vec![6]);
        assert!(r.holds());

        let r = type_split(&xs, u, 2f64.powi(20)).unwrap();
        assert_eq!(r.decision, SplitKind::TypeII);
        assert_eq!(r.subset, vec![0, 1, 2]);
        assert!(r.holds());
    }

    #[test]
    fn preconditions() {
        assert!(type_split(&[1.0, 1.0], 10.0, 1.0).is_err());
        assert!(type_split(&[1.0, 1.0, 4.0], 4.0, 0.5).is_err());
        assert!(type_split(&[100.0, 1.0, 1.0], 100.0, 1.0).is_err());
        assert!(type_split(&[1.0, 1.0, 1.0], 1e6, 1.0).is_err());
    }

    fn random_tuple(rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
        let s = rng.gen_range(0..3usize);
        let len = 4 * s + 3;
        let k = rng.gen_range(12..60i32);
        let cap = ((k + 1) / 2) as i32;
        let total = rng.gen_range((k - len as i32).max(0)..=k);
        let mut e = vec![0i32; len];
        let mut placed = 0;
        while placed < total {
            let i = rng.gen_range(0..len);
            if i < 2 * s + 2 && e[i] >= cap {
                continue;
            }
            e[i] += 1;
            placed += 1;
        }
        (e.into_iter().map(|x| 2f64.powi(x)).collect(), 2f64.powi(k))
    }

    #[test]
    fn postcondition_on_random_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let (xs, u) = random_tuple(&mut rng);
            let r = type_split(&xs, u, u.powf(1.0 / 6.0)).unwrap();
            assert!(r.holds(), "{xs:?} {u} {r:?}");
        }
    }
}
