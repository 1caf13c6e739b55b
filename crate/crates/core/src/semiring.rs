//! Scalar arithmetic for the two idempotent models.
//!
//! `ExtendedReal` is the max-plus scalar: a real number extended by a bottom
//! element `-inf` that absorbs addition and is the identity of the join.
//! `UnitWeight` is the max-times scalar: a real in `[0, 1]` with join and
//! ordinary multiplication. The two are bridged by `ln`/`exp`, with
//! `ln 0 = -inf` and `exp(-inf) = 0`.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::CheckReport;

/// Values in `[0, 1]` below this threshold are treated as exact zero by the
/// logarithm, so `ln` never produces a large finite artifact of underflow.
pub const LN_UNDERFLOW: f64 = 1e-300;

/// A max-plus scalar: a finite real or the bottom element `-inf`.
///
/// The bottom element is a dedicated variant, never a floating sentinel, so
/// the absorbing laws `-inf + x = -inf` and `-inf v x = x` hold exactly.
#[derive(Debug, Clone, Copy)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
}

pub use ExtendedReal::{Finite, NegInf};

impl ExtendedReal {
    /// Wraps a finite value. NaN is rejected outright: every downstream
    /// invariant assumes a total order.
    pub fn finite(value: f64) -> Self {
        assert!(!value.is_nan(), "ExtendedReal cannot hold NaN");
        assert!(
            value.is_finite(),
            "use ExtendedReal::NegInf for the bottom element"
        );
        Finite(value)
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, NegInf)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            NegInf => None,
            Finite(v) => Some(*v),
        }
    }

    /// Join (idempotent addition): the maximum, with `-inf` as identity.
    pub fn join(self, other: Self) -> Self {
        match (self, other) {
            (NegInf, x) | (x, NegInf) => x,
            (Finite(a), Finite(b)) => Finite(a.max(b)),
        }
    }

    /// Semiring multiplication: numeric addition, with `-inf` absorbing.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// `exp` extended by `exp(-inf) = 0`.
    pub fn exp(self) -> f64 {
        match self {
            NegInf => 0.0,
            Finite(v) => v.exp(),
        }
    }

    /// Change of model into the unit interval. Defined on `[-inf, 0]` only.
    pub fn to_maxtimes(self) -> Result<UnitWeight> {
        match self {
            NegInf => Ok(UnitWeight::ZERO),
            Finite(v) if v > 0.0 => Err(Error::PositiveValue(v)),
            Finite(v) => UnitWeight::new(v.exp()),
        }
    }

    /// Clamp from below at `-n`: the identity on `(-n, 0]`, constantly `-n`
    /// on `[-inf, -n]`. Defined on `[-inf, 0]` only; always finite.
    pub fn truncate(self, depth: u32) -> Result<f64> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        let floor = -(depth as f64);
        match self {
            NegInf => Ok(floor),
            Finite(v) if v > 0.0 => Err(Error::PositiveValue(v)),
            Finite(v) => Ok(v.max(floor)),
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(value: f64) -> Self {
        ExtendedReal::finite(value)
    }
}

impl PartialEq for ExtendedReal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (NegInf, NegInf) => true,
            (Finite(a), Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) => Ordering::Equal,
            (NegInf, Finite(_)) => Ordering::Less,
            (Finite(_), NegInf) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.partial_cmp(b).expect("finite values are never NaN"),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            Finite(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NegInf => serializer.serialize_str("-inf"),
            Finite(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> de::Visitor<'de> for V {
            type Value = ExtendedReal;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number or the string \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedReal, E> {
                if v.is_nan() || v.is_infinite() {
                    return Err(E::custom("scalar must be finite; use \"-inf\" for bottom"));
                }
                Ok(Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedReal, E> {
                Ok(Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedReal, E> {
                Ok(Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<ExtendedReal, E> {
                if s == "-inf" {
                    Ok(NegInf)
                } else {
                    Err(E::custom(format!("unknown scalar token {s:?}")))
                }
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// A max-times scalar: a real in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UnitWeight(f64);

impl UnitWeight {
    pub const ZERO: UnitWeight = UnitWeight(0.0);
    pub const ONE: UnitWeight = UnitWeight(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::NotANumber);
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::UnitRange(value));
        }
        Ok(UnitWeight(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn join(self, other: Self) -> Self {
        UnitWeight(self.0.max(other.0))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        UnitWeight(self.0 * other.0)
    }

    /// Change of model: `ln`, with the underflow band mapped to `-inf`.
    pub fn to_maxplus(self) -> ExtendedReal {
        self.to_maxplus_with_threshold(LN_UNDERFLOW)
    }

    /// As `to_maxplus`, with an explicit underflow threshold.
    pub fn to_maxplus_with_threshold(self, threshold: f64) -> ExtendedReal {
        if self.0 < threshold {
            NegInf
        } else {
            Finite(self.0.ln())
        }
    }
}

impl fmt::Display for UnitWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for UnitWeight {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for UnitWeight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        UnitWeight::new(v).map_err(de::Error::custom)
    }
}

/// Diagonal embedding of `[-inf, 0]` by the first `depth` truncations.
///
/// Distinct inputs in `[-M, 0] ∪ {-inf}` stay distinct whenever
/// `depth >= M + 1`, which makes the embedding lossless on bounded data.
pub fn truncation_embedding(t: ExtendedReal, depth: u32) -> Result<Vec<f64>> {
    (1..=depth).map(|n| t.truncate(n)).collect()
}

/// The truncation embedding composed with `ln`: a map `[0, 1] -> R^depth`
/// that turns max-times combinations into max-plus ones.
pub fn unit_embedding(u: UnitWeight, depth: u32) -> Result<Vec<f64>> {
    truncation_embedding(u.to_maxplus(), depth)
}

/// The metric on `[-inf, 0]`: the absolute difference of exponentials.
/// Under it `-inf` is an ordinary compact point at distance `e^{-n}` from `-n`.
pub fn exp_distance(a: ExtendedReal, b: ExtendedReal) -> f64 {
    (a.exp() - b.exp()).abs()
}

/// Grid used by the exhaustive truncation-affinity check:
/// `{0, -0.25, ..., -5}` together with the bottom element.
pub fn default_affinity_grid() -> Vec<ExtendedReal> {
    let mut grid: Vec<ExtendedReal> = (0..=20).map(|k| Finite(-0.25 * k as f64)).collect();
    grid.push(NegInf);
    grid
}

/// Verifies `f_n((a + s) v k) = (a + f_n(s)) v f_n(k)` exactly, first on the
/// full grid x depths product, then on `trials` random triples.
pub fn check_truncation_affinity(
    grid: &[ExtendedReal],
    depths: std::ops::RangeInclusive<u32>,
    trials: u64,
    seed: u64,
) -> CheckReport {
    let mut report = CheckReport::new(0.0);
    let mut run = |a: ExtendedReal, s: ExtendedReal, k: ExtendedReal, n: u32| {
        let lhs = a
            .add(s)
            .join(k)
            .truncate(n)
            .expect("inputs are nonpositive");
        let rhs = a
            .add(Finite(s.truncate(n).expect("inputs are nonpositive")))
            .join(Finite(k.truncate(n).expect("inputs are nonpositive")));
        report.record_exact(rhs == Finite(lhs), || {
            format!("a={a} s={s} k={k} n={n}: lhs={lhs} rhs={rhs}")
        });
    };
    for &a in grid {
        for &s in grid {
            for &k in grid {
                for n in depths.clone() {
                    run(a, s, k, n);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| -> ExtendedReal {
        if rng.random_range(0..8) == 0 {
            NegInf
        } else {
            Finite(-rng.random_range(0.0..8.0))
        }
    };
    for _ in 0..trials {
        let (a, s, k) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
        let n = rng.random_range(*depths.start()..=*depths.end());
        run(a, s, k, n);
    }
    report
}

/// Verifies that the unit embedding intertwines the two kinds of convex
/// combination: `g(a*s v k) = (ln a + g(s)) v g(k)` componentwise.
pub fn check_unit_embedding_affinity(
    trials: u64,
    max_depth: u32,
    tolerance: f64,
    seed: u64,
) -> CheckReport {
    let mut report = CheckReport::new(tolerance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let a = UnitWeight(rng.random_range(0.0..=1.0));
        let s = UnitWeight(rng.random_range(0.0..=1.0));
        let k = UnitWeight(rng.random_range(0.0..=1.0));
        let depth = (trial as u32 % max_depth) + 1;
        let lhs = unit_embedding(a.mul(s).join(k), depth).expect("depth is positive");
        let gs = unit_embedding(s, depth).expect("depth is positive");
        let gk = unit_embedding(k, depth).expect("depth is positive");
        let ln_a = a.to_maxplus();
        let mut worst = 0.0f64;
        for i in 0..depth as usize {
            let rhs = ln_a.add(Finite(gs[i])).join(Finite(gk[i]));
            let diff = match rhs {
                Finite(r) => (lhs[i] - r).abs(),
                NegInf => f64::INFINITY,
            };
            worst = worst.max(diff);
        }
        report.record(worst, || {
            format!(
                "a={} s={} k={} depth={depth}",
                a.value(),
                s.value(),
                k.value()
            )
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_bottom_is_identity() {
        assert_eq!(NegInf.join(Finite(3.0)), Finite(3.0));
        assert_eq!(Finite(-2.0).join(Finite(-5.0)), Finite(-2.0));
        assert_eq!(Finite(0.0).join(Finite(0.0)), Finite(0.0));
    }

    #[test]
    fn add_bottom_absorbs() {
        assert_eq!(NegInf.add(Finite(7.0)), NegInf);
        assert_eq!(Finite(-1.0).add(Finite(-2.0)), Finite(-3.0));
        assert_eq!(Finite(0.0).add(Finite(4.5)), Finite(4.5));
    }

    #[test]
    fn model_change_endpoints() {
        assert_eq!(UnitWeight::ONE.to_maxplus(), Finite(0.0));
        assert_eq!(UnitWeight::ZERO.to_maxplus(), NegInf);
        let w = UnitWeight::new((-2.0f64).exp()).unwrap();
        let ln_w = w.to_maxplus().as_finite().unwrap();
        assert!((ln_w + 2.0).abs() < 1e-12);

        assert_eq!(Finite(0.0).to_maxtimes().unwrap(), UnitWeight::ONE);
        assert_eq!(NegInf.to_maxtimes().unwrap(), UnitWeight::ZERO);
        let back = Finite(-2.0).to_maxtimes().unwrap().value();
        assert!((back - 0.1353352832366127).abs() < 1e-12);
        assert_eq!(Finite(0.5).to_maxtimes(), Err(Error::PositiveValue(0.5)));
    }

    #[test]
    fn truncate_branches() {
        assert_eq!(Finite(-1.0).truncate(2).unwrap(), -1.0);
        assert_eq!(Finite(-5.0).truncate(2).unwrap(), -2.0);
        assert_eq!(NegInf.truncate(4).unwrap(), -4.0);
        assert_eq!(Finite(0.1).truncate(2), Err(Error::PositiveValue(0.1)));
        assert_eq!(Finite(-1.0).truncate(0), Err(Error::ZeroDepth));
    }

    #[test]
    fn truncation_embedding_examples() {
        assert_eq!(
            truncation_embedding(Finite(-1.5), 3).unwrap(),
            vec![-1.0, -1.5, -1.5]
        );
        assert_eq!(
            truncation_embedding(Finite(0.0), 3).unwrap(),
            vec![0.0, 0.0, 0.0]
        );
        assert_eq!(
            truncation_embedding(NegInf, 3).unwrap(),
            vec![-1.0, -2.0, -3.0]
        );
    }

    #[test]
    fn unit_embedding_examples() {
        assert_eq!(unit_embedding(UnitWeight::ONE, 2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(
            unit_embedding(UnitWeight::ZERO, 2).unwrap(),
            vec![-1.0, -2.0]
        );
        let g = unit_embedding(UnitWeight::new((-1.5f64).exp()).unwrap(), 2).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
        assert!((g[1] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn exp_distance_examples() {
        assert!((exp_distance(Finite(0.0), NegInf) - 1.0).abs() < 1e-15);
        assert_eq!(exp_distance(Finite(-3.25), Finite(-3.25)), 0.0);
        assert!((exp_distance(Finite(-1.0), Finite(-2.0)) - 0.23254415793482963).abs() < 1e-15);
    }

    #[test]
    fn embedding_injective_on_bounded_data() {
        // depth M+1 separates [-M, 0] from the bottom element
        let m = 3u32;
        let depth = m + 1;
        let mut images: Vec<Vec<f64>> = Vec::new();
        let mut inputs: Vec<ExtendedReal> = (0..=12).map(|k| Finite(-0.25 * k as f64)).collect();
        inputs.push(NegInf);
        for &t in &inputs {
            let img = truncation_embedding(t, depth).unwrap();
            assert!(!images.contains(&img), "collision at {t}");
            images.push(img);
        }
    }

    #[test]
    fn truncation_affinity_holds_on_grid() {
        let report = check_truncation_affinity(&default_affinity_grid(), 1..=4, 1000, 7);
        assert!(report.passed(), "worst: {:?}", report.worst_case);
    }

    #[test]
    fn unit_embedding_affinity_holds() {
        let report = check_unit_embedding_affinity(2000, 6, 1e-12, 11);
        assert!(report.passed(), "worst: {:?}", report.worst_case);
    }

    #[test]
    fn scalar_json_round_trip() {
        let v: ExtendedReal = serde_json::from_str("-1.5").unwrap();
        assert_eq!(v, Finite(-1.5));
        let b: ExtendedReal = serde_json::from_str("\"-inf\"").unwrap();
        assert_eq!(b, NegInf);
        assert_eq!(serde_json::to_string(&NegInf).unwrap(), "\"-inf\"");
        assert_eq!(serde_json::to_string(&Finite(-2.0)).unwrap(), "-2.0");
        assert!(serde_json::from_str::<ExtendedReal>("\"+inf\"").is_err());
        assert!(serde_json::from_str::<UnitWeight>("1.5").is_err());
    }
}
