//! Convex combinations in both models, tropical polytopes given by finite
//! generator sets, hull membership via tropical projection, binary
//! combination maps with their L-shaped weight spaces, and the affine
//! embedding that transports max-times data into the max-plus model.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::semiring::{
    exp_distance, truncation_embedding, ExtendedReal, Finite, NegInf, UnitWeight,
};

/// A point of `R_max^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MaxPlusPoint {
    coords: Vec<ExtendedReal>,
}

impl MaxPlusPoint {
    pub fn new(coords: Vec<ExtendedReal>) -> Self {
        MaxPlusPoint { coords }
    }

    pub fn from_values(values: &[f64]) -> Self {
        MaxPlusPoint {
            coords: values.iter().map(|&v| ExtendedReal::finite(v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[ExtendedReal] {
        &self.coords
    }

    /// Sup over coordinates of the exponential metric.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| exp_distance(a, b))
            .fold(0.0, f64::max)
    }
}

/// A point of `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MaxTimesPoint {
    coords: Vec<UnitWeight>,
}

impl MaxTimesPoint {
    pub fn new(coords: Vec<UnitWeight>) -> Self {
        MaxTimesPoint { coords }
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        Ok(MaxTimesPoint {
            coords: values
                .iter()
                .map(|&v| UnitWeight::new(v))
                .collect::<Result<_>>()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[UnitWeight] {
        &self.coords
    }

    pub fn values(&self) -> Vec<f64> {
        self.coords.iter().map(|w| w.value()).collect()
    }

    /// Sup over coordinates of the absolute difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a.value() - b.value()).abs())
            .fold(0.0, f64::max)
    }
}

fn check_dims<T>(items: &[T], dim_of: impl Fn(&T) -> usize) -> Result<usize> {
    let expected = dim_of(&items[0]);
    for item in items {
        let got = dim_of(item);
        if got != expected {
            return Err(Error::DimensionMismatch { expected, got });
        }
    }
    Ok(expected)
}

/// `v (a_i + x_i)` over finitely many points, with weights joined to `0`.
pub fn max_plus_combination(
    points: &[MaxPlusPoint],
    lambdas: &[ExtendedReal],
) -> Result<MaxPlusPoint> {
    if points.is_empty() || points.len() != lambdas.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: lambdas.len(),
        });
    }
    let dim = check_dims(points, |p| p.dim())?;
    let top = lambdas.iter().copied().fold(NegInf, ExtendedReal::join);
    if top != Finite(0.0) {
        return Err(Error::NotNormalized(exp_distance(top, Finite(0.0))));
    }
    let coords = (0..dim)
        .map(|j| {
            points
                .iter()
                .zip(lambdas)
                .map(|(p, &l)| l.add(p.coords[j]))
                .fold(NegInf, ExtendedReal::join)
        })
        .collect();
    Ok(MaxPlusPoint { coords })
}

/// `v (a_i * x_i)` over finitely many points, with weights joined to `1`.
pub fn max_times_combination(
    points: &[MaxTimesPoint],
    lambdas: &[UnitWeight],
) -> Result<MaxTimesPoint> {
    if points.is_empty() || points.len() != lambdas.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: lambdas.len(),
        });
    }
    let dim = check_dims(points, |p| p.dim())?;
    let top = lambdas
        .iter()
        .copied()
        .fold(UnitWeight::ZERO, UnitWeight::join);
    if top != UnitWeight::ONE {
        return Err(Error::NotNormalized((1.0 - top.value()).abs()));
    }
    let coords = (0..dim)
        .map(|j| {
            points
                .iter()
                .zip(lambdas)
                .map(|(p, &l)| l.mul(p.coords[j]))
                .fold(UnitWeight::ZERO, UnitWeight::join)
        })
        .collect();
    Ok(MaxTimesPoint { coords })
}

/// A binary max-times weight pair `(t, p)` with `t v p = 1`: the L-shaped
/// parameter space of two-point combinations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct MaxTimesComboWeights {
    t: UnitWeight,
    p: UnitWeight,
}

impl MaxTimesComboWeights {
    pub fn new(t: UnitWeight, p: UnitWeight) -> Result<Self> {
        if t.join(p) != UnitWeight::ONE {
            return Err(Error::NotNormalized((1.0 - t.join(p).value()).abs()));
        }
        Ok(MaxTimesComboWeights { t, p })
    }

    pub fn t(&self) -> UnitWeight {
        self.t
    }

    pub fn p(&self) -> UnitWeight {
        self.p
    }

    /// The binary combination `t*x v p*y`.
    pub fn combine(&self, x: &MaxTimesPoint, y: &MaxTimesPoint) -> Result<MaxTimesPoint> {
        max_times_combination(&[x.clone(), y.clone()], &[self.t, self.p])
    }

    /// Componentwise logarithm, landing in the max-plus weight space.
    pub fn to_maxplus(&self) -> MaxPlusComboWeights {
        MaxPlusComboWeights {
            t: self.t.to_maxplus(),
            p: self.p.to_maxplus(),
        }
    }
}

impl TryFrom<(f64, f64)> for MaxTimesComboWeights {
    type Error = Error;
    fn try_from((t, p): (f64, f64)) -> Result<Self> {
        MaxTimesComboWeights::new(UnitWeight::new(t)?, UnitWeight::new(p)?)
    }
}

impl From<MaxTimesComboWeights> for (f64, f64) {
    fn from(w: MaxTimesComboWeights) -> (f64, f64) {
        (w.t.value(), w.p.value())
    }
}

/// A binary max-plus weight pair `(t, p)` with `t v p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "(ExtendedReal, ExtendedReal)",
    into = "(ExtendedReal, ExtendedReal)"
)]
pub struct MaxPlusComboWeights {
    t: ExtendedReal,
    p: ExtendedReal,
}

impl MaxPlusComboWeights {
    pub fn new(t: ExtendedReal, p: ExtendedReal) -> Result<Self> {
        if t.join(p) != Finite(0.0) {
            return Err(Error::NotNormalized(exp_distance(t.join(p), Finite(0.0))));
        }
        Ok(MaxPlusComboWeights { t, p })
    }

    pub fn t(&self) -> ExtendedReal {
        self.t
    }

    pub fn p(&self) -> ExtendedReal {
        self.p
    }

    /// The binary combination `(t + x) v (p + y)`.
    pub fn combine(&self, x: &MaxPlusPoint, y: &MaxPlusPoint) -> Result<MaxPlusPoint> {
        max_plus_combination(&[x.clone(), y.clone()], &[self.t, self.p])
    }
}

impl TryFrom<(ExtendedReal, ExtendedReal)> for MaxPlusComboWeights {
    type Error = Error;
    fn try_from((t, p): (ExtendedReal, ExtendedReal)) -> Result<Self> {
        MaxPlusComboWeights::new(t, p)
    }
}

impl From<MaxPlusComboWeights> for (ExtendedReal, ExtendedReal) {
    fn from(w: MaxPlusComboWeights) -> (ExtendedReal, ExtendedReal) {
        (w.t, w.p)
    }
}

/// Model tag for flavored containers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "max-plus")]
    MaxPlus,
    #[serde(rename = "max-times")]
    MaxTimes,
}

/// A tropical polytope: the set of all normalized idempotent convex
/// combinations of a finite generator list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRepr", into = "PolytopeRepr")]
pub enum TropicalPolytope {
    MaxPlus(Vec<MaxPlusPoint>),
    MaxTimes(Vec<MaxTimesPoint>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "flavor")]
enum PolytopeRepr {
    #[serde(rename = "max-plus")]
    MaxPlus { generators: Vec<Vec<ExtendedReal>> },
    #[serde(rename = "max-times")]
    MaxTimes { generators: Vec<Vec<f64>> },
}

impl TryFrom<PolytopeRepr> for TropicalPolytope {
    type Error = Error;
    fn try_from(repr: PolytopeRepr) -> Result<Self> {
        match repr {
            PolytopeRepr::MaxPlus { generators } => {
                TropicalPolytope::max_plus(generators.into_iter().map(MaxPlusPoint::new).collect())
            }
            PolytopeRepr::MaxTimes { generators } => TropicalPolytope::max_times(
                generators
                    .iter()
                    .map(|g| MaxTimesPoint::from_values(g))
                    .collect::<Result<_>>()?,
            ),
        }
    }
}

impl From<TropicalPolytope> for PolytopeRepr {
    fn from(poly: TropicalPolytope) -> PolytopeRepr {
        match poly {
            TropicalPolytope::MaxPlus(gens) => PolytopeRepr::MaxPlus {
                generators: gens.into_iter().map(|g| g.coords).collect(),
            },
            TropicalPolytope::MaxTimes(gens) => PolytopeRepr::MaxTimes {
                generators: gens.iter().map(|g| g.values()).collect(),
            },
        }
    }
}

impl TropicalPolytope {
    pub fn max_plus(generators: Vec<MaxPlusPoint>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        check_dims(&generators, |g| g.dim())?;
        Ok(TropicalPolytope::MaxPlus(generators))
    }

    pub fn max_times(generators: Vec<MaxTimesPoint>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        check_dims(&generators, |g| g.dim())?;
        Ok(TropicalPolytope::MaxTimes(generators))
    }

    /// The max-plus simplex on `d` labels: generators with `0` in one slot
    /// and bottom elsewhere. For `d = 2` this is the space of idempotent
    /// measures on a two-point set.
    pub fn max_plus_simplex(d: usize) -> Self {
        let gens = (0..d)
            .map(|i| {
                MaxPlusPoint::new(
                    (0..d)
                        .map(|j| if i == j { Finite(0.0) } else { NegInf })
                        .collect(),
                )
            })
            .collect();
        TropicalPolytope::MaxPlus(gens)
    }

    /// The max-times simplex on `d` labels: generators with `1` in one slot
    /// and `0` elsewhere. For `d = 2` this is the space of max-times
    /// measures on a two-point set.
    pub fn max_times_simplex(d: usize) -> Self {
        let gens = (0..d)
            .map(|i| {
                MaxTimesPoint::new(
                    (0..d)
                        .map(|j| {
                            if i == j {
                                UnitWeight::ONE
                            } else {
                                UnitWeight::ZERO
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        TropicalPolytope::MaxTimes(gens)
    }

    /// The box `[lo, hi]^d` in the max-times model, generated by its vertex set.
    pub fn max_times_box(lo: f64, hi: f64, d: usize) -> Result<Self> {
        let lo = UnitWeight::new(lo)?;
        let hi = UnitWeight::new(hi)?;
        if lo > hi {
            return Err(Error::UnitRange(lo.value()));
        }
        let mut gens = Vec::with_capacity(1 << d);
        for mask in 0..(1usize << d) {
            let coords = (0..d)
                .map(|j| if mask >> j & 1 == 1 { hi } else { lo })
                .collect();
            gens.push(MaxTimesPoint::new(coords));
        }
        gens.dedup();
        TropicalPolytope::max_times(gens)
    }

    /// The box `[lo, hi]^d` in the max-plus model, generated by its vertex set.
    pub fn max_plus_box(lo: f64, hi: f64, d: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::PositiveValue(lo - hi));
        }
        let mut gens = Vec::with_capacity(1 << d);
        for mask in 0..(1usize << d) {
            let coords = (0..d)
                .map(|j| ExtendedReal::finite(if mask >> j & 1 == 1 { hi } else { lo }))
                .collect();
            gens.push(MaxPlusPoint::new(coords));
        }
        gens.dedup();
        TropicalPolytope::max_plus(gens)
    }

    /// The coordinatewise product of polytopes of one flavor: generated by
    /// all concatenations of factor generators.
    pub fn product(factors: &[TropicalPolytope]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        match &factors[0] {
            TropicalPolytope::MaxPlus(_) => {
                let mut gens: Vec<Vec<ExtendedReal>> = vec![Vec::new()];
                for factor in factors {
                    let TropicalPolytope::MaxPlus(fg) = factor else {
                        return Err(Error::FlavorMismatch);
                    };
                    let mut next = Vec::with_capacity(gens.len() * fg.len());
                    for prefix in &gens {
                        for g in fg {
                            let mut v = prefix.clone();
                            v.extend_from_slice(g.coords());
                            next.push(v);
                        }
                    }
                    gens = next;
                }
                TropicalPolytope::max_plus(gens.into_iter().map(MaxPlusPoint::new).collect())
            }
            TropicalPolytope::MaxTimes(_) => {
                let mut gens: Vec<Vec<UnitWeight>> = vec![Vec::new()];
                for factor in factors {
                    let TropicalPolytope::MaxTimes(fg) = factor else {
                        return Err(Error::FlavorMismatch);
                    };
                    let mut next = Vec::with_capacity(gens.len() * fg.len());
                    for prefix in &gens {
                        for g in fg {
                            let mut v = prefix.clone();
                            v.extend_from_slice(g.coords());
                            next.push(v);
                        }
                    }
                    gens = next;
                }
                TropicalPolytope::max_times(gens.into_iter().map(MaxTimesPoint::new).collect())
            }
        }
    }

    pub fn flavor(&self) -> Flavor {
        match self {
            TropicalPolytope::MaxPlus(_) => Flavor::MaxPlus,
            TropicalPolytope::MaxTimes(_) => Flavor::MaxTimes,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TropicalPolytope::MaxPlus(g) => g[0].dim(),
            TropicalPolytope::MaxTimes(g) => g[0].dim(),
        }
    }

    pub fn generator_count(&self) -> usize {
        match self {
            TropicalPolytope::MaxPlus(g) => g.len(),
            TropicalPolytope::MaxTimes(g) => g.len(),
        }
    }
}

/// Residuation weights for a max-plus query against a generator list.
///
/// A generator coordinate at bottom imposes no constraint unless the query
/// coordinate is at bottom too, in which case the coordinate is skipped; a
/// finite generator coordinate against a bottom query coordinate forces the
/// weight to bottom. Weights are clamped to `<= 0`.
pub fn max_plus_projection_weights(
    point: &MaxPlusPoint,
    generators: &[MaxPlusPoint],
) -> Vec<ExtendedReal> {
    generators
        .iter()
        .map(|g| {
            let mut bound = f64::INFINITY;
            for (p, v) in point.coords().iter().zip(g.coords()) {
                match (p, v) {
                    (_, NegInf) => {}
                    (NegInf, Finite(_)) => return NegInf,
                    (Finite(p), Finite(v)) => bound = bound.min(p - v),
                }
            }
            Finite(bound.min(0.0))
        })
        .collect()
}

/// Residuation weights for a max-times query, with the symmetric boundary
/// conventions at generator coordinate `0`. Weights are clamped to `<= 1`.
pub fn max_times_projection_weights(
    point: &MaxTimesPoint,
    generators: &[MaxTimesPoint],
) -> Vec<UnitWeight> {
    generators
        .iter()
        .map(|g| {
            let mut bound = f64::INFINITY;
            for (p, v) in point.coords().iter().zip(g.coords()) {
                if v.value() == 0.0 {
                    continue;
                }
                if p.value() == 0.0 {
                    return UnitWeight::ZERO;
                }
                bound = bound.min(p.value() / v.value());
            }
            UnitWeight::new(bound.min(1.0)).expect("clamped ratio of unit values")
        })
        .collect()
}

/// The tropical projection of a query onto the span of the generators,
/// together with the residuation weights that realize it. The projection is
/// the largest combination (with weights clamped at the unit) that sits
/// coordinatewise below the query; the query is in the hull exactly when the
/// projection reproduces it and the weights join to the unit.
pub fn hull_project(point_coords: &[ExtendedReal], poly: &TropicalPolytope) -> Result<Projection> {
    if point_coords.len() != poly.dim() {
        return Err(Error::DimensionMismatch {
            expected: poly.dim(),
            got: point_coords.len(),
        });
    }
    match poly {
        TropicalPolytope::MaxPlus(gens) => {
            let p = MaxPlusPoint::new(point_coords.to_vec());
            let lambdas = max_plus_projection_weights(&p, gens);
            let dim = p.dim();
            let coords: Vec<ExtendedReal> = (0..dim)
                .map(|j| {
                    gens.iter()
                        .zip(&lambdas)
                        .map(|(g, &l)| l.add(g.coords()[j]))
                        .fold(NegInf, ExtendedReal::join)
                })
                .collect();
            let top = lambdas.iter().copied().fold(NegInf, ExtendedReal::join);
            let projected = MaxPlusPoint::new(coords);
            let distance = projected.distance(&p);
            Ok(Projection {
                point: projected.coords().to_vec(),
                weights: lambdas,
                unit_gap: exp_distance(top, Finite(0.0)),
                distance,
            })
        }
        TropicalPolytope::MaxTimes(gens) => {
            let p = unit_point(point_coords)?;
            let lambdas = max_times_projection_weights(&p, gens);
            let dim = p.dim();
            let coords: Vec<UnitWeight> = (0..dim)
                .map(|j| {
                    gens.iter()
                        .zip(&lambdas)
                        .map(|(g, &l)| l.mul(g.coords()[j]))
                        .fold(UnitWeight::ZERO, UnitWeight::join)
                })
                .collect();
            let top = lambdas
                .iter()
                .copied()
                .fold(UnitWeight::ZERO, UnitWeight::join);
            let projected = MaxTimesPoint::new(coords);
            let distance = projected.distance(&p);
            Ok(Projection {
                point: projected
                    .coords()
                    .iter()
                    .map(|w| Finite(w.value()))
                    .collect(),
                weights: lambdas.iter().map(|w| Finite(w.value())).collect(),
                unit_gap: (1.0 - top.value()).abs(),
                distance,
            })
        }
    }
}

/// Result of a tropical projection, in the coordinates of the query flavor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    /// The projected point.
    pub point: Vec<ExtendedReal>,
    /// The clamped residuation weights, one per generator.
    pub weights: Vec<ExtendedReal>,
    /// Distance (in the flavor metric) of the weight join from the unit.
    pub unit_gap: f64,
    /// Distance (in the flavor metric) from the query to the projection.
    pub distance: f64,
}

fn unit_point(coords: &[ExtendedReal]) -> Result<MaxTimesPoint> {
    let values: Vec<UnitWeight> = coords
        .iter()
        .map(|c| match c {
            NegInf => Err(Error::FlavorMismatch),
            Finite(v) => UnitWeight::new(*v),
        })
        .collect::<Result<_>>()?;
    Ok(MaxTimesPoint::new(values))
}

/// Membership test: the query is in the hull when the projection reproduces
/// it within `tol` (flavor metric) and the residuation weights attain the
/// unit within `tol`.
pub fn hull_member(
    point_coords: &[ExtendedReal],
    poly: &TropicalPolytope,
    tol: f64,
) -> Result<bool> {
    let proj = hull_project(point_coords, poly)?;
    Ok(proj.distance <= tol && proj.unit_gap <= tol)
}

/// The coordinatewise truncation-and-log embedding of `[0, 1]^dim` into
/// `R^{depth * dim}`, affine from the max-times model into the max-plus one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineEmbedding {
    dim: usize,
    depth: u32,
}

impl AffineEmbedding {
    pub fn new(dim: usize, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        Ok(AffineEmbedding { dim, depth })
    }

    /// Picks a depth that makes the embedding lossless on the given data:
    /// one more than the largest finite `|ln coordinate|` occurring in it.
    pub fn covering(points: &[MaxTimesPoint], dim: usize) -> Self {
        let mut magnitude = 0.0f64;
        for p in points {
            for w in p.coords() {
                if let Finite(l) = w.to_maxplus() {
                    magnitude = magnitude.max(l.abs());
                }
            }
        }
        AffineEmbedding {
            dim,
            depth: magnitude.ceil() as u32 + 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn output_dim(&self) -> usize {
        self.dim * self.depth as usize
    }

    /// Embeds one point: the concatenation of the per-coordinate unit
    /// embeddings. Output coordinates are always finite, in `[-depth, 0]`.
    pub fn apply(&self, point: &MaxTimesPoint) -> Result<MaxPlusPoint> {
        if point.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.dim(),
            });
        }
        let mut coords = Vec::with_capacity(self.output_dim());
        for w in point.coords() {
            let ln = w.to_maxplus();
            for part in truncation_embedding(ln, self.depth).expect("depth is positive") {
                coords.push(Finite(part));
            }
        }
        Ok(MaxPlusPoint::new(coords))
    }

    /// Embeds a max-times polytope generatorwise, checking that the
    /// embedding stays injective on the generator set.
    pub fn embed_polytope(&self, poly: &TropicalPolytope) -> Result<TropicalPolytope> {
        let TropicalPolytope::MaxTimes(gens) = poly else {
            return Err(Error::FlavorMismatch);
        };
        let images: Vec<MaxPlusPoint> =
            gens.iter().map(|g| self.apply(g)).collect::<Result<_>>()?;
        for (i, a) in images.iter().enumerate() {
            for (k, b) in gens.iter().enumerate().skip(i + 1) {
                if a == &images[k] && gens[i] != *b {
                    return Err(Error::NotInjective);
                }
            }
        }
        TropicalPolytope::max_plus(images)
    }
}

/// Samples the affinity identity `h(a*s v k) = (ln a + h(s)) v h(k)` on
/// random triples and reports the worst componentwise discrepancy. Mixed
/// finite/bottom disagreements count as infinite.
pub fn check_affine<F>(h: F, dim: usize, trials: u64, tolerance: f64, seed: u64) -> CheckReport
where
    F: Fn(&MaxTimesPoint) -> MaxPlusPoint,
{
    let mut report = CheckReport::new(tolerance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_point = |rng: &mut ChaCha8Rng| {
        MaxTimesPoint::new(
            (0..dim)
                .map(|_| UnitWeight::new(rng.random_range(0.0..=1.0)).expect("in range"))
                .collect(),
        )
    };
    for _ in 0..trials {
        let a = UnitWeight::new(rng.random_range(0.0..=1.0)).expect("in range");
        let s = random_point(&mut rng);
        let k = random_point(&mut rng);
        let mixed = MaxTimesPoint::new(
            s.coords()
                .iter()
                .zip(k.coords())
                .map(|(&sc, &kc)| a.mul(sc).join(kc))
                .collect(),
        );
        let lhs = h(&mixed);
        let hs = h(&s);
        let hk = h(&k);
        let ln_a = a.to_maxplus();
        let mut worst = 0.0f64;
        for j in 0..lhs.dim() {
            let rhs = ln_a.add(hs.coords()[j]).join(hk.coords()[j]);
            let diff = match (lhs.coords()[j], rhs) {
                (NegInf, NegInf) => 0.0,
                (Finite(l), Finite(r)) => (l - r).abs(),
                _ => f64::INFINITY,
            };
            worst = worst.max(diff);
        }
        report.record(worst, || {
            format!("a={} s={:?} k={:?}", a.value(), s.values(), k.values())
        });
    }
    report
}
