//! Finitely-supported idempotent measures in both models.
//!
//! A max-plus measure on a finite space is a weight vector with entries in
//! `[-inf, 0]` whose maximum is exactly `0`; a max-times measure has entries
//! in `[0, 1]` with maximum exactly `1`. Evaluation against a function is the
//! weighted join. The componentwise `ln`/`exp` pair carries one model to the
//! other, and the transport map moves an embedded max-times measure along an
//! affine embedding into a max-plus measure on the image.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convexity::{AffineEmbedding, MaxPlusPoint, MaxTimesPoint};
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::semiring::{ExtendedReal, Finite, NegInf, UnitWeight};

/// Normalization snapping tolerance: a maximal weight this close to the unit
/// is snapped to the exact unit, anything further off is rejected.
pub const SNAP_TOLERANCE: f64 = 1e-12;

/// A finite space of pairwise distinct point labels, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FiniteSpace {
    points: Vec<String>,
}

impl FiniteSpace {
    pub fn new<S: Into<String>>(points: Vec<S>) -> Result<Self> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(Error::BadSpace);
        }
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::BadSpace);
            }
        }
        Ok(FiniteSpace { points })
    }

    /// The two-point discrete space `{0, 1}`.
    pub fn two_point() -> Self {
        FiniteSpace::new(vec!["0", "1"]).expect("labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }
}

impl TryFrom<Vec<String>> for FiniteSpace {
    type Error = Error;
    fn try_from(points: Vec<String>) -> Result<Self> {
        FiniteSpace::new(points)
    }
}

impl From<FiniteSpace> for Vec<String> {
    fn from(s: FiniteSpace) -> Vec<String> {
        s.points
    }
}

/// A total map between finite spaces, stored as target indices per source point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceMap {
    source: FiniteSpace,
    target: FiniteSpace,
    images: Vec<usize>,
}

impl SpaceMap {
    pub fn from_fn(
        source: FiniteSpace,
        target: FiniteSpace,
        f: impl Fn(&str) -> String,
    ) -> Result<Self> {
        let images = source
            .points()
            .iter()
            .map(|p| target.index_of(&f(p)))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::PartialMap)?;
        Ok(SpaceMap {
            source,
            target,
            images,
        })
    }

    pub fn identity(space: FiniteSpace) -> Self {
        let images = (0..space.len()).collect();
        SpaceMap {
            source: space.clone(),
            target: space,
            images,
        }
    }

    pub fn compose(&self, after: &SpaceMap) -> Result<SpaceMap> {
        if self.target != after.source {
            return Err(Error::SpaceMismatch);
        }
        Ok(SpaceMap {
            source: self.source.clone(),
            target: after.target.clone(),
            images: self.images.iter().map(|&i| after.images[i]).collect(),
        })
    }

    pub fn source(&self) -> &FiniteSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    pub fn image_index(&self, source_index: usize) -> usize {
        self.images[source_index]
    }
}

/// A real-valued function on a finite space (the desk-scale stand-in for a
/// continuous function on a compactum).
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionOnSpace {
    space: FiniteSpace,
    values: Vec<f64>,
}

impl FunctionOnSpace {
    pub fn new(space: FiniteSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: space.len(),
                right: values.len(),
            });
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NotANumber);
        }
        Ok(FunctionOnSpace { space, values })
    }

    pub fn constant(space: FiniteSpace, c: f64) -> Self {
        let values = vec![c; space.len()];
        FunctionOnSpace { space, values }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise maximum of two functions on the same space.
    pub fn join(&self, other: &FunctionOnSpace) -> Result<FunctionOnSpace> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(FunctionOnSpace {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.max(*b))
                .collect(),
        })
    }
}

fn snap_max_plus(weights: &mut [ExtendedReal]) -> Result<()> {
    let top = weights.iter().copied().fold(NegInf, ExtendedReal::join);
    let Finite(top) = top else {
        return Err(Error::AllBottom);
    };
    if top == 0.0 {
        return Ok(());
    }
    if top.abs() > SNAP_TOLERANCE {
        return Err(Error::NotNormalized(top.abs()));
    }
    // maximal weights inside the snap band collapse onto the unit; so do
    // any positive stragglers below the maximum
    for w in weights.iter_mut() {
        if let Finite(v) = w {
            if *v == top || *v > 0.0 {
                *w = Finite(0.0);
            }
        }
    }
    Ok(())
}

fn snap_max_times(weights: &mut [UnitWeight]) -> Result<()> {
    let top = weights
        .iter()
        .copied()
        .fold(UnitWeight::ZERO, UnitWeight::join);
    if top == UnitWeight::ZERO {
        return Err(Error::AllBottom);
    }
    if top == UnitWeight::ONE {
        return Ok(());
    }
    if (1.0 - top.value()).abs() > SNAP_TOLERANCE {
        return Err(Error::NotNormalized((1.0 - top.value()).abs()));
    }
    for w in weights.iter_mut() {
        if *w == top {
            *w = UnitWeight::ONE;
        }
    }
    Ok(())
}

/// A normalized idempotent measure on a finite space: weights in `[-inf, 0]`
/// with maximum exactly `0`. Bottom-weight atoms are retained so that spaces
/// line up across operations; `prune` drops them explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxPlusMeasure {
    space: FiniteSpace,
    weights: Vec<ExtendedReal>,
}

impl MaxPlusMeasure {
    /// Accepts weights that are already normalized up to the snap tolerance.
    pub fn new(space: FiniteSpace, mut weights: Vec<ExtendedReal>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: space.len(),
                right: weights.len(),
            });
        }
        snap_max_plus(&mut weights)?;
        Ok(MaxPlusMeasure { space, weights })
    }

    /// Normalizes arbitrary raw weights by subtracting their maximum.
    pub fn normalize(space: FiniteSpace, raw: Vec<ExtendedReal>) -> Result<Self> {
        if raw.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: space.len(),
                right: raw.len(),
            });
        }
        let top = raw.iter().copied().fold(NegInf, ExtendedReal::join);
        let Finite(top) = top else {
            return Err(Error::AllBottom);
        };
        let weights = raw
            .into_iter()
            .map(|w| match w {
                NegInf => NegInf,
                Finite(v) => Finite(v - top),
            })
            .collect();
        Ok(MaxPlusMeasure { space, weights })
    }

    pub fn dirac(space: FiniteSpace, label: &str) -> Result<Self> {
        let at = space.index_of(label)?;
        let weights = (0..space.len())
            .map(|i| if i == at { Finite(0.0) } else { NegInf })
            .collect();
        Ok(MaxPlusMeasure { space, weights })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn weights(&self) -> &[ExtendedReal] {
        &self.weights
    }

    /// The stored weight at a point; for finite spaces this is the density.
    pub fn density(&self, label: &str) -> Result<ExtendedReal> {
        Ok(self.weights[self.space.index_of(label)?])
    }

    /// Evaluation `max_x (w(x) + phi(x))`; always finite by normalization.
    pub fn eval(&self, phi: &FunctionOnSpace) -> Result<f64> {
        if phi.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let value = self
            .weights
            .iter()
            .zip(phi.values())
            .map(|(&w, &v)| w.add(Finite(v)))
            .fold(NegInf, ExtendedReal::join);
        Ok(value
            .as_finite()
            .expect("normalized measure has a unit atom"))
    }

    /// Evaluation against an extended-valued function; used by oracles that
    /// feed `ln` of a `[0, 1]`-valued function through the measure.
    pub fn eval_extended(&self, phi: &[ExtendedReal]) -> Result<ExtendedReal> {
        if phi.len() != self.space.len() {
            return Err(Error::LengthMismatch {
                left: self.space.len(),
                right: phi.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(phi)
            .map(|(&w, &v)| w.add(v))
            .fold(NegInf, ExtendedReal::join))
    }

    /// Density extracted through the inf over a decreasing family of bump
    /// functions equal to `0` at the point and to `-k` elsewhere. Converges
    /// to the stored weight in the exponential metric as the floor deepens.
    pub fn density_via_bumps(&self, label: &str, max_floor: u32) -> Result<f64> {
        let at = self.space.index_of(label)?;
        let mut best = f64::INFINITY;
        for k in 0..=max_floor {
            let bump = FunctionOnSpace::new(
                self.space.clone(),
                (0..self.space.len())
                    .map(|i| if i == at { 0.0 } else { -(k as f64) })
                    .collect(),
            )?;
            best = best.min(self.eval(&bump)?);
        }
        Ok(best)
    }

    /// Pushforward along a map of finite spaces: fiberwise join of weights.
    pub fn pushforward(&self, map: &SpaceMap) -> Result<MaxPlusMeasure> {
        if map.source() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let mut weights = vec![NegInf; map.target().len()];
        for (i, &w) in self.weights.iter().enumerate() {
            let j = map.image_index(i);
            weights[j] = weights[j].join(w);
        }
        Ok(MaxPlusMeasure {
            space: map.target().clone(),
            weights,
        })
    }

    /// Drops bottom-weight atoms, shrinking the space accordingly.
    pub fn prune(&self) -> MaxPlusMeasure {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (p, &w) in self.space.points().iter().zip(&self.weights) {
            if !w.is_bottom() {
                points.push(p.clone());
                weights.push(w);
            }
        }
        MaxPlusMeasure {
            space: FiniteSpace::new(points).expect("a normalized measure has a unit atom"),
            weights,
        }
    }

    /// The componentwise exponential: the inverse model change.
    pub fn to_maxtimes(&self) -> MaxTimesMeasure {
        MaxTimesMeasure {
            space: self.space.clone(),
            weights: self
                .weights
                .iter()
                .map(|w| w.to_maxtimes().expect("normalized weights are nonpositive"))
                .collect(),
        }
    }

    /// The weight vector as a point of `R_max^{|X|}`: the coordinates of the
    /// measure inside the simplex of measures.
    pub fn weight_point(&self) -> MaxPlusPoint {
        MaxPlusPoint::new(self.weights.clone())
    }

    pub fn from_weight_point(space: FiniteSpace, point: &MaxPlusPoint) -> Result<Self> {
        MaxPlusMeasure::new(space, point.coords().to_vec())
    }
}

/// A normalized max-times measure on a finite space: weights in `[0, 1]`
/// with maximum exactly `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxTimesMeasure {
    space: FiniteSpace,
    weights: Vec<UnitWeight>,
}

impl MaxTimesMeasure {
    pub fn new(space: FiniteSpace, mut weights: Vec<UnitWeight>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: space.len(),
                right: weights.len(),
            });
        }
        snap_max_times(&mut weights)?;
        Ok(MaxTimesMeasure { space, weights })
    }

    /// Normalizes arbitrary nonnegative raw weights by dividing by their maximum.
    pub fn normalize(space: FiniteSpace, raw: Vec<f64>) -> Result<Self> {
        if raw.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: space.len(),
                right: raw.len(),
            });
        }
        if raw.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::NotANumber);
        }
        let top = raw.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            return Err(Error::AllBottom);
        }
        let weights = raw
            .into_iter()
            .map(|v| UnitWeight::new((v / top).min(1.0)).expect("ratio clamped to the unit"))
            .collect();
        Ok(MaxTimesMeasure { space, weights })
    }

    pub fn dirac(space: FiniteSpace, label: &str) -> Result<Self> {
        let at = space.index_of(label)?;
        let weights = (0..space.len())
            .map(|i| {
                if i == at {
                    UnitWeight::ONE
                } else {
                    UnitWeight::ZERO
                }
            })
            .collect();
        Ok(MaxTimesMeasure { space, weights })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn weights(&self) -> &[UnitWeight] {
        &self.weights
    }

    pub fn density(&self, label: &str) -> Result<UnitWeight> {
        Ok(self.weights[self.space.index_of(label)?])
    }

    /// Evaluation `max_x (w(x) * phi(x))` for a `[0, 1]`-valued function.
    pub fn eval(&self, phi: &FunctionOnSpace) -> Result<f64> {
        if phi.space() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        if let Some(&bad) = phi.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::FunctionRange(bad));
        }
        Ok(self
            .weights
            .iter()
            .zip(phi.values())
            .map(|(w, &v)| w.value() * v)
            .fold(0.0, f64::max))
    }

    /// Density via the inf over bump functions equal to `1` at the point and
    /// to `e^{-k}` elsewhere; converges to the stored weight as `k` grows.
    pub fn density_via_bumps(&self, label: &str, max_floor: u32) -> Result<f64> {
        let at = self.space.index_of(label)?;
        let mut best = f64::INFINITY;
        for k in 0..=max_floor {
            let floor = (-(k as f64)).exp();
            let bump = FunctionOnSpace::new(
                self.space.clone(),
                (0..self.space.len())
                    .map(|i| if i == at { 1.0 } else { floor })
                    .collect(),
            )?;
            best = best.min(self.eval(&bump)?);
        }
        Ok(best)
    }

    pub fn pushforward(&self, map: &SpaceMap) -> Result<MaxTimesMeasure> {
        if map.source() != &self.space {
            return Err(Error::SpaceMismatch);
        }
        let mut weights = vec![UnitWeight::ZERO; map.target().len()];
        for (i, &w) in self.weights.iter().enumerate() {
            let j = map.image_index(i);
            weights[j] = weights[j].join(w);
        }
        Ok(MaxTimesMeasure {
            space: map.target().clone(),
            weights,
        })
    }

    pub fn prune(&self) -> MaxTimesMeasure {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (p, &w) in self.space.points().iter().zip(&self.weights) {
            if w != UnitWeight::ZERO {
                points.push(p.clone());
                weights.push(w);
            }
        }
        MaxTimesMeasure {
            space: FiniteSpace::new(points).expect("a normalized measure has a unit atom"),
            weights,
        }
    }

    /// The componentwise logarithm: the homeomorphism onto the max-plus model.
    pub fn to_maxplus(&self) -> MaxPlusMeasure {
        MaxPlusMeasure {
            space: self.space.clone(),
            weights: self.weights.iter().map(|w| w.to_maxplus()).collect(),
        }
    }

    pub fn weight_point(&self) -> MaxTimesPoint {
        MaxTimesPoint::new(self.weights.clone())
    }

    pub fn from_weight_point(space: FiniteSpace, point: &MaxTimesPoint) -> Result<Self> {
        MaxTimesMeasure::new(space, point.coords().to_vec())
    }
}

/// A finitely-supported measure whose atoms are points of `R_max^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxPlusPointMeasure {
    atoms: Vec<MaxPlusPoint>,
    weights: Vec<ExtendedReal>,
}

impl MaxPlusPointMeasure {
    pub fn new(atoms: Vec<MaxPlusPoint>, mut weights: Vec<ExtendedReal>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: atoms.len(),
                right: weights.len(),
            });
        }
        let dim = atoms[0].dim();
        for a in &atoms {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.dim(),
                });
            }
        }
        snap_max_plus(&mut weights)?;
        Ok(MaxPlusPointMeasure { atoms, weights })
    }

    pub fn dirac(atom: MaxPlusPoint) -> Self {
        MaxPlusPointMeasure {
            atoms: vec![atom],
            weights: vec![Finite(0.0)],
        }
    }

    pub fn atoms(&self) -> &[MaxPlusPoint] {
        &self.atoms
    }

    pub fn weights(&self) -> &[ExtendedReal] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    /// Pushforward along a point map; coinciding image atoms merge by join.
    pub fn map_atoms(&self, f: impl Fn(&MaxPlusPoint) -> MaxPlusPoint) -> Result<Self> {
        let mut atoms: Vec<MaxPlusPoint> = Vec::new();
        let mut weights: Vec<ExtendedReal> = Vec::new();
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            let image = f(a);
            if let Some(at) = atoms.iter().position(|b| *b == image) {
                weights[at] = weights[at].join(w);
            } else {
                atoms.push(image);
                weights.push(w);
            }
        }
        MaxPlusPointMeasure::new(atoms, weights)
    }
}

/// A finitely-supported measure whose atoms are points of `[0, 1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxTimesPointMeasure {
    atoms: Vec<MaxTimesPoint>,
    weights: Vec<UnitWeight>,
}

impl MaxTimesPointMeasure {
    pub fn new(atoms: Vec<MaxTimesPoint>, mut weights: Vec<UnitWeight>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: atoms.len(),
                right: weights.len(),
            });
        }
        let dim = atoms[0].dim();
        for a in &atoms {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.dim(),
                });
            }
        }
        snap_max_times(&mut weights)?;
        Ok(MaxTimesPointMeasure { atoms, weights })
    }

    pub fn dirac(atom: MaxTimesPoint) -> Self {
        MaxTimesPointMeasure {
            atoms: vec![atom],
            weights: vec![UnitWeight::ONE],
        }
    }

    pub fn atoms(&self) -> &[MaxTimesPoint] {
        &self.atoms
    }

    pub fn weights(&self) -> &[UnitWeight] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn map_atoms(&self, f: impl Fn(&MaxTimesPoint) -> MaxTimesPoint) -> Result<Self> {
        let mut atoms: Vec<MaxTimesPoint> = Vec::new();
        let mut weights: Vec<UnitWeight> = Vec::new();
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            let image = f(a);
            if let Some(at) = atoms.iter().position(|b| *b == image) {
                weights[at] = weights[at].join(w);
            } else {
                atoms.push(image);
                weights.push(w);
            }
        }
        MaxTimesPointMeasure::new(atoms, weights)
    }

    /// Transport along an affine embedding: atoms through the embedding,
    /// weights through `ln`. Coinciding image atoms merge by join, so the
    /// result agrees with pushforward-after-model-change even when the
    /// embedding identifies atoms.
    pub fn transport(&self, h: &AffineEmbedding) -> Result<MaxPlusPointMeasure> {
        let mut atoms: Vec<MaxPlusPoint> = Vec::new();
        let mut weights: Vec<ExtendedReal> = Vec::new();
        for (i, (a, &w)) in self.atoms.iter().zip(&self.weights).enumerate() {
            let image = h.apply(a).map_err(|_| Error::AtomOutsideDomain(i))?;
            let lw = w.to_maxplus();
            if let Some(at) = atoms.iter().position(|b| *b == image) {
                weights[at] = weights[at].join(lw);
            } else {
                atoms.push(image);
                weights.push(lw);
            }
        }
        MaxPlusPointMeasure::new(atoms, weights)
    }
}

// ---------------------------------------------------------------------------
// JSON round trips
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "model")]
enum LabeledRepr {
    #[serde(rename = "max-plus")]
    MaxPlus {
        space: Vec<String>,
        weights: BTreeMap<String, ExtendedReal>,
    },
    #[serde(rename = "max-times")]
    MaxTimes {
        space: Vec<String>,
        weights: BTreeMap<String, UnitWeight>,
    },
}

/// Either labeled measure, as read from or written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LabeledRepr", into = "LabeledRepr")]
pub enum LabeledMeasure {
    MaxPlus(MaxPlusMeasure),
    MaxTimes(MaxTimesMeasure),
}

impl TryFrom<LabeledRepr> for LabeledMeasure {
    type Error = Error;
    fn try_from(repr: LabeledRepr) -> Result<Self> {
        match repr {
            LabeledRepr::MaxPlus { space, weights } => {
                let space = FiniteSpace::new(space)?;
                let w = space
                    .points()
                    .iter()
                    .map(|p| {
                        weights
                            .get(p)
                            .copied()
                            .ok_or_else(|| Error::UnknownPoint(p.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if weights.len() != space.len() {
                    return Err(Error::BadSpace);
                }
                Ok(LabeledMeasure::MaxPlus(MaxPlusMeasure::new(space, w)?))
            }
            LabeledRepr::MaxTimes { space, weights } => {
                let space = FiniteSpace::new(space)?;
                let w = space
                    .points()
                    .iter()
                    .map(|p| {
                        weights
                            .get(p)
                            .copied()
                            .ok_or_else(|| Error::UnknownPoint(p.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if weights.len() != space.len() {
                    return Err(Error::BadSpace);
                }
                Ok(LabeledMeasure::MaxTimes(MaxTimesMeasure::new(space, w)?))
            }
        }
    }
}

impl From<LabeledMeasure> for LabeledRepr {
    fn from(m: LabeledMeasure) -> LabeledRepr {
        match m {
            LabeledMeasure::MaxPlus(m) => LabeledRepr::MaxPlus {
                weights: m
                    .space
                    .points()
                    .iter()
                    .cloned()
                    .zip(m.weights.iter().copied())
                    .collect(),
                space: m.space.points.clone(),
            },
            LabeledMeasure::MaxTimes(m) => LabeledRepr::MaxTimes {
                weights: m
                    .space
                    .points()
                    .iter()
                    .cloned()
                    .zip(m.weights.iter().copied())
                    .collect(),
                space: m.space.points.clone(),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "model")]
enum PointMeasureRepr {
    #[serde(rename = "max-plus")]
    MaxPlus {
        atoms: Vec<Vec<ExtendedReal>>,
        weights: Vec<ExtendedReal>,
    },
    #[serde(rename = "max-times")]
    MaxTimes {
        atoms: Vec<Vec<f64>>,
        weights: Vec<UnitWeight>,
    },
}

/// Either embedded point measure, as read from or written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointMeasureRepr", into = "PointMeasureRepr")]
pub enum PointMeasure {
    MaxPlus(MaxPlusPointMeasure),
    MaxTimes(MaxTimesPointMeasure),
}

impl TryFrom<PointMeasureRepr> for PointMeasure {
    type Error = Error;
    fn try_from(repr: PointMeasureRepr) -> Result<Self> {
        match repr {
            PointMeasureRepr::MaxPlus { atoms, weights } => {
                Ok(PointMeasure::MaxPlus(MaxPlusPointMeasure::new(
                    atoms.into_iter().map(MaxPlusPoint::new).collect(),
                    weights,
                )?))
            }
            PointMeasureRepr::MaxTimes { atoms, weights } => {
                Ok(PointMeasure::MaxTimes(MaxTimesPointMeasure::new(
                    atoms
                        .iter()
                        .map(|a| MaxTimesPoint::from_values(a))
                        .collect::<Result<_>>()?,
                    weights,
                )?))
            }
        }
    }
}

impl From<PointMeasure> for PointMeasureRepr {
    fn from(m: PointMeasure) -> PointMeasureRepr {
        match m {
            PointMeasure::MaxPlus(m) => PointMeasureRepr::MaxPlus {
                atoms: m.atoms.iter().map(|a| a.coords().to_vec()).collect(),
                weights: m.weights,
            },
            PointMeasure::MaxTimes(m) => PointMeasureRepr::MaxTimes {
                atoms: m.atoms.iter().map(|a| a.values()).collect(),
                weights: m.weights,
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Invariant suites
// ---------------------------------------------------------------------------

fn random_space(rng: &mut ChaCha8Rng, max_points: usize) -> FiniteSpace {
    let n = rng.random_range(1..=max_points);
    FiniteSpace::new((0..n).map(|i| format!("p{i}")).collect::<Vec<_>>())
        .expect("generated labels are distinct")
}

fn dyadic(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    rng.random_range(lo..=hi) as f64 / 16.0
}

fn random_mp_measure(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> MaxPlusMeasure {
    loop {
        let raw: Vec<ExtendedReal> = (0..space.len())
            .map(|_| {
                if rng.random_range(0..6) == 0 {
                    NegInf
                } else {
                    Finite(dyadic(rng, -64, 0))
                }
            })
            .collect();
        if raw.iter().any(|w| !w.is_bottom()) {
            return MaxPlusMeasure::normalize(space.clone(), raw).expect("has a finite weight");
        }
    }
}

fn random_mt_measure(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> MaxTimesMeasure {
    loop {
        let raw: Vec<f64> = (0..space.len())
            .map(|_| {
                if rng.random_range(0..6) == 0 {
                    0.0
                } else {
                    rng.random_range(0.0..=1.0)
                }
            })
            .collect();
        if raw.iter().any(|v| *v > 0.0) {
            return MaxTimesMeasure::normalize(space.clone(), raw).expect("has a positive weight");
        }
    }
}

/// Max-plus measure axioms on random dyadic data, checked exactly:
/// normalization of constants, shift equivariance, and join preservation.
pub fn check_axioms_max_plus(measures: u64, functions_each: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..measures {
        let space = random_space(&mut rng, 4);
        let mu = random_mp_measure(&mut rng, &space);
        for _ in 0..functions_each {
            let phi = FunctionOnSpace::new(
                space.clone(),
                (0..space.len())
                    .map(|_| dyadic(&mut rng, -64, 64))
                    .collect(),
            )
            .expect("lengths match");
            let psi = FunctionOnSpace::new(
                space.clone(),
                (0..space.len())
                    .map(|_| dyadic(&mut rng, -64, 64))
                    .collect(),
            )
            .expect("lengths match");
            let c = dyadic(&mut rng, -32, 32);

            let shifted =
                FunctionOnSpace::new(space.clone(), phi.values().iter().map(|v| c + v).collect())
                    .expect("lengths match");
            let lhs = mu.eval(&shifted).expect("same space");
            let rhs = c + mu.eval(&phi).expect("same space");
            report.record_exact(lhs == rhs, || format!("shift: mu={:?} c={c}", mu.weights()));

            let join = phi.join(&psi).expect("same space");
            let lhs = mu.eval(&join).expect("same space");
            let rhs = mu
                .eval(&phi)
                .expect("same space")
                .max(mu.eval(&psi).expect("same space"));
            report.record_exact(lhs == rhs, || format!("join: mu={:?}", mu.weights()));

            let zero = FunctionOnSpace::constant(space.clone(), 0.0);
            report.record_exact(mu.eval(&zero).expect("same space") == 0.0, || {
                format!("unit: mu={:?}", mu.weights())
            });
        }
    }
    report
}

/// Max-times measure axioms on random data: unit normalization and join
/// preservation exactly, scalar homogeneity within `tolerance`.
pub fn check_axioms_max_times(
    measures: u64,
    functions_each: u64,
    tolerance: f64,
    seed: u64,
) -> CheckReport {
    let mut report = CheckReport::new(tolerance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..measures {
        let space = random_space(&mut rng, 4);
        let nu = random_mt_measure(&mut rng, &space);
        for _ in 0..functions_each {
            let phi = FunctionOnSpace::new(
                space.clone(),
                (0..space.len())
                    .map(|_| rng.random_range(0.0..=1.0))
                    .collect(),
            )
            .expect("lengths match");
            let psi = FunctionOnSpace::new(
                space.clone(),
                (0..space.len())
                    .map(|_| rng.random_range(0.0..=1.0))
                    .collect(),
            )
            .expect("lengths match");
            let c: f64 = rng.random_range(0.0..=1.0);

            let ones = FunctionOnSpace::constant(space.clone(), 1.0);
            let unit_gap = (nu.eval(&ones).expect("same space") - 1.0).abs();
            report.record(unit_gap, || format!("unit: nu={:?}", nu.weights()));

            let scaled =
                FunctionOnSpace::new(space.clone(), phi.values().iter().map(|v| c * v).collect())
                    .expect("lengths match");
            let lhs = nu.eval(&scaled).expect("same space");
            let rhs = c * nu.eval(&phi).expect("same space");
            report.record((lhs - rhs).abs(), || {
                format!("scale: nu={:?} c={c}", nu.weights())
            });

            let join = phi.join(&psi).expect("same space");
            let lhs = nu.eval(&join).expect("same space");
            let rhs = nu
                .eval(&phi)
                .expect("same space")
                .max(nu.eval(&psi).expect("same space"));
            report.record((lhs - rhs).abs(), || format!("join: nu={:?}", nu.weights()));
        }
    }
    report
}

/// Functional form of the model-change homeomorphism:
/// `ln(nu(phi)) = (ln nu)(ln phi)`, compared in the exponential metric.
pub fn check_model_change_functional(trials: u64, tolerance: f64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(tolerance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let space = random_space(&mut rng, 4);
        let nu = random_mt_measure(&mut rng, &space);
        let phi_values: Vec<f64> = (0..space.len())
            .map(|_| {
                if rng.random_range(0..5) == 0 {
                    0.0
                } else {
                    rng.random_range(0.0..=1.0)
                }
            })
            .collect();
        let phi = FunctionOnSpace::new(space.clone(), phi_values.clone()).expect("lengths match");
        let direct = nu.eval(&phi).expect("same space");
        let ln_phi: Vec<ExtendedReal> = phi_values
            .iter()
            .map(|&v| UnitWeight::new(v).expect("sampled in range").to_maxplus())
            .collect();
        let transported = nu
            .to_maxplus()
            .eval_extended(&ln_phi)
            .expect("lengths match");
        let gap = (direct - transported.exp()).abs();
        report.record(gap, || {
            format!("nu={:?} phi={:?}", nu.weights(), phi_values)
        });
    }
    report
}

/// Transport along a covering embedding agrees with model change plus
/// pushforward exactly on atoms, and with the bump-function density oracle
/// in the exponential metric.
pub fn check_transport_agreement(trials: u64, tolerance: f64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(tolerance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'trial: for _ in 0..trials {
        let dim = rng.random_range(1..=3);
        let atom_count = rng.random_range(1..=4);
        let mut atoms = Vec::with_capacity(atom_count);
        for _ in 0..atom_count {
            let coords: Vec<f64> = (0..dim)
                .map(|_| {
                    if rng.random_range(0..6) == 0 {
                        0.0
                    } else {
                        rng.random_range(0.0..=1.0)
                    }
                })
                .collect();
            let p = MaxTimesPoint::from_values(&coords).expect("sampled in range");
            if atoms.contains(&p) {
                continue 'trial;
            }
            atoms.push(p);
        }
        let mut raw: Vec<f64> = (0..atom_count)
            .map(|_| rng.random_range(0.0..=1.0))
            .collect();
        let pick = rng.random_range(0..atom_count);
        raw[pick] = 1.0;
        let weights: Vec<UnitWeight> = raw
            .iter()
            .map(|&v| UnitWeight::new(v).expect("sampled in range"))
            .collect();
        let nu = MaxTimesPointMeasure::new(atoms.clone(), weights.clone()).expect("normalized");

        let h = AffineEmbedding::covering(&atoms, dim);
        let transported = nu.transport(&h).expect("atoms fit the embedding");

        // route B: model change on the labeled view, then atom relabeling
        let space = FiniteSpace::new((0..atom_count).map(|i| format!("a{i}")).collect::<Vec<_>>())
            .expect("labels distinct");
        let labeled = MaxTimesMeasure::new(space.clone(), weights.clone()).expect("normalized");
        let changed = labeled.to_maxplus();
        let mut exact = transported.atoms().len() == atom_count;
        if exact {
            for (i, (ta, tw)) in transported
                .atoms()
                .iter()
                .zip(transported.weights())
                .enumerate()
            {
                exact &= *ta == h.apply(&atoms[i]).expect("atom fits");
                exact &= *tw == changed.weights()[i];
            }
        }
        report.record_exact(exact, || format!("atoms={atom_count} dim={dim}"));

        // route C: bump-function density oracle, compared exponentially
        for (i, tw) in transported.weights().iter().enumerate() {
            let bump = labeled
                .density_via_bumps(&format!("a{i}"), 40)
                .expect("label exists");
            let gap = (bump - tw.exp()).abs();
            report.record(gap, || format!("bump at atom {i}: {:?}", weights));
        }
    }
    report
}
