//! Source and target geometry for the openness probe.
//!
//! Everything runs in *metric coordinates*: max-times coordinates as-is, and
//! the exponential of max-plus coordinates, so that the flavor metric is the
//! sup of absolute coordinate differences in both models and the bottom
//! element becomes the ordinary point `0`. In these coordinates a convex
//! combination of either flavor is `max_i (lambda_i * g_i)` with weights
//! joined to `1`, which lets one residuation routine serve both models.
//!
//! A product domain is parameterized by the per-factor weight vectors. The
//! normalization stratum (which weight is pinned at `1`) is enumerated
//! separately, so grids and searches respect the L-shaped geometry instead
//! of sampling through it.

use serde::{Deserialize, Serialize};

use crate::convexity::{Flavor, TropicalPolytope};
use crate::error::{Error, Result};
use crate::semiring::{ExtendedReal, Finite, NegInf};

/// One factor of a probe source domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainComponent {
    /// The L-shaped space of binary combination weights of the map flavor.
    /// In metric coordinates it is the two-generator simplex.
    ComboWeights(ComboWeightsTag),
    /// A tropical polytope factor.
    Polytope(TropicalPolytope),
}

/// Serde token for the combo-weights component: the string "combo-weights".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ComboWeightsTag {
    #[serde(rename = "combo-weights")]
    ComboWeights,
}

impl DomainComponent {
    pub fn combo_weights() -> Self {
        DomainComponent::ComboWeights(ComboWeightsTag::ComboWeights)
    }
}

/// Metric-coordinate generator matrix of a polytope (rows are generators).
fn metric_generators(poly: &TropicalPolytope) -> Vec<Vec<f64>> {
    match poly {
        TropicalPolytope::MaxPlus(gens) => gens
            .iter()
            .map(|g| g.coords().iter().map(|c| c.exp()).collect())
            .collect(),
        TropicalPolytope::MaxTimes(gens) => gens.iter().map(|g| g.values()).collect(),
    }
}

/// Converts flavored coordinates to metric coordinates.
pub fn to_metric(flavor: Flavor, coords: &[ExtendedReal]) -> Result<Vec<f64>> {
    match flavor {
        Flavor::MaxPlus => Ok(coords.iter().map(|c| c.exp()).collect()),
        Flavor::MaxTimes => coords
            .iter()
            .map(|c| match c {
                NegInf => Err(Error::FlavorMismatch),
                Finite(v) if (0.0..=1.0).contains(v) => Ok(*v),
                Finite(v) => Err(Error::UnitRange(*v)),
            })
            .collect(),
    }
}

/// Converts metric coordinates back to flavored coordinates; in the max-plus
/// model an exact metric `0` decodes to the bottom element.
pub fn from_metric(flavor: Flavor, metric: &[f64]) -> Vec<ExtendedReal> {
    match flavor {
        Flavor::MaxPlus => metric
            .iter()
            .map(|&v| if v == 0.0 { NegInf } else { Finite(v.ln()) })
            .collect(),
        Flavor::MaxTimes => metric.iter().map(|&v| Finite(v)).collect(),
    }
}

/// Sup-metric distance between metric coordinate vectors.
pub fn metric_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `max_i (lambda_i * g_ij)` over the generator rows.
pub fn decode_combination(lambda: &[f64], gens: &[Vec<f64>]) -> Vec<f64> {
    let dim = gens[0].len();
    (0..dim)
        .map(|j| {
            lambda
                .iter()
                .zip(gens)
                .map(|(l, g)| l * g[j])
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Residuation weights of a metric point against metric generators, clamped
/// to the unit: the largest weights whose combination sits below the point.
pub fn residuation_weights(point: &[f64], gens: &[Vec<f64>]) -> Vec<f64> {
    gens.iter()
        .map(|g| {
            let mut bound = f64::INFINITY;
            for (p, v) in point.iter().zip(g) {
                if *v == 0.0 {
                    continue;
                }
                if *p == 0.0 {
                    return 0.0;
                }
                bound = bound.min(p / v);
            }
            bound.min(1.0)
        })
        .collect()
}

/// One polytope factor in parameter form.
#[derive(Debug, Clone)]
pub struct Block {
    gens: Vec<Vec<f64>>,
    /// First ambient coordinate of this factor.
    pub coord_offset: usize,
    /// First parameter (weight) index of this factor.
    pub param_offset: usize,
    /// Lipschitz bound of the residuation-weight map of this factor.
    pub proj_lipschitz: f64,
    /// Lipschitz bound of the decode map (largest generator coordinate).
    pub decode_lipschitz: f64,
}

impl Block {
    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    pub fn dim(&self) -> usize {
        self.gens[0].len()
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.gens
    }

    /// Upper bound of one ambient coordinate over the factor.
    pub fn coord_upper(&self, local_j: usize) -> f64 {
        self.gens.iter().map(|g| g[local_j]).fold(0.0, f64::max)
    }
}

/// A product of polytope factors in weight parameterization.
#[derive(Debug, Clone)]
pub struct ParamDomain {
    flavor: Flavor,
    blocks: Vec<Block>,
    ambient_dim: usize,
    param_dim: usize,
}

impl ParamDomain {
    pub fn new(flavor: Flavor, components: &[DomainComponent]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        let mut blocks = Vec::new();
        let mut coord_offset = 0;
        let mut param_offset = 0;
        for component in components {
            let poly = match component {
                DomainComponent::Polytope(p) => {
                    if p.flavor() != flavor {
                        return Err(Error::FlavorMismatch);
                    }
                    p.clone()
                }
                DomainComponent::ComboWeights(_) => match flavor {
                    Flavor::MaxPlus => TropicalPolytope::max_plus_simplex(2),
                    Flavor::MaxTimes => TropicalPolytope::max_times_simplex(2),
                },
            };
            let gens = metric_generators(&poly);
            let mut min_positive = f64::INFINITY;
            let mut max_coord = 0.0f64;
            for g in &gens {
                for &v in g {
                    if v > 0.0 {
                        min_positive = min_positive.min(v);
                    }
                    max_coord = max_coord.max(v);
                }
            }
            let proj_lipschitz = if min_positive.is_finite() {
                1.0 / min_positive
            } else {
                0.0
            };
            let dim = gens[0].len();
            let count = gens.len();
            blocks.push(Block {
                gens,
                coord_offset,
                param_offset,
                proj_lipschitz,
                decode_lipschitz: max_coord,
            });
            coord_offset += dim;
            param_offset += count;
        }
        Ok(ParamDomain {
            flavor,
            blocks,
            ambient_dim: coord_offset,
            param_dim: param_offset,
        })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn decode_lipschitz(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.decode_lipschitz)
            .fold(0.0, f64::max)
    }

    /// Upper bound of an ambient coordinate over the domain.
    pub fn coord_upper(&self, j: usize) -> f64 {
        for b in &self.blocks {
            if j >= b.coord_offset && j < b.coord_offset + b.dim() {
                return b.coord_upper(j - b.coord_offset);
            }
        }
        0.0
    }

    /// Metric point of a full parameter vector.
    pub fn decode(&self, params: &[f64]) -> Vec<f64> {
        let mut point = Vec::with_capacity(self.ambient_dim);
        for b in &self.blocks {
            let lambda = &params[b.param_offset..b.param_offset + b.generator_count()];
            point.extend(decode_combination(lambda, &b.gens));
        }
        point
    }

    /// Canonical parameters of a metric point: per-factor residuation weights.
    pub fn canonical_params(&self, point: &[f64]) -> Vec<f64> {
        let mut params = Vec::with_capacity(self.param_dim);
        for b in &self.blocks {
            let slice = &point[b.coord_offset..b.coord_offset + b.dim()];
            params.extend(residuation_weights(slice, &b.gens));
        }
        params
    }

    /// Factor-wise membership: the canonical parameters must reproduce the
    /// point and join to the unit within `tol` on every factor.
    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        if point.len() != self.ambient_dim {
            return false;
        }
        for b in &self.blocks {
            let slice = &point[b.coord_offset..b.coord_offset + b.dim()];
            let lambda = residuation_weights(slice, &b.gens);
            let top = lambda.iter().copied().fold(0.0, f64::max);
            if (1.0 - top).abs() > tol {
                return false;
            }
            let back = decode_combination(&lambda, &b.gens);
            if metric_distance(&back, slice) > tol {
                return false;
            }
        }
        true
    }

    /// Per-factor normalization strata admissible for points within `eps`
    /// of the given center parameters: every stratum whose pinned weight can
    /// reach the unit inside the ball, by the residuation Lipschitz bound.
    pub fn admissible_strata(&self, center: &[f64], eps: f64) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| {
                let radius = b.proj_lipschitz * eps;
                let lambda = &center[b.param_offset..b.param_offset + b.generator_count()];
                let mut strata: Vec<usize> = (0..b.generator_count())
                    .filter(|&i| lambda[i] >= 1.0 - radius - 1e-12)
                    .collect();
                if strata.is_empty() {
                    // fall back to the largest weight
                    let best = lambda
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.partial_cmp(b.1).expect("weights are not NaN"))
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    strata.push(best);
                }
                strata
            })
            .collect()
    }

    /// Parameter window (per weight) for the `eps`-ball around the center,
    /// clipped to `[0, 1]`.
    pub fn param_window(&self, center: &[f64], eps: f64) -> Vec<(f64, f64)> {
        let mut window = Vec::with_capacity(self.param_dim);
        for b in &self.blocks {
            let radius = b.proj_lipschitz * eps;
            for i in 0..b.generator_count() {
                let c = center[b.param_offset + i];
                window.push(((c - radius).max(0.0), (c + radius).min(1.0)));
            }
        }
        window
    }

    /// Pins the stratum weights of a parameter vector to exactly the unit.
    pub fn pin_strata(&self, params: &mut [f64], strata: &[usize]) {
        for (b, &s) in self.blocks.iter().zip(strata) {
            params[b.param_offset + s] = 1.0;
        }
    }
}

/// Target-side geometry: membership and the normalized projection used to
/// sample target points inside the domain.
#[derive(Debug, Clone)]
pub struct TargetGeometry {
    gens: Vec<Vec<f64>>,
    dim: usize,
}

impl TargetGeometry {
    pub fn new(poly: &TropicalPolytope) -> Self {
        let gens = metric_generators(poly);
        let dim = gens[0].len();
        TargetGeometry { gens, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> bool {
        let lambda = residuation_weights(point, &self.gens);
        let top = lambda.iter().copied().fold(0.0, f64::max);
        if (1.0 - top).abs() > tol {
            return false;
        }
        metric_distance(&decode_combination(&lambda, &self.gens), point) <= tol
    }

    /// Projects an arbitrary metric point into the hull: residuation weights
    /// renormalized to join at the unit, then decoded.
    pub fn project(&self, point: &[f64]) -> Vec<f64> {
        let lambda = residuation_weights(point, &self.gens);
        let top = lambda.iter().copied().fold(0.0, f64::max);
        if top <= 0.0 {
            // degenerate query; land on the nearest generator
            return self
                .gens
                .iter()
                .min_by(|a, b| {
                    metric_distance(a, point)
                        .partial_cmp(&metric_distance(b, point))
                        .expect("distances are not NaN")
                })
                .expect("polytopes are nonempty")
                .clone();
        }
        let normalized: Vec<f64> = lambda.iter().map(|l| (l / top).min(1.0)).collect();
        decode_combination(&normalized, &self.gens)
    }
}
