//! Numerical epsilon-delta openness probing of piecewise tropical-linear
//! maps between compact coordinate domains.
//!
//! The probe is a semi-decision procedure and every report carries that
//! asymmetry: an `open-evidence` record says sampled targets in shrinking
//! balls around the image were all reached from inside the source ball,
//! while a `witness` record is a certificate, checked on a Lipschitz-sound
//! grid, that some nearby target has no nearby preimage at all.

mod certify;
mod domain;
mod map;
mod search;

pub use certify::{certify_no_preimage, Certification};
pub use domain::{
    from_metric, metric_distance, to_metric, DomainComponent, ParamDomain, TargetGeometry,
};
pub use map::{BinaryBarycenterMap, Expr, PiecewiseMapSpec, ProbeMap};
pub use search::{find_preimage, halton, strata_combos, SearchOutcome, HALTON_BASES};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convexity::TropicalPolytope;
use crate::error::{Error, Result};
use crate::semiring::ExtendedReal;

/// Probe configuration. Distances are in the flavor metric: absolute
/// differences of max-times coordinates, exponential differences of
/// max-plus coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    /// Radius of the source ball.
    pub epsilon: f64,
    /// Strictly decreasing target radii, probed from the largest down.
    pub delta_ladder: Vec<f64>,
    /// Target samples per delta.
    pub target_samples: usize,
    /// Resolution floor of the certification grid.
    pub grid_resolution: f64,
    /// Distance at which a target counts as reached.
    pub tolerance: f64,
    /// Number of sampled domain points for a whole-map probe.
    pub point_samples: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            epsilon: 0.05,
            delta_ladder: vec![0.04, 0.02, 0.01, 0.005],
            target_samples: 64,
            grid_resolution: 1e-3,
            tolerance: 1e-6,
            point_samples: 100,
            seed: 0,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.epsilon > 0.0
            && self.grid_resolution > 0.0
            && self.tolerance > 0.0
            && self.target_samples > 0
            && !self.delta_ladder.is_empty();
        if !positive {
            return Err(Error::InvalidConfig(
                "epsilon, resolution, tolerance, ladder and sample counts must be positive".into(),
            ));
        }
        for w in self.delta_ladder.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::InvalidConfig(
                    "delta ladder must be strictly decreasing".into(),
                ));
            }
        }
        if self.delta_ladder.iter().any(|d| *d <= 0.0) {
            return Err(Error::InvalidConfig("delta values must be positive".into()));
        }
        Ok(())
    }
}

/// Coverage statistics for one rung of the delta ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaCoverage {
    pub delta: f64,
    pub targets: usize,
    pub covered: usize,
}

/// A certified non-openness witness with everything needed to re-verify it
/// independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    /// Source point, in flavor coordinates.
    pub point: Vec<ExtendedReal>,
    /// Unreached target point, in flavor coordinates.
    pub target: Vec<ExtendedReal>,
    pub epsilon: f64,
    /// Ladder rung at which the target was sampled.
    pub delta: f64,
    /// Distance from the target to the image of the source point.
    pub distance_to_image: f64,
    /// Certified lower bound on the distance from the target to the image
    /// of the epsilon-ball.
    pub margin: f64,
    pub tolerance: f64,
    pub resolution: f64,
    /// Lipschitz bound (metric coordinates, through the parameterization)
    /// used for the grid slack.
    pub lipschitz: f64,
    pub strata_checked: usize,
    pub cells_checked: u64,
}

/// Outcome of probing one source point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum PointVerdict {
    /// Every sampled target at radius `delta_star` was reached from inside
    /// the source ball. Evidence, not a proof of openness.
    #[serde(rename = "open-evidence")]
    OpenEvidence {
        point: Vec<ExtendedReal>,
        delta_star: f64,
        coverage: Vec<DeltaCoverage>,
    },
    #[serde(rename = "witness")]
    Witness(WitnessCertificate),
    /// Certification hit its resolution floor without settling the point.
    #[serde(rename = "inconclusive")]
    Inconclusive {
        point: Vec<ExtendedReal>,
        resolution: f64,
        detail: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictClass {
    #[serde(rename = "open-evidence")]
    OpenEvidence,
    #[serde(rename = "witness")]
    Witness,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl PointVerdict {
    pub fn class(&self) -> VerdictClass {
        match self {
            PointVerdict::OpenEvidence { .. } => VerdictClass::OpenEvidence,
            PointVerdict::Witness(_) => VerdictClass::Witness,
            PointVerdict::Inconclusive { .. } => VerdictClass::Inconclusive,
        }
    }
}

/// Aggregated probe verdict over sampled and pinned points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeVerdict {
    pub map: String,
    /// The probe's contract in one line, repeated in every report.
    pub semantics: String,
    pub config: ProbeConfig,
    pub open_evidence: usize,
    pub witnesses: usize,
    pub inconclusive: usize,
    pub records: Vec<PointVerdict>,
}

const SEMANTICS: &str = "open-evidence is sampling evidence, not proof; \
a witness is a certified obstruction at the stated grid resolution";

impl ProbeVerdict {
    pub fn has_witness(&self) -> bool {
        self.witnesses > 0
    }

    pub fn has_inconclusive(&self) -> bool {
        self.inconclusive > 0
    }

    pub fn first_witness(&self) -> Option<&WitnessCertificate> {
        self.records.iter().find_map(|r| match r {
            PointVerdict::Witness(w) => Some(w),
            _ => None,
        })
    }
}

fn point_rng(cfg: &ProbeConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ (salt + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Samples target points inside the delta-ball around `fx` intersected with
/// the target domain, by projecting perturbations into the hull.
fn sample_targets(
    target: &TargetGeometry,
    fx: &[f64],
    delta: f64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 10 {
        attempts += 1;
        let raw: Vec<f64> = fx
            .iter()
            .map(|&v| (v + rng.random_range(-delta..=delta)).max(0.0))
            .collect();
        let y = target.project(&raw);
        if metric_distance(&y, fx) <= delta + 1e-12 {
            out.push(y);
        }
    }
    out
}

fn lex_less(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("coordinates are not NaN") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

fn probe_open_at_salted(
    map: &dyn ProbeMap,
    point: &[ExtendedReal],
    cfg: &ProbeConfig,
    salt: u64,
) -> Result<PointVerdict> {
    cfg.validate()?;
    let x_metric = to_metric(map.flavor(), point)?;
    if x_metric.len() != map.source().ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.source().ambient_dim(),
            got: x_metric.len(),
        });
    }
    let membership_tol = cfg.tolerance.max(crate::DEFAULT_TOLERANCE);
    if !map.source().contains(&x_metric, membership_tol) {
        return Err(Error::OutsideDomain);
    }
    let fx = map.eval_metric(&x_metric);
    let mut rng = point_rng(cfg, salt);

    // uncovered targets per ladder index, with the best distance the search
    // achieved toward each
    type Uncovered = (Vec<f64>, f64);
    let mut coverage: Vec<DeltaCoverage> = Vec::with_capacity(cfg.delta_ladder.len());
    let mut failures: Vec<(usize, Vec<Uncovered>)> = Vec::new();

    for (di, &delta) in cfg.delta_ladder.iter().enumerate() {
        let targets = sample_targets(map.target(), &fx, delta, cfg.target_samples, &mut rng);
        let mut covered = 0;
        let mut uncovered: Vec<(Vec<f64>, f64)> = Vec::new();
        for y in targets.iter() {
            let outcome = find_preimage(map, &x_metric, y, cfg.epsilon, cfg.tolerance);
            if outcome.preimage.is_some() {
                covered += 1;
            } else {
                uncovered.push((y.clone(), outcome.best_distance));
            }
        }
        coverage.push(DeltaCoverage {
            delta,
            targets: targets.len(),
            covered,
        });
        if uncovered.is_empty() {
            return Ok(PointVerdict::OpenEvidence {
                point: point.to_vec(),
                delta_star: delta,
                coverage,
            });
        }
        failures.push((di, uncovered));
    }

    // Ladder exhausted: certify the uncovered targets, largest delta first
    // (its uncovered targets carry the widest margins), farthest first.
    let mut saw_inconclusive: Option<String> = None;
    for (di, mut cands) in failures {
        cands.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("scores are not NaN")
                .then_with(|| lex_less(&a.0, &b.0))
        });
        let mut unresolved = false;
        for (y, _score) in cands {
            match certify_no_preimage(
                map,
                &x_metric,
                &y,
                cfg.epsilon,
                cfg.tolerance,
                cfg.grid_resolution,
            ) {
                Certification::Certified {
                    margin,
                    cells,
                    strata,
                } => {
                    return Ok(PointVerdict::Witness(WitnessCertificate {
                        point: point.to_vec(),
                        target: from_metric(map.flavor(), &y),
                        epsilon: cfg.epsilon,
                        delta: cfg.delta_ladder[di],
                        distance_to_image: metric_distance(&y, &fx),
                        margin,
                        tolerance: cfg.tolerance,
                        resolution: cfg.grid_resolution,
                        lipschitz: map.lipschitz() * map.source().decode_lipschitz(),
                        strata_checked: strata,
                        cells_checked: cells,
                    }));
                }
                Certification::Disproved { .. } => {
                    coverage[di].covered += 1;
                }
                Certification::Inconclusive {
                    undecided, cells, ..
                } => {
                    unresolved = true;
                    saw_inconclusive = Some(format!(
                        "delta {}: {undecided} undecided cells after {cells} cells",
                        cfg.delta_ladder[di]
                    ));
                }
            }
        }
        if !unresolved && coverage[di].covered == coverage[di].targets {
            return Ok(PointVerdict::OpenEvidence {
                point: point.to_vec(),
                delta_star: cfg.delta_ladder[di],
                coverage,
            });
        }
    }

    Ok(PointVerdict::Inconclusive {
        point: point.to_vec(),
        resolution: cfg.grid_resolution,
        detail: saw_inconclusive.unwrap_or_else(|| "uncovered targets could not be settled".into()),
    })
}

/// Probes openness of the map at one source point.
///
/// Walks the delta ladder from the largest radius down; the first rung whose
/// sampled targets are all reached yields open-evidence. If no rung is
/// covered, uncovered targets go through grid certification and the first
/// surviving one becomes a witness.
pub fn probe_open_at(
    map: &dyn ProbeMap,
    point: &[ExtendedReal],
    cfg: &ProbeConfig,
) -> Result<PointVerdict> {
    probe_open_at_salted(map, point, cfg, 0)
}

/// Deterministic low-discrepancy sample of domain points, stratum-aware:
/// free weights and the per-block choice of normalization stratum each get
/// their own Halton dimension, so stratum combinations across blocks are
/// covered jointly rather than in lockstep.
pub fn sample_domain_points(domain: &ParamDomain, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let offset = seed % 9973;
    let param_dim = domain.param_dim();
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let idx = i as u64 + 1 + offset;
        let mut params = Vec::with_capacity(param_dim);
        let mut strata = Vec::with_capacity(domain.blocks().len());
        for (bi, block) in domain.blocks().iter().enumerate() {
            let m = block.generator_count();
            let u = halton(idx, HALTON_BASES[(param_dim + bi) % HALTON_BASES.len()]);
            strata.push(((u * m as f64) as usize).min(m - 1));
            for k in 0..m {
                let base = HALTON_BASES[(block.param_offset + k) % HALTON_BASES.len()];
                params.push(halton(idx, base));
            }
        }
        domain.pin_strata(&mut params, &strata);
        points.push(domain.decode(&params));
    }
    points
}

/// Probes the map at `cfg.point_samples` sampled domain points plus all
/// pinned points, and aggregates the per-point verdicts.
pub fn probe_map(
    map: &dyn ProbeMap,
    cfg: &ProbeConfig,
    pinned: &[Vec<ExtendedReal>],
) -> Result<ProbeVerdict> {
    cfg.validate()?;
    let mut records = Vec::new();
    for (i, p) in pinned.iter().enumerate() {
        records.push(probe_open_at_salted(map, p, cfg, 0x5000 + i as u64)?);
    }
    let sampled = sample_domain_points(map.source(), cfg.point_samples, cfg.seed);
    for (i, metric) in sampled.iter().enumerate() {
        let user = from_metric(map.flavor(), metric);
        records.push(probe_open_at_salted(map, &user, cfg, i as u64)?);
    }
    let open_evidence = records
        .iter()
        .filter(|r| r.class() == VerdictClass::OpenEvidence)
        .count();
    let witnesses = records
        .iter()
        .filter(|r| r.class() == VerdictClass::Witness)
        .count();
    let inconclusive = records.len() - open_evidence - witnesses;
    Ok(ProbeVerdict {
        map: map.name().to_string(),
        semantics: SEMANTICS.to_string(),
        config: cfg.clone(),
        open_evidence,
        witnesses,
        inconclusive,
        records,
    })
}

/// An uncertified witness candidate produced by the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCandidate {
    pub source: Vec<ExtendedReal>,
    pub target: Vec<ExtendedReal>,
    /// Radius at which the target was sampled.
    pub delta: f64,
    /// Best distance any searched source point achieved to the target.
    pub score: f64,
}

/// Coarse-to-fine search for non-openness candidates: sampled source
/// points, targets at the widest ladder radius, failed preimage searches
/// ranked by how far the target stayed out of reach. Candidates are not yet
/// certified; pass them to `verify_witness`.
pub fn witness_search(map: &dyn ProbeMap, cfg: &ProbeConfig) -> Result<Vec<WitnessCandidate>> {
    cfg.validate()?;
    let delta = cfg.delta_ladder[0];
    let sampled = sample_domain_points(map.source(), cfg.point_samples, cfg.seed);
    let mut candidates = Vec::new();
    for (i, x_metric) in sampled.iter().enumerate() {
        let fx = map.eval_metric(x_metric);
        let mut rng = point_rng(cfg, 0x7000 + i as u64);
        let targets = sample_targets(
            map.target(),
            &fx,
            delta,
            (cfg.target_samples / 2).max(8),
            &mut rng,
        );
        for y in targets {
            let outcome = find_preimage(map, x_metric, &y, cfg.epsilon, cfg.tolerance);
            if outcome.preimage.is_none() && outcome.best_distance > cfg.tolerance {
                candidates.push((x_metric.clone(), y, outcome.best_distance));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .expect("scores are not NaN")
            .then_with(|| lex_less(&a.0, &b.0))
            .then_with(|| lex_less(&a.1, &b.1))
    });
    candidates.truncate(16);
    Ok(candidates
        .into_iter()
        .map(|(x, y, score)| WitnessCandidate {
            source: from_metric(map.flavor(), &x),
            target: from_metric(map.flavor(), &y),
            delta,
            score,
        })
        .collect())
}

/// Certifies or refutes one witness candidate on a grid at the given
/// resolution. `Ok(Some(..))` is a certificate, `Ok(None)` means a genuine
/// preimage was found, and a grid too coarse to decide is an error, never a
/// silent pass.
pub fn verify_witness(
    map: &dyn ProbeMap,
    candidate: &WitnessCandidate,
    cfg: &ProbeConfig,
    resolution: f64,
) -> Result<Option<WitnessCertificate>> {
    let x_metric = to_metric(map.flavor(), &candidate.source)?;
    let membership_tol = cfg.tolerance.max(crate::DEFAULT_TOLERANCE);
    if !map.source().contains(&x_metric, membership_tol) {
        return Err(Error::OutsideDomain);
    }
    let y = to_metric(map.flavor(), &candidate.target)?;
    if !map.target().contains(&y, membership_tol) {
        return Err(Error::OutsideDomain);
    }
    let fx = map.eval_metric(&x_metric);
    match certify_no_preimage(map, &x_metric, &y, cfg.epsilon, cfg.tolerance, resolution) {
        Certification::Certified {
            margin,
            cells,
            strata,
        } => Ok(Some(WitnessCertificate {
            point: candidate.source.clone(),
            target: candidate.target.clone(),
            epsilon: cfg.epsilon,
            delta: candidate.delta,
            distance_to_image: metric_distance(&y, &fx),
            margin,
            tolerance: cfg.tolerance,
            resolution,
            lipschitz: map.lipschitz() * map.source().decode_lipschitz(),
            strata_checked: strata,
            cells_checked: cells,
        })),
        Certification::Disproved { .. } => Ok(None),
        Certification::Inconclusive { undecided, .. } => Err(Error::GridTooCoarse {
            resolution,
            undecided,
        }),
    }
}

/// Side-by-side probe of the binary combination map and the two-atom
/// barycenter parameterization over the same product domain, reporting
/// verdict-class agreement per sampled point.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub combination: ProbeVerdict,
    pub barycenter: ProbeVerdict,
    pub agreements: usize,
    pub disagreements: usize,
}

pub fn probe_equivalence(
    name: &str,
    factors: &[TropicalPolytope],
    cfg: &ProbeConfig,
) -> Result<EquivalenceReport> {
    let combination = PiecewiseMapSpec::binary_combination(format!("{name}-combination"), factors)?;
    let barycenter = BinaryBarycenterMap::new(format!("{name}-barycenter"), factors)?;
    let va = probe_map(&combination, cfg, &[])?;
    let vb = probe_map(&barycenter, cfg, &[])?;
    let mut agreements = 0;
    let mut disagreements = 0;
    for (a, b) in va.records.iter().zip(&vb.records) {
        if a.class() == b.class() {
            agreements += 1;
        } else {
            disagreements += 1;
        }
    }
    Ok(EquivalenceReport {
        combination: va,
        barycenter: vb,
        agreements,
        disagreements,
    })
}

/// Violation record for a monotone candidate embedding of the unit interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineDefect {
    /// Candidate value at 0.
    pub a: f64,
    /// Candidate value at 1.
    pub b: f64,
    /// The scalar at which the affinity identity is evaluated.
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|`; positive for every strictly monotone candidate.
    pub violation: f64,
}

/// Evaluates the affinity identity `s(lambda * 1 v 0) = (ln lambda + s(1)) v
/// s(0)` against a strictly monotone candidate `s : [0, 1] -> R`, choosing
/// the scalar so that the right side collapses to `s(0)` while the left side
/// is forced past it by monotonicity. Non-injective candidates (on the
/// sample grid) are rejected.
pub fn affine_defect_on_interval(
    candidate: impl Fn(f64) -> f64,
    grid: usize,
) -> Result<AffineDefect> {
    if grid < 2 {
        return Err(Error::InvalidConfig("grid needs at least two cells".into()));
    }
    let samples: Vec<f64> = (0..=grid)
        .map(|k| candidate(k as f64 / grid as f64))
        .collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotANumber);
    }
    let increasing = samples.windows(2).all(|w| w[0] < w[1]);
    let decreasing = samples.windows(2).all(|w| w[0] > w[1]);
    if !increasing && !decreasing {
        return Err(Error::NotInjective);
    }
    let a = samples[0];
    let b = samples[grid];
    if increasing {
        if b - a > 600.0 {
            return Err(Error::InvalidConfig(
                "candidate range too wide for a representable scalar".into(),
            ));
        }
        let ln_lambda = a - b - 1.0;
        let lambda = ln_lambda.exp();
        let lhs = candidate(lambda);
        let rhs = (ln_lambda + b).max(a);
        Ok(AffineDefect {
            a,
            b,
            lambda,
            lhs,
            rhs,
            violation: (lhs - rhs).abs(),
        })
    } else {
        // a decreasing candidate already violates the join identity at the
        // unit scalar: s(1 v 0) = s(1) while s(1) v s(0) = s(0)
        let lhs = b;
        let rhs = b.max(a);
        Ok(AffineDefect {
            a,
            b,
            lambda: 1.0,
            lhs,
            rhs,
            violation: (lhs - rhs).abs(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Finite;

    fn fast_cfg() -> ProbeConfig {
        ProbeConfig {
            target_samples: 12,
            point_samples: 8,
            ..ProbeConfig::default()
        }
    }

    #[test]
    fn identity_map_is_open_everywhere() {
        let map =
            PiecewiseMapSpec::identity("id", TropicalPolytope::max_times_box(0.0, 1.0, 2).unwrap())
                .unwrap();
        let verdict = probe_map(&map, &fast_cfg(), &[]).unwrap();
        assert_eq!(verdict.witnesses, 0);
        assert_eq!(verdict.inconclusive, 0);
        assert_eq!(verdict.open_evidence, verdict.records.len());
    }

    #[test]
    fn join_map_witness_at_the_pinned_point() {
        let map =
            PiecewiseMapSpec::join_map("vee-on-id", TropicalPolytope::max_plus_simplex(2)).unwrap();
        let pinned = vec![Finite(0.0), Finite(-1.0), Finite(-1.0), Finite(0.0)];
        let verdict = probe_open_at(&map, &pinned, &fast_cfg()).unwrap();
        let PointVerdict::Witness(w) = verdict else {
            panic!("expected a witness, got {verdict:?}");
        };
        assert!(w.margin > w.tolerance);
        assert!(w.distance_to_image <= w.delta + 1e-12);
    }

    #[test]
    fn join_map_is_open_away_from_ties() {
        let map =
            PiecewiseMapSpec::join_map("vee-on-id", TropicalPolytope::max_plus_simplex(2)).unwrap();
        // (0, -3) and (0, -5): the second coordinate moves freely
        let point = vec![Finite(0.0), Finite(-3.0), Finite(0.0), Finite(-5.0)];
        let verdict = probe_open_at(&map, &point, &fast_cfg()).unwrap();
        assert_eq!(verdict.class(), VerdictClass::OpenEvidence, "{verdict:?}");
    }

    #[test]
    fn outside_domain_is_an_error() {
        let map = PiecewiseMapSpec::identity("id", TropicalPolytope::max_times_simplex(2)).unwrap();
        let err = probe_open_at(&map, &[Finite(0.5), Finite(0.5)], &fast_cfg());
        assert_eq!(err, Err(Error::OutsideDomain));
    }

    #[test]
    fn combination_map_open_on_interior_box() {
        let boxed = TropicalPolytope::max_times_box(0.25, 1.0, 2).unwrap();
        let map = PiecewiseMapSpec::binary_combination("s-on-box", &[boxed]).unwrap();
        let cfg = ProbeConfig {
            target_samples: 8,
            point_samples: 6,
            ..ProbeConfig::default()
        };
        let verdict = probe_map(&map, &cfg, &[]).unwrap();
        assert_eq!(verdict.witnesses, 0, "{:?}", verdict.first_witness());
        assert_eq!(verdict.inconclusive, 0);
    }

    #[test]
    fn witness_search_finds_product_obstruction() {
        let ad = TropicalPolytope::max_times_simplex(2);
        let map = PiecewiseMapSpec::binary_combination("s-on-ad-x-ad", &[ad.clone(), ad]).unwrap();
        let cfg = ProbeConfig {
            point_samples: 40,
            ..ProbeConfig::default()
        };
        let candidates = witness_search(&map, &cfg).unwrap();
        assert!(!candidates.is_empty());
        let mut certified = 0;
        for cand in candidates.iter().take(4) {
            if let Ok(Some(w)) = verify_witness(&map, cand, &cfg, cfg.grid_resolution) {
                certified += 1;
                assert!(w.margin > w.tolerance);
            }
        }
        assert!(certified >= 1, "no candidate certified");
    }

    #[test]
    fn combination_map_open_on_one_simplex() {
        let ad = TropicalPolytope::max_times_simplex(2);
        let map = PiecewiseMapSpec::binary_combination("s-on-ad", &[ad]).unwrap();
        let cfg = ProbeConfig {
            target_samples: 16,
            point_samples: 12,
            ..ProbeConfig::default()
        };
        let verdict = probe_map(&map, &cfg, &[]).unwrap();
        assert_eq!(verdict.witnesses, 0, "{:?}", verdict.first_witness());
        assert_eq!(verdict.inconclusive, 0);
    }

    #[test]
    fn witness_search_is_empty_on_an_open_map() {
        let map =
            PiecewiseMapSpec::identity("id", TropicalPolytope::max_times_box(0.0, 1.0, 2).unwrap())
                .unwrap();
        let cfg = ProbeConfig {
            point_samples: 10,
            ..ProbeConfig::default()
        };
        let candidates = witness_search(&map, &cfg).unwrap();
        assert!(candidates.is_empty(), "{candidates:?}");
    }

    #[test]
    fn fake_witness_is_disproved() {
        let map =
            PiecewiseMapSpec::identity("id", TropicalPolytope::max_times_box(0.0, 1.0, 2).unwrap())
                .unwrap();
        let cand = WitnessCandidate {
            source: vec![Finite(0.5), Finite(0.5)],
            target: vec![Finite(0.52), Finite(0.5)],
            delta: 0.04,
            score: 0.02,
        };
        let out = verify_witness(&map, &cand, &ProbeConfig::default(), 1e-3).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn equivalence_report_agrees() {
        let ad = TropicalPolytope::max_times_simplex(2);
        let cfg = ProbeConfig {
            target_samples: 8,
            point_samples: 6,
            ..ProbeConfig::default()
        };
        let report = probe_equivalence("ad", &[ad], &cfg).unwrap();
        assert_eq!(report.disagreements, 0);
        assert_eq!(report.agreements, report.combination.records.len());
    }

    #[test]
    fn affine_defect_examples() {
        let defect = affine_defect_on_interval(|u| u, 64).unwrap();
        assert!((defect.lambda - (-2.0f64).exp()).abs() < 1e-15);
        assert!((defect.violation - (-2.0f64).exp()).abs() < 1e-12);

        let defect = affine_defect_on_interval(|u| 2.0 * u - 1.0, 64).unwrap();
        assert!(defect.violation > 0.0);

        assert_eq!(
            affine_defect_on_interval(|_| 0.25, 64),
            Err(Error::NotInjective)
        );
    }

    #[test]
    fn monotone_consistency_of_open_evidence() {
        // if the largest rung is covered the probe reports it as delta_star;
        // a ladder starting lower must also be covered
        let map =
            PiecewiseMapSpec::identity("id", TropicalPolytope::max_times_box(0.0, 1.0, 2).unwrap())
                .unwrap();
        let point = vec![Finite(0.5), Finite(0.5)];
        let full = fast_cfg();
        let v1 = probe_open_at(&map, &point, &full).unwrap();
        let PointVerdict::OpenEvidence { delta_star, .. } = v1 else {
            panic!("identity must yield open-evidence");
        };
        assert_eq!(delta_star, full.delta_ladder[0]);
        let shifted = ProbeConfig {
            delta_ladder: full.delta_ladder[1..].to_vec(),
            ..full
        };
        let v2 = probe_open_at(&map, &point, &shifted).unwrap();
        assert_eq!(v2.class(), VerdictClass::OpenEvidence);
    }

    #[test]
    fn deterministic_across_runs() {
        let ad = TropicalPolytope::max_times_simplex(2);
        let map = PiecewiseMapSpec::binary_combination("s-on-ad", &[ad]).unwrap();
        let cfg = ProbeConfig {
            target_samples: 6,
            point_samples: 5,
            seed: 7,
            ..ProbeConfig::default()
        };
        let a = serde_json::to_string(&probe_map(&map, &cfg, &[]).unwrap()).unwrap();
        let b = serde_json::to_string(&probe_map(&map, &cfg, &[]).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
