//! Batch front end: JSON in, JSON out, deterministic bytes.
//!
//! Exit codes: 0 success (probe: no witness), 1 check-suite failure,
//! 2 schema violation, 3 dimension mismatch, 4 normalization/invariant
//! failure, 10 certified witness found, 11 certification inconclusive.

mod output;
mod suites;
mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use maslov_core::convexity::{
    hull_project, AffineEmbedding, MaxPlusPoint, MaxTimesPoint, TropicalPolytope,
};
use maslov_core::measures::{
    FiniteSpace, LabeledMeasure, MaxPlusMeasure, MaxPlusPointMeasure, MaxTimesMeasure,
    MaxTimesPointMeasure, PointMeasure,
};
use maslov_core::probe::{
    self, halton, metric_distance, to_metric, PiecewiseMapSpec, PointVerdict, ProbeConfig,
    ProbeMap, ProbeVerdict, HALTON_BASES,
};
use maslov_core::semiring::{ExtendedReal, Finite, NegInf, UnitWeight};
use maslov_core::{CheckReport, Error as CoreError};

use output::to_stable_json;

#[derive(Parser)]
#[command(
    name = "maslov",
    version,
    about = "Idempotent measures, tropical hulls, barycenters, and openness probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hull membership and tropical projection for a batch of query points.
    Hull {
        /// Polytope JSON file.
        #[arg(long)]
        polytope: PathBuf,
        /// JSON array of query points.
        #[arg(long)]
        queries: PathBuf,
        /// Optional SVG rendering (2D polytopes only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Barycenter of an embedded point measure.
    Bary {
        /// Point-measure JSON file.
        #[arg(long)]
        measure: PathBuf,
    },
    /// Model-change and transport isomorphisms on measures.
    Iso {
        /// Measure JSON file (labeled for gx/gx-inv, point measure for lh).
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Truncation depth for lh; defaults to one that is lossless on the data.
        #[arg(long)]
        embedding_depth: Option<u32>,
        /// Also report the round-trip reconstruction error.
        #[arg(long)]
        round_trip: bool,
    },
    /// Openness probe of a piecewise tropical-linear map.
    Probe {
        /// Map spec JSON file.
        #[arg(long)]
        map: PathBuf,
        /// Probe configuration JSON file (defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
        /// JSON array of pinned source points to probe first.
        #[arg(long)]
        pin: Option<PathBuf>,
        /// Optional SVG witness/coverage diagram (2D targets only).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Invariant suites over randomized and exhaustive inputs.
    Check {
        /// Suite name, or "all".
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    /// Componentwise ln: max-times measure to max-plus measure.
    Gx,
    /// Componentwise exp: max-plus measure to max-times measure.
    GxInv,
    /// Transport of an embedded max-times measure along the affine embedding.
    Lh,
}

struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

fn schema_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn core_failure(err: CoreError) -> Failure {
    let code = match err {
        CoreError::DimensionMismatch { .. } | CoreError::LengthMismatch { .. } => 3,
        CoreError::NotNormalized(_) | CoreError::AllBottom => 4,
        CoreError::GridTooCoarse { .. } => 11,
        _ => 2,
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| schema_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| schema_error(format!("{}: {e}", path.display())))
}

fn parse_from<T: serde::de::DeserializeOwned>(value: Value, what: &str) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| schema_error(format!("{what}: {e}")))
}

fn scalar_from(value: &Value) -> CliResult<ExtendedReal> {
    match value {
        Value::Number(n) => {
            let v = n
                .as_f64()
                .ok_or_else(|| schema_error("non-finite number"))?;
            if !v.is_finite() {
                return Err(schema_error("scalars must be finite or \"-inf\""));
            }
            Ok(Finite(v))
        }
        Value::String(s) if s == "-inf" => Ok(NegInf),
        other => Err(schema_error(format!("unknown scalar token {other}"))),
    }
}

fn unit_from(value: &Value) -> CliResult<UnitWeight> {
    match scalar_from(value)? {
        NegInf => Err(schema_error("\"-inf\" is not a max-times weight")),
        Finite(v) => UnitWeight::new(v).map_err(core_failure),
    }
}

fn points_from(value: Value) -> CliResult<Vec<Vec<ExtendedReal>>> {
    let rows: Vec<Vec<Value>> = parse_from(value, "queries")?;
    rows.iter()
        .map(|row| row.iter().map(scalar_from).collect())
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> CliResult<u8> {
    match command {
        Command::Hull {
            polytope,
            queries,
            svg,
        } => cmd_hull(&polytope, &queries, svg.as_deref()),
        Command::Bary { measure } => cmd_bary(&measure),
        Command::Iso {
            measure,
            direction,
            embedding_depth,
            round_trip,
        } => cmd_iso(&measure, direction, embedding_depth, round_trip),
        Command::Probe {
            map,
            config,
            pin,
            svg,
        } => cmd_probe(&map, config.as_deref(), pin.as_deref(), svg.as_deref()),
        Command::Check {
            suite,
            trials,
            seed,
        } => cmd_check(&suite, trials, seed),
    }
}

// ---------------------------------------------------------------------------
// hull
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct HullResult {
    query: Vec<ExtendedReal>,
    member: bool,
    projection: Vec<ExtendedReal>,
    weights: Vec<ExtendedReal>,
    distance: f64,
    unit_gap: f64,
}

fn cmd_hull(polytope: &Path, queries: &Path, svg_path: Option<&Path>) -> CliResult<u8> {
    let poly: TropicalPolytope = parse_from(read_json(polytope)?, "polytope")?;
    let query_points = points_from(read_json(queries)?)?;
    let tol = maslov_core::DEFAULT_TOLERANCE;

    let mut results = Vec::with_capacity(query_points.len());
    for q in &query_points {
        let proj = hull_project(q, &poly).map_err(core_failure)?;
        results.push(HullResult {
            query: q.clone(),
            member: proj.distance <= tol && proj.unit_gap <= tol,
            projection: proj.point,
            weights: proj.weights,
            distance: proj.distance,
            unit_gap: proj.unit_gap,
        });
    }

    if let Some(path) = svg_path {
        if poly.dim() == 2 {
            let flavor = poly.flavor();
            let gens_metric: Vec<Vec<f64>> = match &poly {
                TropicalPolytope::MaxPlus(g) => g
                    .iter()
                    .map(|p| to_metric(flavor, p.coords()).expect("max-plus always converts"))
                    .collect(),
                TropicalPolytope::MaxTimes(g) => g.iter().map(|p| p.values()).collect(),
            };
            let drawn: Vec<(Vec<f64>, bool, Vec<f64>)> = results
                .iter()
                .map(|r| {
                    let q = to_metric(flavor, &r.query).map_err(core_failure)?;
                    let p = to_metric(flavor, &r.projection).map_err(core_failure)?;
                    Ok((q, r.member, p))
                })
                .collect::<CliResult<_>>()?;
            std::fs::write(path, svg::hull_svg(&gens_metric, &drawn))
                .map_err(|e| schema_error(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    #[derive(serde::Serialize)]
    struct HullOutput {
        flavor: &'static str,
        dimension: usize,
        generators: usize,
        tolerance: f64,
        results: Vec<HullResult>,
    }
    let out = HullOutput {
        flavor: match poly.flavor() {
            maslov_core::convexity::Flavor::MaxPlus => "max-plus",
            maslov_core::convexity::Flavor::MaxTimes => "max-times",
        },
        dimension: poly.dim(),
        generators: poly.generator_count(),
        tolerance: tol,
        results,
    };
    print!("{}", to_stable_json(&out));
    Ok(0)
}

// ---------------------------------------------------------------------------
// bary
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct RawPointMeasure {
    model: String,
    atoms: Vec<Vec<Value>>,
    weights: Vec<Value>,
}

enum AnyPointMeasure {
    MaxPlus(MaxPlusPointMeasure),
    MaxTimes(MaxTimesPointMeasure),
}

fn parse_point_measure(value: Value) -> CliResult<AnyPointMeasure> {
    let raw: RawPointMeasure = parse_from(value, "measure")?;
    match raw.model.as_str() {
        "max-plus" => {
            let atoms = raw
                .atoms
                .iter()
                .map(|row| {
                    Ok(MaxPlusPoint::new(
                        row.iter().map(scalar_from).collect::<CliResult<_>>()?,
                    ))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let weights = raw
                .weights
                .iter()
                .map(scalar_from)
                .collect::<CliResult<Vec<_>>>()?;
            MaxPlusPointMeasure::new(atoms, weights)
                .map(AnyPointMeasure::MaxPlus)
                .map_err(core_failure)
        }
        "max-times" => {
            let atoms = raw
                .atoms
                .iter()
                .map(|row| {
                    Ok(MaxTimesPoint::new(
                        row.iter().map(unit_from).collect::<CliResult<_>>()?,
                    ))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let weights = raw
                .weights
                .iter()
                .map(unit_from)
                .collect::<CliResult<Vec<_>>>()?;
            MaxTimesPointMeasure::new(atoms, weights)
                .map(AnyPointMeasure::MaxTimes)
                .map_err(core_failure)
        }
        other => Err(schema_error(format!("unknown model {other:?}"))),
    }
}

fn cmd_bary(measure: &Path) -> CliResult<u8> {
    let parsed = parse_point_measure(read_json(measure)?)?;

    #[derive(serde::Serialize)]
    struct BaryOutput {
        model: &'static str,
        barycenter: Vec<ExtendedReal>,
    }
    let out = match parsed {
        AnyPointMeasure::MaxPlus(mu) => BaryOutput {
            model: "max-plus",
            barycenter: mu.barycenter().coords().to_vec(),
        },
        AnyPointMeasure::MaxTimes(nu) => BaryOutput {
            model: "max-times",
            barycenter: nu
                .barycenter()
                .coords()
                .iter()
                .map(|w| Finite(w.value()))
                .collect(),
        },
    };
    print!("{}", to_stable_json(&out));
    Ok(0)
}

// ---------------------------------------------------------------------------
// iso
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct RawLabeledMeasure {
    model: String,
    space: Vec<String>,
    weights: serde_json::Map<String, Value>,
}

fn labeled_weights<T>(
    raw: &RawLabeledMeasure,
    space: &FiniteSpace,
    convert: impl Fn(&Value) -> CliResult<T>,
) -> CliResult<Vec<T>> {
    if raw.weights.len() != space.len() {
        return Err(schema_error("weights must cover exactly the space"));
    }
    space
        .points()
        .iter()
        .map(|p| {
            raw.weights
                .get(p)
                .ok_or_else(|| schema_error(format!("missing weight for point {p:?}")))
                .and_then(&convert)
        })
        .collect()
}

fn cmd_iso(
    measure: &Path,
    direction: Direction,
    embedding_depth: Option<u32>,
    round_trip: bool,
) -> CliResult<u8> {
    #[derive(serde::Serialize)]
    struct IsoOutput {
        direction: &'static str,
        result: Value,
        #[serde(skip_serializing_if = "Option::is_none")]
        embedding_depth: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        round_trip_max_error: Option<f64>,
    }

    let value = read_json(measure)?;
    let out = match direction {
        Direction::Gx => {
            let raw: RawLabeledMeasure = parse_from(value, "measure")?;
            if raw.model != "max-times" {
                return Err(schema_error("direction gx expects a max-times measure"));
            }
            let space = FiniteSpace::new(raw.space.clone()).map_err(core_failure)?;
            let weights = labeled_weights(&raw, &space, unit_from)?;
            let nu = MaxTimesMeasure::new(space, weights).map_err(core_failure)?;
            let mu = nu.to_maxplus();
            let error = round_trip.then(|| {
                mu.to_maxtimes()
                    .weights()
                    .iter()
                    .zip(nu.weights())
                    .map(|(a, b)| (a.value() - b.value()).abs())
                    .fold(0.0, f64::max)
            });
            IsoOutput {
                direction: "gx",
                result: serde_json::to_value(LabeledMeasure::MaxPlus(mu))
                    .expect("measures serialize"),
                embedding_depth: None,
                round_trip_max_error: error,
            }
        }
        Direction::GxInv => {
            let raw: RawLabeledMeasure = parse_from(value, "measure")?;
            if raw.model != "max-plus" {
                return Err(schema_error("direction gx-inv expects a max-plus measure"));
            }
            let space = FiniteSpace::new(raw.space.clone()).map_err(core_failure)?;
            let weights = labeled_weights(&raw, &space, scalar_from)?;
            let mu = MaxPlusMeasure::new(space, weights).map_err(core_failure)?;
            let nu = mu.to_maxtimes();
            let error = round_trip.then(|| {
                nu.to_maxplus()
                    .weights()
                    .iter()
                    .zip(mu.weights())
                    .map(|(a, b)| maslov_core::semiring::exp_distance(*a, *b))
                    .fold(0.0, f64::max)
            });
            IsoOutput {
                direction: "gx-inv",
                result: serde_json::to_value(LabeledMeasure::MaxTimes(nu))
                    .expect("measures serialize"),
                embedding_depth: None,
                round_trip_max_error: error,
            }
        }
        Direction::Lh => {
            let AnyPointMeasure::MaxTimes(nu) = parse_point_measure(value)? else {
                return Err(schema_error(
                    "direction lh expects a max-times point measure",
                ));
            };
            let h = match embedding_depth {
                Some(depth) => AffineEmbedding::new(nu.dim(), depth).map_err(core_failure)?,
                None => AffineEmbedding::covering(nu.atoms(), nu.dim()),
            };
            let transported = nu.transport(&h).map_err(core_failure)?;
            IsoOutput {
                direction: "lh",
                result: serde_json::to_value(PointMeasure::MaxPlus(transported))
                    .expect("measures serialize"),
                embedding_depth: Some(h.depth()),
                round_trip_max_error: None,
            }
        }
    };
    print!("{}", to_stable_json(&out));
    Ok(0)
}

// ---------------------------------------------------------------------------
// probe
// ---------------------------------------------------------------------------

fn cmd_probe(
    map: &Path,
    config: Option<&Path>,
    pin: Option<&Path>,
    svg_path: Option<&Path>,
) -> CliResult<u8> {
    let spec: PiecewiseMapSpec = parse_from(read_json(map)?, "map spec")?;
    let cfg: ProbeConfig = match config {
        Some(path) => parse_from(read_json(path)?, "probe config")?,
        None => ProbeConfig::default(),
    };
    cfg.validate().map_err(core_failure)?;
    let pins: Vec<Vec<ExtendedReal>> = match pin {
        Some(path) => points_from(read_json(path)?)?,
        None => Vec::new(),
    };
    let verdict = probe::probe_map(&spec, &cfg, &pins).map_err(core_failure)?;

    if let Some(path) = svg_path {
        if spec.target_polytope().dim() == 2 {
            let drawing = witness_drawing(&spec, &cfg, &verdict)?;
            std::fs::write(path, drawing)
                .map_err(|e| schema_error(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    print!("{}", to_stable_json(&verdict));
    if verdict.has_witness() {
        Ok(10)
    } else if verdict.has_inconclusive() {
        Ok(11)
    } else {
        Ok(0)
    }
}

/// Renders the first witness (or, for a clean map, the first open-evidence
/// record): the target hull, the delta-ball around the image, and sampled
/// images of the source ball.
fn witness_drawing(
    spec: &PiecewiseMapSpec,
    cfg: &ProbeConfig,
    verdict: &ProbeVerdict,
) -> CliResult<String> {
    let flavor = spec.flavor();
    let gens_metric: Vec<Vec<f64>> = match spec.target_polytope() {
        TropicalPolytope::MaxPlus(g) => g
            .iter()
            .map(|p| to_metric(flavor, p.coords()).expect("max-plus always converts"))
            .collect(),
        TropicalPolytope::MaxTimes(g) => g.iter().map(|p| p.values()).collect(),
    };

    let (point, target, delta) = match verdict.first_witness() {
        Some(w) => (w.point.clone(), Some(w.target.clone()), w.delta),
        None => match verdict.records.first() {
            Some(PointVerdict::OpenEvidence {
                point, delta_star, ..
            }) => (point.clone(), None, *delta_star),
            _ => return Ok(svg::hull_svg(&gens_metric, &[])),
        },
    };

    let x_metric = to_metric(flavor, &point).map_err(core_failure)?;
    let fx = spec.eval_metric(&x_metric);
    let domain = spec.source();
    let params0 = domain.canonical_params(&x_metric);
    let window = domain.param_window(&params0, cfg.epsilon);
    let strata = domain.admissible_strata(&params0, cfg.epsilon);

    let mut images = Vec::new();
    let combos = maslov_core::probe::strata_combos(&strata);
    for (ci, combo) in combos.iter().enumerate() {
        for k in 0..(360 / combos.len().max(1)) {
            let mut params: Vec<f64> = window
                .iter()
                .enumerate()
                .map(|(i, (lo, hi))| {
                    lo + halton(
                        (ci * 1000 + k + 1) as u64,
                        HALTON_BASES[i % HALTON_BASES.len()],
                    ) * (hi - lo)
                })
                .collect();
            domain.pin_strata(&mut params, combo);
            let p = domain.decode(&params);
            if metric_distance(&p, &x_metric) <= cfg.epsilon {
                images.push(spec.eval_metric(&p));
            }
        }
    }

    let y_metric = match &target {
        Some(t) => to_metric(flavor, t).map_err(core_failure)?,
        None => fx.clone(),
    };
    Ok(svg::witness_svg(
        &gens_metric,
        &fx,
        &y_metric,
        delta,
        &images,
    ))
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn cmd_check(suite: &str, trials: u64, seed: u64) -> CliResult<u8> {
    let names: Vec<&str> = if suite == "all" {
        suites::SUITE_NAMES.to_vec()
    } else {
        vec![suite]
    };

    let mut reports: BTreeMap<String, CheckReport> = BTreeMap::new();
    for name in names {
        let report = suites::run_suite(name, trials, seed)
            .ok_or_else(|| schema_error(format!("unknown suite {name:?}")))?;
        reports.insert(name.to_string(), report);
    }
    let passed = reports.values().all(|r| r.passed());

    #[derive(serde::Serialize)]
    struct CheckOutput {
        seed: u64,
        trials: u64,
        passed: bool,
        suites: BTreeMap<String, CheckReport>,
    }
    print!(
        "{}",
        to_stable_json(&CheckOutput {
            seed,
            trials,
            passed,
            suites: reports,
        })
    );
    Ok(if passed { 0 } else { 1 })
}
