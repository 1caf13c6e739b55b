//! Maps under test: declarative expression trees over source coordinates,
//! and the two-atom barycenter parameterization evaluated through the
//! measure machinery. Both expose evaluation in metric coordinates plus a
//! Lipschitz bound that makes grid certification sound.

use serde::{Deserialize, Serialize};

use crate::convexity::MaxPlusPoint;
use crate::convexity::{Flavor, MaxTimesPoint, TropicalPolytope};
use crate::error::{Error, Result};
use crate::measures::{MaxPlusPointMeasure, MaxTimesPointMeasure};
use crate::probe::domain::{from_metric, DomainComponent, ParamDomain, TargetGeometry};
use crate::semiring::{ExtendedReal, Finite, NegInf, UnitWeight};

/// Expression over source coordinates, built from joins, the flavor's
/// multiplication, projections, and constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Expr {
    Max { args: Vec<Expr> },
    Add { args: Vec<Expr> },
    Mul { args: Vec<Expr> },
    Coord { index: usize },
    Const { value: ExtendedReal },
}

impl Expr {
    pub fn coord(index: usize) -> Expr {
        Expr::Coord { index }
    }

    pub fn max(args: Vec<Expr>) -> Expr {
        Expr::Max { args }
    }

    pub fn add(args: Vec<Expr>) -> Expr {
        Expr::Add { args }
    }

    pub fn mul(args: Vec<Expr>) -> Expr {
        Expr::Mul { args }
    }

    fn validate(&self, flavor: Flavor, dim: usize) -> Result<()> {
        match self {
            Expr::Max { args } => {
                if args.is_empty() {
                    return Err(Error::InvalidExpression("empty max".into()));
                }
                args.iter().try_for_each(|a| a.validate(flavor, dim))
            }
            Expr::Add { args } => {
                if flavor != Flavor::MaxPlus {
                    return Err(Error::InvalidExpression(
                        "add is a max-plus operator".into(),
                    ));
                }
                if args.is_empty() {
                    return Err(Error::InvalidExpression("empty add".into()));
                }
                args.iter().try_for_each(|a| a.validate(flavor, dim))
            }
            Expr::Mul { args } => {
                if flavor != Flavor::MaxTimes {
                    return Err(Error::InvalidExpression(
                        "mul is a max-times operator".into(),
                    ));
                }
                if args.is_empty() {
                    return Err(Error::InvalidExpression("empty mul".into()));
                }
                args.iter().try_for_each(|a| a.validate(flavor, dim))
            }
            Expr::Coord { index } => {
                if *index >= dim {
                    return Err(Error::InvalidExpression(format!(
                        "coordinate {index} out of range (source dimension {dim})"
                    )));
                }
                Ok(())
            }
            Expr::Const { value } => match (flavor, value) {
                (Flavor::MaxTimes, NegInf) => Err(Error::InvalidExpression(
                    "max-times constants must lie in [0, 1]".into(),
                )),
                (Flavor::MaxTimes, Finite(v)) if !(0.0..=1.0).contains(v) => Err(
                    Error::InvalidExpression("max-times constants must lie in [0, 1]".into()),
                ),
                _ => Ok(()),
            },
        }
    }

    /// Upper bound and Lipschitz bound in metric coordinates, given per-
    /// coordinate upper bounds of the source domain.
    fn bounds(&self, flavor: Flavor, coord_upper: &[f64]) -> (f64, f64) {
        match self {
            Expr::Max { args } => args.iter().fold((0.0, 0.0), |(u, l), a| {
                let (ua, la) = a.bounds(flavor, coord_upper);
                (u.max(ua), l.max(la))
            }),
            Expr::Add { args } | Expr::Mul { args } => {
                let mut upper = 1.0;
                let mut lip = 0.0;
                for a in args {
                    let (ua, la) = a.bounds(flavor, coord_upper);
                    lip = lip * ua + la * upper;
                    upper *= ua;
                }
                (upper, lip)
            }
            Expr::Coord { index } => (coord_upper[*index], 1.0),
            Expr::Const { value } => (metric_const(flavor, *value), 0.0),
        }
    }
}

/// Metric value of a flavor constant: max-times scalars are metric values
/// already, max-plus scalars enter through the exponential.
fn metric_const(flavor: Flavor, value: ExtendedReal) -> f64 {
    match (flavor, value) {
        (Flavor::MaxPlus, v) => v.exp(),
        (Flavor::MaxTimes, NegInf) => 0.0,
        (Flavor::MaxTimes, Finite(v)) => v,
    }
}

/// A declarative piecewise tropical-linear map between compact coordinate
/// domains: a product source, a polytope target, and one expression per
/// target coordinate.
#[derive(Debug, Clone)]
pub struct PiecewiseMapSpec {
    name: String,
    flavor: Flavor,
    components: Vec<DomainComponent>,
    source: ParamDomain,
    target: TropicalPolytope,
    target_geometry: TargetGeometry,
    exprs: Vec<MetricExpr>,
    lipschitz: f64,
}

/// An expression compiled for metric-coordinate evaluation. Max-plus
/// constants are replaced by their exponentials at compile time so that a
/// single numeric evaluator serves both flavors.
#[derive(Debug, Clone, PartialEq)]
enum MetricExpr {
    Max(Vec<MetricExpr>),
    Prod(Vec<MetricExpr>),
    Coord(usize),
    Const(f64),
}

impl MetricExpr {
    fn compile(expr: &Expr, flavor: Flavor) -> MetricExpr {
        match expr {
            Expr::Max { args } => MetricExpr::Max(
                args.iter()
                    .map(|a| MetricExpr::compile(a, flavor))
                    .collect(),
            ),
            Expr::Add { args } | Expr::Mul { args } => MetricExpr::Prod(
                args.iter()
                    .map(|a| MetricExpr::compile(a, flavor))
                    .collect(),
            ),
            Expr::Coord { index } => MetricExpr::Coord(*index),
            Expr::Const { value } => MetricExpr::Const(metric_const(flavor, *value)),
        }
    }

    fn eval(&self, coords: &[f64]) -> f64 {
        match self {
            MetricExpr::Max(args) => args.iter().map(|a| a.eval(coords)).fold(0.0, f64::max),
            MetricExpr::Prod(args) => args.iter().map(|a| a.eval(coords)).product(),
            MetricExpr::Coord(index) => coords[*index],
            MetricExpr::Const(v) => *v,
        }
    }
}

impl PiecewiseMapSpec {
    pub fn new(
        name: impl Into<String>,
        flavor: Flavor,
        components: Vec<DomainComponent>,
        target: TropicalPolytope,
        exprs: Vec<Expr>,
    ) -> Result<Self> {
        if target.flavor() != flavor {
            return Err(Error::FlavorMismatch);
        }
        let source = ParamDomain::new(flavor, &components)?;
        if exprs.len() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                got: exprs.len(),
            });
        }
        for e in &exprs {
            e.validate(flavor, source.ambient_dim())?;
        }
        let coord_upper: Vec<f64> = (0..source.ambient_dim())
            .map(|j| source.coord_upper(j))
            .collect();
        let lipschitz = exprs
            .iter()
            .map(|e| e.bounds(flavor, &coord_upper).1)
            .fold(0.0, f64::max);
        let target_geometry = TargetGeometry::new(&target);
        let compiled = exprs
            .iter()
            .map(|e| MetricExpr::compile(e, flavor))
            .collect();
        Ok(PiecewiseMapSpec {
            name: name.into(),
            flavor,
            components,
            source,
            target,
            target_geometry,
            exprs: compiled,
            lipschitz,
        })
    }

    /// The identity map on a polytope.
    pub fn identity(name: impl Into<String>, domain: TropicalPolytope) -> Result<Self> {
        let dim = domain.dim();
        let exprs = (0..dim).map(Expr::coord).collect();
        PiecewiseMapSpec::new(
            name,
            domain.flavor(),
            vec![DomainComponent::Polytope(domain.clone())],
            domain,
            exprs,
        )
    }

    /// The coordinatewise join `(x, y) -> x v y` on a square of a polytope.
    pub fn join_map(name: impl Into<String>, factor: TropicalPolytope) -> Result<Self> {
        let dim = factor.dim();
        let exprs = (0..dim)
            .map(|j| Expr::max(vec![Expr::coord(j), Expr::coord(dim + j)]))
            .collect();
        PiecewiseMapSpec::new(
            name,
            factor.flavor(),
            vec![
                DomainComponent::Polytope(factor.clone()),
                DomainComponent::Polytope(factor.clone()),
            ],
            factor,
            exprs,
        )
    }

    /// The binary convex combination map `(x, y, t, p) -> t*x v p*y` on a
    /// product of polytope factors, with the combination weights as the last
    /// component. Works in either flavor with the matching operations.
    pub fn binary_combination(
        name: impl Into<String>,
        factors: &[TropicalPolytope],
    ) -> Result<Self> {
        let target = TropicalPolytope::product(factors)?;
        let flavor = target.flavor();
        let dim = target.dim();
        let t_index = 2 * dim;
        let p_index = 2 * dim + 1;
        let exprs = (0..dim)
            .map(|j| {
                let (tx, py) = match flavor {
                    Flavor::MaxPlus => (
                        Expr::add(vec![Expr::coord(t_index), Expr::coord(j)]),
                        Expr::add(vec![Expr::coord(p_index), Expr::coord(dim + j)]),
                    ),
                    Flavor::MaxTimes => (
                        Expr::mul(vec![Expr::coord(t_index), Expr::coord(j)]),
                        Expr::mul(vec![Expr::coord(p_index), Expr::coord(dim + j)]),
                    ),
                };
                Expr::max(vec![tx, py])
            })
            .collect();
        let mut components: Vec<DomainComponent> = factors
            .iter()
            .chain(factors.iter())
            .cloned()
            .map(DomainComponent::Polytope)
            .collect();
        components.push(DomainComponent::combo_weights());
        PiecewiseMapSpec::new(name, flavor, components, target, exprs)
    }
}

/// A continuous map probed for openness: evaluation in metric coordinates
/// over a parameterized source, plus the data needed to reason about grids.
pub trait ProbeMap {
    fn name(&self) -> &str;
    fn flavor(&self) -> Flavor;
    fn source(&self) -> &ParamDomain;
    fn target(&self) -> &TargetGeometry;
    fn target_polytope(&self) -> &TropicalPolytope;
    /// Image of a source point given in metric coordinates.
    fn eval_metric(&self, coords: &[f64]) -> Vec<f64>;
    /// Lipschitz bound of `eval_metric` over the source domain, sup metric
    /// to sup metric.
    fn lipschitz(&self) -> f64;
}

impl ProbeMap for PiecewiseMapSpec {
    fn name(&self) -> &str {
        &self.name
    }

    fn flavor(&self) -> Flavor {
        self.flavor
    }

    fn source(&self) -> &ParamDomain {
        &self.source
    }

    fn target(&self) -> &TargetGeometry {
        &self.target_geometry
    }

    fn target_polytope(&self) -> &TropicalPolytope {
        &self.target
    }

    fn eval_metric(&self, coords: &[f64]) -> Vec<f64> {
        self.exprs.iter().map(|e| e.eval(coords)).collect()
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

// JSON form of a map spec.
#[derive(Serialize, Deserialize)]
struct MapSpecRepr {
    #[serde(default)]
    name: String,
    flavor: Flavor,
    source: Vec<DomainComponent>,
    target: TropicalPolytope,
    expr: Vec<Expr>,
}

impl Serialize for PiecewiseMapSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let exprs = self.decompiled();
        MapSpecRepr {
            name: self.name.clone(),
            flavor: self.flavor,
            source: self.components.clone(),
            target: self.target.clone(),
            expr: exprs,
        }
        .serialize(serializer)
    }
}

impl PiecewiseMapSpec {
    fn decompiled(&self) -> Vec<Expr> {
        fn walk(e: &MetricExpr, flavor: Flavor) -> Expr {
            match e {
                MetricExpr::Max(args) => Expr::max(args.iter().map(|a| walk(a, flavor)).collect()),
                MetricExpr::Prod(args) => {
                    let args = args.iter().map(|a| walk(a, flavor)).collect();
                    match flavor {
                        Flavor::MaxPlus => Expr::add(args),
                        Flavor::MaxTimes => Expr::mul(args),
                    }
                }
                MetricExpr::Coord(i) => Expr::coord(*i),
                MetricExpr::Const(v) => Expr::Const {
                    value: match flavor {
                        Flavor::MaxPlus => {
                            if *v == 0.0 {
                                NegInf
                            } else {
                                Finite(v.ln())
                            }
                        }
                        Flavor::MaxTimes => Finite(*v),
                    },
                },
            }
        }
        self.exprs.iter().map(|e| walk(e, self.flavor)).collect()
    }
}

impl<'de> Deserialize<'de> for PiecewiseMapSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = MapSpecRepr::deserialize(deserializer)?;
        PiecewiseMapSpec::new(repr.name, repr.flavor, repr.source, repr.target, repr.expr)
            .map_err(serde::de::Error::custom)
    }
}

/// The two-atom barycenter parameterization `(x, y, t, p) -> bary(t.d_x v
/// p.d_y)`, evaluated through the measure and barycenter machinery rather
/// than an expression tree. Pointwise it factors through the binary
/// combination map; probing both and comparing verdicts exercises the
/// equivalence between openness of the barycenter restriction and of the
/// combination map.
#[derive(Debug, Clone)]
pub struct BinaryBarycenterMap {
    name: String,
    flavor: Flavor,
    source: ParamDomain,
    target: TropicalPolytope,
    target_geometry: TargetGeometry,
    dim: usize,
    lipschitz: f64,
}

impl BinaryBarycenterMap {
    pub fn new(name: impl Into<String>, factors: &[TropicalPolytope]) -> Result<Self> {
        let target = TropicalPolytope::product(factors)?;
        let flavor = target.flavor();
        let dim = target.dim();
        let mut components: Vec<DomainComponent> = factors
            .iter()
            .chain(factors.iter())
            .cloned()
            .map(DomainComponent::Polytope)
            .collect();
        components.push(DomainComponent::combo_weights());
        let source = ParamDomain::new(flavor, &components)?;
        // each target coordinate is max(t*x_j, p*y_j): products of pairs
        // bounded by the weight bound (1) and the coordinate bound
        let coord_bound = (0..dim)
            .map(|j| source.coord_upper(j).max(source.coord_upper(dim + j)))
            .fold(0.0, f64::max);
        let lipschitz = 1.0 + coord_bound;
        let target_geometry = TargetGeometry::new(&target);
        Ok(BinaryBarycenterMap {
            name: name.into(),
            flavor,
            source,
            target,
            target_geometry,
            dim,
            lipschitz,
        })
    }
}

impl ProbeMap for BinaryBarycenterMap {
    fn name(&self) -> &str {
        &self.name
    }

    fn flavor(&self) -> Flavor {
        self.flavor
    }

    fn source(&self) -> &ParamDomain {
        &self.source
    }

    fn target(&self) -> &TargetGeometry {
        &self.target_geometry
    }

    fn target_polytope(&self) -> &TropicalPolytope {
        &self.target
    }

    fn eval_metric(&self, coords: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let (t, p) = (coords[2 * d], coords[2 * d + 1]);
        match self.flavor {
            Flavor::MaxTimes => {
                let x = MaxTimesPoint::from_values(&coords[0..d]).expect("metric coordinates");
                let y = MaxTimesPoint::from_values(&coords[d..2 * d]).expect("metric coordinates");
                let nu = MaxTimesPointMeasure::new(
                    vec![x, y],
                    vec![
                        UnitWeight::new(t).expect("metric coordinates"),
                        UnitWeight::new(p).expect("metric coordinates"),
                    ],
                )
                .expect("combination weights join to the unit");
                nu.barycenter().values()
            }
            Flavor::MaxPlus => {
                let decode = |slice: &[f64]| MaxPlusPoint::new(from_metric(Flavor::MaxPlus, slice));
                let x = decode(&coords[0..d]);
                let y = decode(&coords[d..2 * d]);
                let ln = |v: f64| if v == 0.0 { NegInf } else { Finite(v.ln()) };
                let mu = MaxPlusPointMeasure::new(vec![x, y], vec![ln(t), ln(p)])
                    .expect("combination weights join to the unit");
                mu.barycenter().coords().iter().map(|c| c.exp()).collect()
            }
        }
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}
