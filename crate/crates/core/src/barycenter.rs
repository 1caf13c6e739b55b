//! Barycenters of finitely-supported measures on coordinate compacta, and
//! the structural checks that tie them to the measure functors: the monad
//! identity, naturality under pushforward, and the commuting square that
//! transports the max-times barycenter through an affine embedding.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::convexity::{AffineEmbedding, MaxPlusPoint, MaxTimesPoint};
use crate::error::Result;
use crate::measures::{
    FiniteSpace, MaxPlusMeasure, MaxPlusPointMeasure, MaxTimesMeasure, MaxTimesPointMeasure,
    SpaceMap,
};
use crate::report::CheckReport;
use crate::semiring::{ExtendedReal, Finite, NegInf, UnitWeight};

impl MaxPlusPointMeasure {
    /// The barycenter: coordinate `t` is the measure of the `t`-th
    /// coordinate projection, `max_i (w_i + atom_i[t])`.
    pub fn barycenter(&self) -> MaxPlusPoint {
        let dim = self.dim();
        let coords = (0..dim)
            .map(|j| {
                self.atoms()
                    .iter()
                    .zip(self.weights())
                    .map(|(a, &w)| w.add(a.coords()[j]))
                    .fold(NegInf, ExtendedReal::join)
            })
            .collect();
        MaxPlusPoint::new(coords)
    }
}

impl MaxTimesPointMeasure {
    /// The barycenter: coordinate `t` is `max_i (w_i * atom_i[t])`.
    pub fn barycenter(&self) -> MaxTimesPoint {
        let dim = self.dim();
        let coords = (0..dim)
            .map(|j| {
                self.atoms()
                    .iter()
                    .zip(self.weights())
                    .map(|(a, &w)| w.mul(a.coords()[j]))
                    .fold(UnitWeight::ZERO, UnitWeight::join)
            })
            .collect();
        MaxTimesPoint::new(coords)
    }
}

/// Views a measure on a finite space as a measure-of-Diracs on the simplex
/// of measures and takes its barycenter there.
fn dirac_barycenter_max_plus(mu: &MaxPlusMeasure) -> Result<MaxPlusMeasure> {
    let atoms: Vec<MaxPlusPoint> = mu
        .space()
        .points()
        .iter()
        .map(|p| Ok(MaxPlusMeasure::dirac(mu.space().clone(), p)?.weight_point()))
        .collect::<Result<_>>()?;
    let lifted = MaxPlusPointMeasure::new(atoms, mu.weights().to_vec())?;
    MaxPlusMeasure::from_weight_point(mu.space().clone(), &lifted.barycenter())
}

fn dirac_barycenter_max_times(nu: &MaxTimesMeasure) -> Result<MaxTimesMeasure> {
    let atoms: Vec<MaxTimesPoint> = nu
        .space()
        .points()
        .iter()
        .map(|p| Ok(MaxTimesMeasure::dirac(nu.space().clone(), p)?.weight_point()))
        .collect::<Result<_>>()?;
    let lifted = MaxTimesPointMeasure::new(atoms, nu.weights().to_vec())?;
    MaxTimesMeasure::from_weight_point(nu.space().clone(), &lifted.barycenter())
}

fn max_plus_weight_grid() -> Vec<ExtendedReal> {
    vec![
        Finite(0.0),
        Finite(-0.25),
        Finite(-0.5),
        Finite(-0.75),
        Finite(-1.0),
        NegInf,
    ]
}

fn max_times_weight_grid() -> Vec<UnitWeight> {
    [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|&v| UnitWeight::new(v).expect("grid values are in range"))
        .collect()
}

/// All normalized weight pairs over a grid (at least one entry at the unit).
fn normalized_mp_pairs(grid: &[ExtendedReal]) -> Vec<(ExtendedReal, ExtendedReal)> {
    let mut pairs = Vec::new();
    for &a in grid {
        for &b in grid {
            if a.join(b) == Finite(0.0) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

fn normalized_mt_pairs(grid: &[UnitWeight]) -> Vec<(UnitWeight, UnitWeight)> {
    let mut pairs = Vec::new();
    for &a in grid {
        for &b in grid {
            if a.join(b) == UnitWeight::ONE {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

fn random_normalized_mp(rng: &mut ChaCha8Rng, n: usize) -> Vec<ExtendedReal> {
    let mut w: Vec<ExtendedReal> = (0..n)
        .map(|_| {
            if rng.random_range(0..6) == 0 {
                NegInf
            } else {
                Finite(-rng.random_range(0.0..4.0))
            }
        })
        .collect();
    let pick = rng.random_range(0..n);
    w[pick] = Finite(0.0);
    w
}

fn random_normalized_mt(rng: &mut ChaCha8Rng, n: usize) -> Vec<UnitWeight> {
    let mut w: Vec<UnitWeight> = (0..n)
        .map(|_| UnitWeight::new(rng.random_range(0.0..=1.0)).expect("in range"))
        .collect();
    let pick = rng.random_range(0..n);
    w[pick] = UnitWeight::ONE;
    w
}

/// The monad identity: lifting a measure to a measure of Diracs and taking
/// the barycenter gives the measure back, exactly. Checked on exhaustive
/// two-point grids in both models and on random measures over spaces of up
/// to three points.
pub fn check_monad_identity(random_trials: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(0.0);
    let two = FiniteSpace::two_point();

    for (a, b) in normalized_mp_pairs(&max_plus_weight_grid()) {
        let mu = MaxPlusMeasure::new(two.clone(), vec![a, b]).expect("grid pair is normalized");
        let back = dirac_barycenter_max_plus(&mu).expect("lift is well-formed");
        report.record_exact(back == mu, || format!("max-plus grid pair ({a}, {b})"));
    }
    for (a, b) in normalized_mt_pairs(&max_times_weight_grid()) {
        let nu = MaxTimesMeasure::new(two.clone(), vec![a, b]).expect("grid pair is normalized");
        let back = dirac_barycenter_max_times(&nu).expect("lift is well-formed");
        report.record_exact(back == nu, || {
            format!("max-times grid pair ({}, {})", a.value(), b.value())
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_trials {
        let n = rng.random_range(1..=3);
        let space = FiniteSpace::new((0..n).map(|i| format!("x{i}")).collect::<Vec<_>>())
            .expect("labels distinct");
        let mu = MaxPlusMeasure::new(space.clone(), random_normalized_mp(&mut rng, n))
            .expect("one weight pinned to the unit");
        let back = dirac_barycenter_max_plus(&mu).expect("lift is well-formed");
        report.record_exact(back == mu, || format!("max-plus random {:?}", mu.weights()));

        let nu = MaxTimesMeasure::new(space, random_normalized_mt(&mut rng, n))
            .expect("one weight pinned to the unit");
        let back = dirac_barycenter_max_times(&nu).expect("lift is well-formed");
        report.record_exact(back == nu, || {
            format!("max-times random {:?}", nu.weights())
        });
    }
    report
}

/// One naturality case: a measure-of-measures on the source, pushed along
/// the two composite paths of the naturality square, compared exactly.
fn naturality_case_max_plus(
    f: &SpaceMap,
    inner: &[MaxPlusMeasure],
    outer: &[ExtendedReal],
) -> Result<bool> {
    let atoms: Vec<MaxPlusPoint> = inner.iter().map(|m| m.weight_point()).collect();
    let m = MaxPlusPointMeasure::new(atoms, outer.to_vec())?;

    // functor twice, then barycenter on the target
    let pushed_atoms: Vec<MaxPlusPoint> = inner
        .iter()
        .map(|im| Ok(im.pushforward(f)?.weight_point()))
        .collect::<Result<_>>()?;
    let left = MaxPlusPointMeasure::new(pushed_atoms, outer.to_vec())?.barycenter();

    // barycenter on the source, then one functor application
    let bary = MaxPlusMeasure::from_weight_point(f.source().clone(), &m.barycenter())?;
    let right = bary.pushforward(f)?.weight_point();

    Ok(left == right)
}

fn naturality_case_max_times(
    f: &SpaceMap,
    inner: &[MaxTimesMeasure],
    outer: &[UnitWeight],
) -> Result<bool> {
    let atoms: Vec<MaxTimesPoint> = inner.iter().map(|m| m.weight_point()).collect();
    let m = MaxTimesPointMeasure::new(atoms, outer.to_vec())?;

    let pushed_atoms: Vec<MaxTimesPoint> = inner
        .iter()
        .map(|im| Ok(im.pushforward(f)?.weight_point()))
        .collect::<Result<_>>()?;
    let left = MaxTimesPointMeasure::new(pushed_atoms, outer.to_vec())?.barycenter();

    let bary = MaxTimesMeasure::from_weight_point(f.source().clone(), &m.barycenter())?;
    let right = bary.pushforward(f)?.weight_point();

    Ok(left == right)
}

/// Naturality of the barycenter under pushforward: exhaustive over all maps
/// of a two-point space with gridded weights, then random instances over
/// spaces of up to three points.
pub fn check_naturality(random_trials: u64, seed: u64) -> CheckReport {
    let mut report = CheckReport::new(0.0);
    let two = FiniteSpace::two_point();

    let maps: Vec<SpaceMap> = [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]
        .iter()
        .map(|(im0, im1)| {
            SpaceMap::from_fn(two.clone(), two.clone(), |p| {
                if p == "0" {
                    im0.to_string()
                } else {
                    im1.to_string()
                }
            })
            .expect("images are in the target")
        })
        .collect();

    let mp_pairs = normalized_mp_pairs(&max_plus_weight_grid());
    let mp_measures: Vec<MaxPlusMeasure> = mp_pairs
        .iter()
        .map(|&(a, b)| MaxPlusMeasure::new(two.clone(), vec![a, b]).expect("normalized"))
        .collect();
    for f in &maps {
        for m1 in &mp_measures {
            for m2 in &mp_measures {
                for &(a, b) in &mp_pairs {
                    let ok = naturality_case_max_plus(f, &[m1.clone(), m2.clone()], &[a, b])
                        .expect("well-formed case");
                    report.record_exact(ok, || format!("max-plus exhaustive: outer ({a}, {b})"));
                }
            }
        }
    }

    let mt_pairs = normalized_mt_pairs(&max_times_weight_grid());
    let mt_measures: Vec<MaxTimesMeasure> = mt_pairs
        .iter()
        .map(|&(a, b)| MaxTimesMeasure::new(two.clone(), vec![a, b]).expect("normalized"))
        .collect();
    for f in &maps {
        for m1 in &mt_measures {
            for m2 in &mt_measures {
                for &(a, b) in &mt_pairs {
                    let ok = naturality_case_max_times(f, &[m1.clone(), m2.clone()], &[a, b])
                        .expect("well-formed case");
                    report.record_exact(ok, || {
                        format!("max-times exhaustive: outer ({}, {})", a.value(), b.value())
                    });
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_trials {
        let ns = rng.random_range(1..=3);
        let nt = rng.random_range(1..=3);
        let source = FiniteSpace::new((0..ns).map(|i| format!("s{i}")).collect::<Vec<_>>())
            .expect("labels distinct");
        let target = FiniteSpace::new((0..nt).map(|i| format!("t{i}")).collect::<Vec<_>>())
            .expect("labels distinct");
        let assignment: Vec<usize> = (0..ns).map(|_| rng.random_range(0..nt)).collect();
        let f = SpaceMap::from_fn(source.clone(), target.clone(), |p| {
            let i: usize = p[1..].parse().expect("generated label");
            format!("t{}", assignment[i])
        })
        .expect("images are in the target");

        let atom_count = rng.random_range(1..=3);
        let inner: Vec<MaxPlusMeasure> = (0..atom_count)
            .map(|_| {
                MaxPlusMeasure::new(source.clone(), random_normalized_mp(&mut rng, ns))
                    .expect("one weight pinned to the unit")
            })
            .collect();
        let outer = random_normalized_mp(&mut rng, atom_count);
        let ok = naturality_case_max_plus(&f, &inner, &outer).expect("well-formed case");
        report.record_exact(ok, || format!("max-plus random: outer {outer:?}"));

        let inner: Vec<MaxTimesMeasure> = (0..atom_count)
            .map(|_| {
                MaxTimesMeasure::new(source.clone(), random_normalized_mt(&mut rng, ns))
                    .expect("one weight pinned to the unit")
            })
            .collect();
        let outer = random_normalized_mt(&mut rng, atom_count);
        let ok = naturality_case_max_times(&f, &inner, &outer).expect("well-formed case");
        report.record_exact(ok, || "max-times random case".to_string());
    }
    report
}

/// The commuting square that transports the max-times barycenter through an
/// affine embedding: embedding the barycenter equals the barycenter of the
/// transported measure, within `tolerance` componentwise.
pub fn check_barycenter_transport(
    trials: u64,
    max_dim: usize,
    max_atoms: usize,
    tolerance: f64,
    seed: u64,
) -> CheckReport {
    let mut report = CheckReport::new(tolerance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let dim = rng.random_range(1..=max_dim);
        let atom_count = rng.random_range(1..=max_atoms);
        let atoms: Vec<MaxTimesPoint> = (0..atom_count)
            .map(|_| {
                MaxTimesPoint::from_values(
                    &(0..dim)
                        .map(|_| match rng.random_range(0..8) {
                            0 => 0.0,
                            1 => 1.0,
                            _ => rng.random_range(0.0..=1.0),
                        })
                        .collect::<Vec<_>>(),
                )
                .expect("sampled in range")
            })
            .collect();
        let weights = random_normalized_mt(&mut rng, atom_count);
        let nu = MaxTimesPointMeasure::new(atoms.clone(), weights).expect("normalized");

        let h = AffineEmbedding::covering(&atoms, dim);
        let lhs = h
            .apply(&nu.barycenter())
            .expect("barycenter stays in the cube");
        let rhs = nu.transport(&h).expect("atoms fit").barycenter();

        let mut worst = 0.0f64;
        for (l, r) in lhs.coords().iter().zip(rhs.coords()) {
            let diff = match (l, r) {
                (Finite(a), Finite(b)) => (a - b).abs(),
                (NegInf, NegInf) => 0.0,
                _ => f64::INFINITY,
            };
            worst = worst.max(diff);
        }
        report.record(worst, || {
            format!("dim={dim} atoms={atom_count} weights={:?}", nu.weights())
        });
    }
    report
}
