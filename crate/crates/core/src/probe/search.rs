//! Preimage search inside an epsilon-ball: multi-start pattern descent over
//! the weight parameterization, one normalization stratum at a time.
//!
//! The searcher is a semi-decision helper: a hit is a genuine preimage (the
//! decoded point is inside the ball and maps within tolerance of the
//! target), a miss only makes the target a candidate for certification.

use crate::probe::domain::{metric_distance, ParamDomain};
use crate::probe::map::ProbeMap;

/// Deterministic low-discrepancy sequence (radical inverse).
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut fraction = 1.0;
    let mut value = 0.0;
    while index > 0 {
        fraction /= base as f64;
        value += fraction * (index % base) as f64;
        index /= base;
    }
    value
}

pub const HALTON_BASES: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

const MAX_EVALS_PER_START: u64 = 4_000;
const EXTRA_STARTS: usize = 2;
const MAX_STRATA_COMBOS: usize = 256;
const INFEASIBILITY_PENALTY: f64 = 16.0;

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    /// Parameters of a found preimage, if any.
    pub preimage: Option<Vec<f64>>,
    /// Best genuine (unpenalized, feasible-side) distance to the target seen.
    pub best_distance: f64,
    pub evals: u64,
}

/// Cartesian product of per-block stratum choices, capped.
pub fn strata_combos(per_block: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for options in per_block {
        let mut next = Vec::with_capacity(combos.len() * options.len());
        for combo in &combos {
            for &s in options {
                if next.len() >= MAX_STRATA_COMBOS {
                    break;
                }
                let mut c = combo.clone();
                c.push(s);
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

struct Objective<'a> {
    map: &'a dyn ProbeMap,
    x_metric: &'a [f64],
    y: &'a [f64],
    eps: f64,
    evals: u64,
}

impl<'a> Objective<'a> {
    /// Returns (penalized value, genuine target distance, feasible).
    fn eval(&mut self, domain: &ParamDomain, params: &[f64]) -> (f64, f64, bool) {
        self.evals += 1;
        let point = domain.decode(params);
        let d_src = metric_distance(&point, self.x_metric);
        let d_tgt = metric_distance(&self.map.eval_metric(&point), self.y);
        let slack = (d_src - self.eps).max(0.0);
        (d_tgt + INFEASIBILITY_PENALTY * slack, d_tgt, slack <= 1e-12)
    }
}

/// Searches the epsilon-ball around `x_metric` for a source point mapping
/// within `tol` of `y`. Deterministic: starts come from the canonical
/// parameters and a fixed low-discrepancy set.
pub fn find_preimage(
    map: &dyn ProbeMap,
    x_metric: &[f64],
    y: &[f64],
    eps: f64,
    tol: f64,
) -> SearchOutcome {
    let domain = map.source();
    let center = domain.canonical_params(x_metric);
    let window = domain.param_window(&center, eps);
    let combos = strata_combos(&domain.admissible_strata(&center, eps));

    let mut objective = Objective {
        map,
        x_metric,
        y,
        eps,
        evals: 0,
    };
    let mut best_overall = f64::INFINITY;

    for (ci, combo) in combos.iter().enumerate() {
        // free parameter indices for this stratum choice
        let pinned: Vec<usize> = domain
            .blocks()
            .iter()
            .zip(combo)
            .map(|(b, &s)| b.param_offset + s)
            .collect();
        let free: Vec<usize> = (0..domain.param_dim())
            .filter(|i| !pinned.contains(i))
            .collect();

        let mut starts: Vec<Vec<f64>> = Vec::with_capacity(1 + EXTRA_STARTS);
        let mut pinned_center = center.clone();
        domain.pin_strata(&mut pinned_center, combo);
        for (i, &(lo, hi)) in window.iter().enumerate() {
            if !pinned.contains(&i) {
                pinned_center[i] = pinned_center[i].clamp(lo, hi);
            }
        }
        starts.push(pinned_center);
        for k in 0..EXTRA_STARTS {
            let mut s = center.clone();
            for (fi, &i) in free.iter().enumerate() {
                let (lo, hi) = window[i];
                let u = halton(
                    (ci * EXTRA_STARTS + k + 1) as u64,
                    HALTON_BASES[fi % HALTON_BASES.len()],
                );
                s[i] = lo + u * (hi - lo);
            }
            domain.pin_strata(&mut s, combo);
            starts.push(s);
        }

        for start in starts {
            let outcome = descend(domain, &mut objective, start, &free, &window, eps, tol);
            best_overall = best_overall.min(outcome.1);
            if let Some(params) = outcome.0 {
                return SearchOutcome {
                    preimage: Some(params),
                    best_distance: outcome.1,
                    evals: objective.evals,
                };
            }
        }
    }

    SearchOutcome {
        preimage: None,
        best_distance: best_overall,
        evals: objective.evals,
    }
}

/// Descends from an explicit start (used by certification to settle floor
/// cells from a fresh basin). Returns a found preimage and best distance.
#[allow(clippy::too_many_arguments)]
pub fn descend_from(
    map: &dyn ProbeMap,
    x_metric: &[f64],
    y: &[f64],
    eps: f64,
    tol: f64,
    start: Vec<f64>,
    free: &[usize],
    window: &[(f64, f64)],
) -> (Option<Vec<f64>>, f64) {
    let domain = map.source();
    let mut objective = Objective {
        map,
        x_metric,
        y,
        eps,
        evals: 0,
    };
    descend(domain, &mut objective, start, free, window, eps, tol)
}

/// Greedy pattern descent with coordinate and pair moves and step halving.
/// Returns a found preimage (feasible, within tolerance) and the best
/// genuine distance encountered.
fn descend(
    domain: &ParamDomain,
    objective: &mut Objective,
    start: Vec<f64>,
    free: &[usize],
    window: &[(f64, f64)],
    _eps: f64,
    tol: f64,
) -> (Option<Vec<f64>>, f64) {
    let budget = objective.evals + MAX_EVALS_PER_START;
    let mut current = start;
    let (mut value, mut distance, mut feasible) = objective.eval(domain, &current);
    let mut best_distance = if feasible { distance } else { f64::INFINITY };
    if feasible && distance <= tol {
        return (Some(current), distance);
    }

    let mut step = window.iter().map(|(lo, hi)| hi - lo).fold(0.0f64, f64::max) / 2.0;
    if step <= 0.0 {
        return (None, best_distance);
    }

    while step > 1e-9 && objective.evals < budget {
        let mut improved = false;

        // single-coordinate moves
        'single: for &i in free {
            for sgn in [1.0, -1.0] {
                let target = (current[i] + sgn * step).clamp(window[i].0, window[i].1);
                if target == current[i] {
                    continue;
                }
                let mut candidate = current.clone();
                candidate[i] = target;
                let (v, d, f) = objective.eval(domain, &candidate);
                if f && d < best_distance {
                    best_distance = d;
                }
                if v + 1e-15 < value {
                    current = candidate;
                    value = v;
                    distance = d;
                    feasible = f;
                    improved = true;
                    if feasible && distance <= tol {
                        return (Some(current), best_distance.min(distance));
                    }
                    break 'single;
                }
                if objective.evals >= budget {
                    break 'single;
                }
            }
        }

        // pair moves break ties where two active terms must move together
        if !improved {
            'pair: for (a, &i) in free.iter().enumerate() {
                for &j in free.iter().skip(a + 1) {
                    for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let ti = (current[i] + si * step).clamp(window[i].0, window[i].1);
                        let tj = (current[j] + sj * step).clamp(window[j].0, window[j].1);
                        if ti == current[i] && tj == current[j] {
                            continue;
                        }
                        let mut candidate = current.clone();
                        candidate[i] = ti;
                        candidate[j] = tj;
                        let (v, d, f) = objective.eval(domain, &candidate);
                        if f && d < best_distance {
                            best_distance = d;
                        }
                        if v + 1e-15 < value {
                            current = candidate;
                            value = v;
                            distance = d;
                            feasible = f;
                            improved = true;
                            if feasible && distance <= tol {
                                return (Some(current), best_distance.min(distance));
                            }
                            break 'pair;
                        }
                        if objective.evals >= budget {
                            break 'pair;
                        }
                    }
                }
            }
        }

        if !improved {
            step *= 0.5;
        }
    }

    let _ = (value, distance, feasible);
    (None, best_distance)
}
