//! Witness certification by branch-and-bound over the weight grid.
//!
//! A certificate states: no source point within `eps` of the witness source
//! maps within `tol` of the witness target. Cells of the parameter box are
//! discarded either because they lie entirely outside the epsilon-ball, or
//! because the Lipschitz bound puts their whole image further than `tol`
//! from the target. Cells that reach the resolution floor undecided are
//! reported, never silently passed.

use crate::probe::domain::metric_distance;
use crate::probe::map::ProbeMap;
use crate::probe::search::strata_combos;

#[derive(Debug, Clone)]
pub enum Certification {
    /// No preimage exists within the ball; `margin` is a certified lower
    /// bound on the distance from the target to the image of the ball.
    Certified {
        margin: f64,
        cells: u64,
        strata: usize,
    },
    /// A genuine preimage was found; the candidate is not a witness.
    Disproved { preimage: Vec<f64>, distance: f64 },
    /// The grid reached the resolution floor with undecided cells.
    Inconclusive {
        undecided: usize,
        cells: u64,
        best_distance: f64,
    },
}

const MAX_CELLS: u64 = 4_000_000;
const MAX_POLISHES: usize = 8;

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Cell {
    fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    fn radius(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (b - a))
            .fold(0.0, f64::max)
    }

    fn widest_axis(&self) -> usize {
        let mut best = 0;
        let mut width = 0.0;
        for (i, (a, b)) in self.lo.iter().zip(&self.hi).enumerate() {
            if b - a > width {
                width = b - a;
                best = i;
            }
        }
        best
    }
}

/// Runs the branch-and-bound certification for one witness candidate.
pub fn certify_no_preimage(
    map: &dyn ProbeMap,
    x_metric: &[f64],
    y: &[f64],
    eps: f64,
    tol: f64,
    resolution: f64,
) -> Certification {
    let domain = map.source();
    let center = domain.canonical_params(x_metric);
    let window = domain.param_window(&center, eps);
    let combos = strata_combos(&domain.admissible_strata(&center, eps));

    let decode_lip = domain.decode_lipschitz();
    let map_lip = map.lipschitz() * decode_lip;

    let mut cells: u64 = 0;
    let mut undecided: usize = 0;
    let mut polishes = 0usize;
    let mut margin = f64::INFINITY;
    let mut best_distance = f64::INFINITY;

    for combo in &combos {
        let pinned: Vec<usize> = domain
            .blocks()
            .iter()
            .zip(combo)
            .map(|(b, &s)| b.param_offset + s)
            .collect();
        let free: Vec<usize> = (0..domain.param_dim())
            .filter(|i| !pinned.contains(i))
            .collect();

        let assemble = |free_values: &[f64]| -> Vec<f64> {
            let mut params = vec![0.0; domain.param_dim()];
            for (&i, &v) in free.iter().zip(free_values) {
                params[i] = v;
            }
            for &i in &pinned {
                params[i] = 1.0;
            }
            params
        };

        if free.is_empty() {
            // zero-dimensional stratum: a single point to test
            let params = assemble(&[]);
            let point = domain.decode(&params);
            let d_src = metric_distance(&point, x_metric);
            let d_tgt = metric_distance(&map.eval_metric(&point), y);
            cells += 1;
            if d_src <= eps {
                best_distance = best_distance.min(d_tgt);
                if d_tgt <= tol {
                    return Certification::Disproved {
                        preimage: params,
                        distance: d_tgt,
                    };
                }
                margin = margin.min(d_tgt);
            }
            continue;
        }

        let root = Cell {
            lo: free.iter().map(|&i| window[i].0).collect(),
            hi: free.iter().map(|&i| window[i].1).collect(),
        };
        let mut stack = vec![root];

        while let Some(cell) = stack.pop() {
            cells += 1;
            if cells > MAX_CELLS {
                return Certification::Inconclusive {
                    undecided: undecided + stack.len() + 1,
                    cells,
                    best_distance,
                };
            }
            let c = cell.center();
            let rho = cell.radius();
            let params = assemble(&c);
            let point = domain.decode(&params);
            let d_src = metric_distance(&point, x_metric);

            // entirely outside the epsilon-ball
            if d_src - decode_lip * rho > eps {
                continue;
            }

            let d_tgt = metric_distance(&map.eval_metric(&point), y);
            if d_src <= eps {
                best_distance = best_distance.min(d_tgt);
                if d_tgt <= tol {
                    return Certification::Disproved {
                        preimage: params,
                        distance: d_tgt,
                    };
                }
            }

            // image of the whole cell stays away from the target
            let slack = d_tgt - map_lip * rho;
            if slack > tol {
                margin = margin.min(slack);
                continue;
            }

            if 2.0 * rho <= resolution {
                // floor reached; one more attempt to settle it by descent
                // from the cell center
                if polishes < MAX_POLISHES {
                    polishes += 1;
                    let (found, _) = crate::probe::search::descend_from(
                        map,
                        x_metric,
                        y,
                        eps,
                        tol,
                        params.clone(),
                        &free,
                        &window,
                    );
                    if let Some(p) = found {
                        let point = domain.decode(&p);
                        let d = metric_distance(&map.eval_metric(&point), y);
                        return Certification::Disproved {
                            preimage: p,
                            distance: d,
                        };
                    }
                }
                undecided += 1;
                continue;
            }

            let axis = cell.widest_axis();
            let mid = 0.5 * (cell.lo[axis] + cell.hi[axis]);
            let mut left = Cell {
                lo: cell.lo.clone(),
                hi: cell.hi.clone(),
            };
            left.hi[axis] = mid;
            let mut right = Cell {
                lo: cell.lo,
                hi: cell.hi,
            };
            right.lo[axis] = mid;
            stack.push(left);
            stack.push(right);
        }
    }

    if undecided > 0 {
        Certification::Inconclusive {
            undecided,
            cells,
            best_distance,
        }
    } else {
        Certification::Certified {
            margin: if margin.is_finite() {
                margin
            } else {
                best_distance
            },
            cells,
            strata: combos.len(),
        }
    }
}
