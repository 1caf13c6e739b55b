//! Membership ground truth by brute force: exhaustive search over a grid of
//! normalized weight tuples, independent of the projection algorithm.

use maslov_core::convexity::{hull_member, max_plus_combination, MaxPlusPoint, TropicalPolytope};
use maslov_core::semiring::{exp_distance, ExtendedReal, Finite, NegInf};

fn weight_grid() -> Vec<ExtendedReal> {
    let mut grid: Vec<ExtendedReal> = (0..=15).map(|k| Finite(-0.2 * k as f64)).collect();
    grid.push(NegInf);
    grid
}

/// Smallest distance from the query to any grid combination of the
/// generators (normalized tuples only).
fn grid_oracle_distance(query: &[ExtendedReal], gens: &[MaxPlusPoint]) -> f64 {
    let grid = weight_grid();
    let mut best = f64::INFINITY;
    let mut lambdas = vec![NegInf; gens.len()];
    fn recurse(
        gens: &[MaxPlusPoint],
        grid: &[ExtendedReal],
        lambdas: &mut Vec<ExtendedReal>,
        at: usize,
        query: &[ExtendedReal],
        best: &mut f64,
    ) {
        if at == gens.len() {
            let top = lambdas.iter().copied().fold(NegInf, ExtendedReal::join);
            if top != Finite(0.0) {
                return;
            }
            let combo = max_plus_combination(gens, lambdas).expect("normalized tuple");
            let dist = combo
                .coords()
                .iter()
                .zip(query)
                .map(|(&a, &b)| exp_distance(a, b))
                .fold(0.0, f64::max);
            if dist < *best {
                *best = dist;
            }
            return;
        }
        for &l in grid {
            lambdas[at] = l;
            recurse(gens, grid, lambdas, at + 1, query, best);
        }
    }
    recurse(gens, &grid, &mut lambdas, 0, query, &mut best);
    best
}

#[test]
fn oracle_confirms_members_on_the_two_point_simplex() {
    let TropicalPolytope::MaxPlus(gens) = TropicalPolytope::max_plus_simplex(2) else {
        unreachable!()
    };
    let poly = TropicalPolytope::max_plus(gens.clone()).unwrap();

    // grid combinations are members by both routes
    for q in [
        vec![Finite(0.0), NegInf],
        vec![Finite(-0.4), Finite(0.0)],
        vec![Finite(0.0), Finite(-1.0)],
        vec![NegInf, Finite(0.0)],
    ] {
        assert!(
            grid_oracle_distance(&q, &gens) < 1e-12,
            "oracle misses {q:?}"
        );
        assert!(hull_member(&q, &poly, 1e-9).unwrap());
    }
}

#[test]
fn oracle_refutes_the_below_diagonal_point() {
    let TropicalPolytope::MaxPlus(gens) = TropicalPolytope::max_plus_simplex(2) else {
        unreachable!()
    };
    let poly = TropicalPolytope::max_plus(gens.clone()).unwrap();

    // (-1, -1) is not expressible as a normalized combination: exhausting
    // the weight grid never comes close
    let q = vec![Finite(-1.0), Finite(-1.0)];
    let oracle = grid_oracle_distance(&q, &gens);
    assert!(oracle > 0.2, "oracle distance {oracle}");
    assert!(!hull_member(&q, &poly, 1e-9).unwrap());

    // while (-1, 0) is a combination with weights (-1, 0)
    let q = vec![Finite(-1.0), Finite(0.0)];
    assert!(grid_oracle_distance(&q, &gens) < 1e-12);
    assert!(hull_member(&q, &poly, 1e-9).unwrap());
}

#[test]
fn oracle_and_projection_agree_on_a_skew_polytope() {
    let gens = vec![
        MaxPlusPoint::new(vec![Finite(0.0), Finite(-1.0), Finite(-0.4)]),
        MaxPlusPoint::new(vec![Finite(-0.6), Finite(0.0), NegInf]),
        MaxPlusPoint::new(vec![NegInf, Finite(-0.2), Finite(0.0)]),
    ];
    let poly = TropicalPolytope::max_plus(gens.clone()).unwrap();

    // exact grid combinations: oracle hit and membership true
    let grid = [
        (Finite(0.0), Finite(-0.8), NegInf),
        (Finite(-0.2), Finite(0.0), Finite(-1.0)),
        (NegInf, Finite(0.0), Finite(-0.4)),
    ];
    for (a, b, c) in grid {
        let combo = max_plus_combination(&gens, &[a, b, c]).unwrap();
        let q = combo.coords().to_vec();
        assert!(grid_oracle_distance(&q, &gens) < 1e-12);
        assert!(hull_member(&q, &poly, 1e-9).unwrap());
    }

    // push one coordinate above every generator: both routes refute
    let q = vec![Finite(0.5), Finite(-0.4), Finite(-0.2)];
    assert!(grid_oracle_distance(&q, &gens) > 0.05);
    assert!(!hull_member(&q, &poly, 1e-9).unwrap());
}
