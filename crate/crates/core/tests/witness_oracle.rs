//! Independent corroboration of witness certificates: plain nested-loop
//! enumeration of the source ball, written against the map definitions
//! directly, with no shared code in the search or certification path.

use maslov_core::convexity::TropicalPolytope;
use maslov_core::probe::{
    probe_map, to_metric, PiecewiseMapSpec, PointVerdict, ProbeConfig, ProbeMap,
};
use maslov_core::semiring::{ExtendedReal, Finite};

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Certified join-map witness at ((0,-1), (-1,0)): enumerate both simplex
/// branches near each pair component and evaluate the join directly.
#[test]
fn join_map_certificate_survives_brute_force() {
    let map =
        PiecewiseMapSpec::join_map("vee-on-id", TropicalPolytope::max_plus_simplex(2)).unwrap();
    let cfg = ProbeConfig {
        point_samples: 0,
        ..ProbeConfig::default()
    };
    let pinned = vec![vec![Finite(0.0), Finite(-1.0), Finite(-1.0), Finite(0.0)]];
    let verdict = probe_map(&map, &cfg, &pinned).unwrap();
    let PointVerdict::Witness(w) = &verdict.records[0] else {
        panic!("expected a witness at the pinned point");
    };
    let x = to_metric(map.flavor(), &w.point).unwrap();
    let y = to_metric(map.flavor(), &w.target).unwrap();

    // every point of the simplex within eps of (1, e^-1) and (e^-1, 1):
    // one coordinate pinned at 1, the other within eps of the center
    let eps = w.epsilon;
    let steps = 200;
    let mut min_distance = f64::INFINITY;
    for branch_a in 0..2 {
        for branch_b in 0..2 {
            for i in 0..=steps {
                for j in 0..=steps {
                    let da = -eps + 2.0 * eps * i as f64 / steps as f64;
                    let db = -eps + 2.0 * eps * j as f64 / steps as f64;
                    let a = if branch_a == 0 {
                        [1.0, x[1] + da]
                    } else {
                        [x[0] + da, 1.0]
                    };
                    let b = if branch_b == 0 {
                        [1.0, x[3] + db]
                    } else {
                        [x[2] + db, 1.0]
                    };
                    if a[1] < 0.0 || a[0] < 0.0 || b[1] < 0.0 || b[0] < 0.0 {
                        continue;
                    }
                    let point = [a[0], a[1], b[0], b[1]];
                    if sup_distance(&point, &x) > eps {
                        continue;
                    }
                    let image = [a[0].max(b[0]), a[1].max(b[1])];
                    min_distance = min_distance.min(sup_distance(&image, &y));
                }
            }
        }
    }
    assert!(
        min_distance > w.tolerance,
        "brute force found an approach at {min_distance}"
    );
    // the certificate's margin is a valid lower bound for the brute force
    assert!(
        min_distance >= w.margin - 1e-9,
        "margin {} exceeds brute-force minimum {min_distance}",
        w.margin
    );
}

/// A certified witness on the product of two simplices: enumerate the five
/// free weights over both relevant strata of each factor at a coarse step
/// and evaluate the combination map directly.
#[test]
fn product_witness_certificate_survives_brute_force() {
    let ad = TropicalPolytope::max_times_simplex(2);
    let map = PiecewiseMapSpec::binary_combination("s-on-ad-x-ad", &[ad.clone(), ad]).unwrap();
    let cfg = ProbeConfig {
        point_samples: 0,
        ..ProbeConfig::default()
    };
    let blocked: Vec<ExtendedReal> = [1.0, 0.4, 0.5, 1.0, 0.3, 1.0, 1.0, 0.6, 1.0, 0.9]
        .iter()
        .map(|&v| Finite(v))
        .collect();
    let verdict = probe_map(&map, &cfg, &[blocked]).unwrap();
    let PointVerdict::Witness(w) = &verdict.records[0] else {
        panic!("expected a witness at the blocked configuration");
    };
    let x = to_metric(map.flavor(), &w.point).unwrap();
    let y = to_metric(map.flavor(), &w.target).unwrap();
    let eps = w.epsilon;

    // the four simplex components sit strictly inside their strata (free
    // coordinates 0.3..0.6, more than eps away from the corners), so only
    // the center's stratum needs scanning; the weight pair at the corner
    // (1, 0.9) admits both branches
    let free_centers = [x[1], x[2], x[5], x[6]];
    let steps = 20;
    let mut min_distance = f64::INFINITY;
    let mut scan = |t: f64, p: f64| {
        let mut free = [0.0f64; 4];
        let mut walk = [0usize; 4];
        loop {
            for (k, w) in walk.iter().enumerate() {
                free[k] =
                    (free_centers[k] - eps + 2.0 * eps * *w as f64 / steps as f64).clamp(0.0, 1.0);
            }
            let point = [1.0, free[0], free[1], 1.0, free[2], 1.0, 1.0, free[3], t, p];
            if sup_distance(&point, &x) <= eps {
                let image = [
                    (t * point[0]).max(p * point[4]),
                    (t * point[1]).max(p * point[5]),
                    (t * point[2]).max(p * point[6]),
                    (t * point[3]).max(p * point[7]),
                ];
                min_distance = min_distance.min(sup_distance(&image, &y));
            }
            let mut k = 0;
            loop {
                walk[k] += 1;
                if walk[k] <= steps {
                    break;
                }
                walk[k] = 0;
                k += 1;
                if k == walk.len() {
                    return;
                }
            }
        }
    };
    for i in 0..=steps {
        let v = (x[9] - eps + 2.0 * eps * i as f64 / steps as f64).clamp(0.0, 1.0);
        scan(1.0, v); // t = 1 branch
        scan(v, 1.0); // p = 1 branch
    }

    assert!(
        min_distance > w.tolerance,
        "brute force found an approach at {min_distance}"
    );
}
