//! Verdict classes transport through the model-change homeomorphism: the
//! max-plus simplex is the componentwise-log image of the max-times simplex,
//! the two flavor metrics agree under that map, and the sampler draws the
//! same weight sequences on both sides, so corresponding points must come
//! out with the same verdict class.

use maslov_core::convexity::TropicalPolytope;
use maslov_core::probe::{
    probe_map, verify_witness, PiecewiseMapSpec, PointVerdict, ProbeConfig, VerdictClass,
    WitnessCandidate,
};
use maslov_core::semiring::{ExtendedReal, Finite};

/// A configuration where the combination map on the product of simplices is
/// locally stuck: the two `p`-levers contradict each other while the free
/// coordinates sit strictly below them.
fn blocked_point_max_times() -> Vec<ExtendedReal> {
    [1.0, 0.4, 0.5, 1.0, 0.3, 1.0, 1.0, 0.6, 1.0, 0.9]
        .iter()
        .map(|&v| Finite(v))
        .collect()
}

fn blocked_point_max_plus() -> Vec<ExtendedReal> {
    blocked_point_max_times()
        .iter()
        .map(|v| match v {
            Finite(x) => Finite(x.ln()),
            other => *other,
        })
        .collect()
}

#[test]
fn verdict_classes_transport_between_models() {
    let ad = TropicalPolytope::max_times_simplex(2);
    let id = TropicalPolytope::max_plus_simplex(2);
    let cfg = ProbeConfig {
        point_samples: 20,
        target_samples: 16,
        seed: 3,
        ..ProbeConfig::default()
    };
    let s_mt = PiecewiseMapSpec::binary_combination("s-on-ad-x-ad", &[ad.clone(), ad]).unwrap();
    let p_mp = PiecewiseMapSpec::binary_combination("p-on-id-x-id", &[id.clone(), id]).unwrap();

    let vs = probe_map(&s_mt, &cfg, &[blocked_point_max_times()]).unwrap();
    let vp = probe_map(&p_mp, &cfg, &[blocked_point_max_plus()]).unwrap();

    let mut agree = 0;
    for (a, b) in vs.records.iter().zip(&vp.records) {
        if a.class() == b.class() {
            agree += 1;
        }
    }
    assert_eq!(
        agree,
        vs.records.len(),
        "classes diverged across the model change"
    );

    // the pinned configuration is a genuine obstruction on both sides
    assert_eq!(vs.records[0].class(), VerdictClass::Witness);
    assert_eq!(vp.records[0].class(), VerdictClass::Witness);
}

#[test]
fn certified_witness_survives_reverification_at_double_resolution() {
    let ad = TropicalPolytope::max_times_simplex(2);
    let map = PiecewiseMapSpec::binary_combination("s-on-ad-x-ad", &[ad.clone(), ad]).unwrap();
    let cfg = ProbeConfig {
        point_samples: 0,
        ..ProbeConfig::default()
    };
    let verdict = probe_map(&map, &cfg, &[blocked_point_max_times()]).unwrap();
    let PointVerdict::Witness(w) = &verdict.records[0] else {
        panic!("expected a witness at the pinned point");
    };

    let candidate = WitnessCandidate {
        source: w.point.clone(),
        target: w.target.clone(),
        delta: w.delta,
        score: w.margin,
    };
    for resolution in [w.resolution, w.resolution / 2.0] {
        let again = verify_witness(&map, &candidate, &cfg, resolution)
            .expect("certification stays decisive")
            .expect("certificate stands");
        assert!(again.margin > again.tolerance);
    }
}
