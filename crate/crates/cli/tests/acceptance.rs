//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test -p maslov-cli --test acceptance -- --nocapture`).

use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use maslov_core::barycenter::{check_barycenter_transport, check_monad_identity, check_naturality};
use maslov_core::convexity::TropicalPolytope;
use maslov_core::measures::{
    check_axioms_max_plus, check_axioms_max_times, check_transport_agreement,
};
use maslov_core::probe::{
    affine_defect_on_interval, probe_equivalence, probe_map, verify_witness, witness_search,
    PiecewiseMapSpec, PointVerdict, ProbeConfig,
};
use maslov_core::semiring::Finite;
use maslov_core::semiring::{
    check_truncation_affinity, check_unit_embedding_affinity, default_affinity_grid,
};

fn conclude(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:02} {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion:02}: {detail}");
}

#[test]
fn criterion_01_truncation_affinity_exact() {
    let start = Instant::now();
    let report = check_truncation_affinity(&default_affinity_grid(), 1..=6, 100_000, 1);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = report.passed() && elapsed < 5.0;
    conclude(
        1,
        pass,
        &format!(
            "truncation affinity exact on {} cases ({} violations) in {elapsed:.2}s (budget 5s)",
            report.cases, report.failures
        ),
    );
}

#[test]
fn criterion_02_embedding_affinity() {
    let report = check_unit_embedding_affinity(100_000, 8, 1e-12, 2);
    conclude(
        2,
        report.passed(),
        &format!(
            "embedding affinity on {} triples, worst discrepancy {:.3e} (tolerance 1e-12)",
            report.cases, report.max_discrepancy
        ),
    );
}

#[test]
fn criterion_03_measure_axioms() {
    let mp = check_axioms_max_plus(10_000, 10, 3);
    let mt = check_axioms_max_times(10_000, 10, 1e-12, 4);
    conclude(
        3,
        mp.passed() && mt.passed(),
        &format!(
            "max-plus axioms exact on {} cases; max-times axioms worst {:.3e} over {} cases",
            mp.cases, mt.max_discrepancy, mt.cases
        ),
    );
}

#[test]
fn criterion_04_transport_agreement() {
    let report = check_transport_agreement(10_000, 1e-9, 5);
    conclude(
        4,
        report.passed(),
        &format!(
            "transport vs model-change and bump-density oracle: {} cases, worst {:.3e} (tolerance 1e-9)",
            report.cases, report.max_discrepancy
        ),
    );
}

#[test]
fn criterion_05_barycenter_transport_square() {
    let start = Instant::now();
    let report = check_barycenter_transport(10_000, 4, 5, 1e-9, 6);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = report.passed() && elapsed < 30.0;
    conclude(
        5,
        pass,
        &format!(
            "barycenter transport square: {} cases, worst {:.3e} in {elapsed:.2}s (budget 30s)",
            report.cases, report.max_discrepancy
        ),
    );
}

#[test]
fn criterion_06_monad_identity_and_naturality() {
    let monad = check_monad_identity(10_000, 7);
    let naturality = check_naturality(10_000, 8);
    conclude(
        6,
        monad.passed() && naturality.passed(),
        &format!(
            "monad identity exact on {} cases, naturality exact on {} cases",
            monad.cases, naturality.cases
        ),
    );
}

#[test]
fn criterion_07_openness_fixtures() {
    let start = Instant::now();
    let cfg = ProbeConfig::default();

    // (a) the combination map on [0.25, 1]^2 shows open-evidence everywhere
    let boxed = TropicalPolytope::max_times_box(0.25, 1.0, 2).unwrap();
    let s_box = PiecewiseMapSpec::binary_combination("s-on-box", &[boxed]).unwrap();
    let va = probe_map(&s_box, &cfg, &[]).unwrap();
    let a_ok = va.open_evidence == va.records.len() && va.records.len() == 100;

    // (b) the join map on ID x ID has a certified witness at the pinned point
    let vee =
        PiecewiseMapSpec::join_map("vee-on-id", TropicalPolytope::max_plus_simplex(2)).unwrap();
    let pinned = vec![vec![Finite(0.0), Finite(-1.0), Finite(-1.0), Finite(0.0)]];
    let vb = probe_map(
        &vee,
        &ProbeConfig {
            point_samples: 0,
            ..cfg.clone()
        },
        &pinned,
    )
    .unwrap();
    let b_ok = match &vb.records[0] {
        PointVerdict::Witness(w) => w.resolution == 1e-3 && w.margin > w.tolerance,
        _ => false,
    };

    // (c) witness search over the product of two simplices certifies an
    // obstruction
    let ad = TropicalPolytope::max_times_simplex(2);
    let s_prod =
        PiecewiseMapSpec::binary_combination("s-on-ad-x-ad", &[ad.clone(), ad.clone()]).unwrap();
    let search_cfg = ProbeConfig {
        point_samples: 60,
        ..cfg.clone()
    };
    let candidates = witness_search(&s_prod, &search_cfg).unwrap();
    let mut certified = 0;
    for cand in candidates.iter().take(6) {
        if let Ok(Some(_)) = verify_witness(&s_prod, cand, &search_cfg, search_cfg.grid_resolution)
        {
            certified += 1;
            break;
        }
    }
    let c_ok = certified >= 1;

    // (d) the combination map on one simplex shows open-evidence everywhere
    let s_ad = PiecewiseMapSpec::binary_combination("s-on-ad", &[ad]).unwrap();
    let vd = probe_map(&s_ad, &cfg, &[]).unwrap();
    let d_ok = vd.open_evidence == vd.records.len() && vd.records.len() == 100;

    let elapsed = start.elapsed().as_secs_f64();
    let pass = a_ok && b_ok && c_ok && d_ok && elapsed < 180.0;
    conclude(
        7,
        pass,
        &format!(
            "(a) box open {}/{}; (b) pinned witness {}; (c) certified product witnesses {}; \
             (d) simplex open {}/{}; total {elapsed:.1}s (budget 180s)",
            va.open_evidence,
            va.records.len(),
            b_ok,
            certified,
            vd.open_evidence,
            vd.records.len()
        ),
    );
}

#[test]
fn criterion_08_combination_barycenter_equivalence() {
    let cfg = ProbeConfig {
        point_samples: 40,
        target_samples: 32,
        ..ProbeConfig::default()
    };
    let boxed = TropicalPolytope::max_times_box(0.25, 1.0, 2).unwrap();
    let id = TropicalPolytope::max_plus_simplex(2);
    let ad = TropicalPolytope::max_times_simplex(2);

    // expected verdict profile: witnesses occur on the products, never on
    // the box or the single simplex
    let fixtures: Vec<(&str, Vec<TropicalPolytope>, bool)> = vec![
        ("box", vec![boxed], false),
        ("id-x-id", vec![id.clone(), id], true),
        ("ad-x-ad", vec![ad.clone(), ad.clone()], true),
        ("ad", vec![ad], false),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, factors, expect_witnesses) in fixtures {
        let report = probe_equivalence(name, &factors, &cfg).unwrap();
        let profile_ok = if expect_witnesses {
            report.combination.witnesses > 0 && report.barycenter.witnesses > 0
        } else {
            report.combination.witnesses == 0 && report.barycenter.witnesses == 0
        };
        pass &= report.disagreements == 0 && profile_ok;
        details.push(format!(
            "{name}: {} agreements, {} disagreements, {} witnesses",
            report.agreements, report.disagreements, report.combination.witnesses
        ));
    }
    conclude(8, pass, &details.join("; "));
}

#[test]
fn criterion_09_no_affine_embedding_of_the_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for k in 0..20 {
        let defect = match k {
            0 => affine_defect_on_interval(|u| u, 256).unwrap(),
            1 => affine_defect_on_interval(|u| 2.0 * u - 1.0, 256).unwrap(),
            _ => {
                let c0: f64 = rng.random_range(-2.0..2.0);
                let c1: f64 = rng.random_range(0.1..2.0);
                let c2: f64 = rng.random_range(0.0..2.0);
                let c3: f64 = rng.random_range(0.0..2.0);
                affine_defect_on_interval(|u| c0 + c1 * u + c2 * u * u + c3 * u * u * u, 256)
                    .unwrap()
            }
        };
        if defect.violation <= 0.0 {
            failures += 1;
        }
        worst = worst.min(defect.violation);
    }
    conclude(
        9,
        failures == 0,
        &format!(
            "20 strictly monotone candidates all violate the affinity identity; \
             smallest violation {worst:.3e}, false passes {failures}"
        ),
    );
}

#[test]
fn criterion_10_check_all_is_deterministic() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_maslov"))
            .args(["check", "--suite", "all", "--seed", "7"])
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    let pass = a.status.code() == Some(0) && a.stdout == b.stdout && !a.stdout.is_empty();
    conclude(
        10,
        pass,
        &format!(
            "two runs of `check --suite all --seed 7`: exit {:?}, {} output bytes, identical {}",
            a.status.code(),
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    );
}
