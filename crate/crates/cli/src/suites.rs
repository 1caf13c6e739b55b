//! Named invariant suites for the `check` subcommand.

use maslov_core::CheckReport;
use maslov_core::{barycenter, measures, semiring};

pub const SUITE_NAMES: [&str; 8] = [
    "prop-af",
    "embed-affinity",
    "measure-axioms",
    "model-change",
    "transport",
    "monad",
    "naturality",
    "barycenter-transport",
];

/// Runs one named suite; `None` for an unknown name.
pub fn run_suite(name: &str, trials: u64, seed: u64) -> Option<CheckReport> {
    let report = match name {
        "prop-af" => semiring::check_truncation_affinity(
            &semiring::default_affinity_grid(),
            1..=6,
            trials,
            seed,
        ),
        "embed-affinity" => semiring::check_unit_embedding_affinity(trials, 8, 1e-12, seed),
        "measure-axioms" => {
            let mut r = measures::check_axioms_max_plus(trials / 10, 10, seed);
            r.merge(&measures::check_axioms_max_times(
                trials / 10,
                10,
                1e-12,
                seed + 1,
            ));
            r
        }
        "model-change" => measures::check_model_change_functional(trials, 1e-9, seed),
        "transport" => measures::check_transport_agreement(trials, 1e-9, seed),
        "monad" => barycenter::check_monad_identity(trials, seed),
        "naturality" => barycenter::check_naturality(trials, seed),
        "barycenter-transport" => barycenter::check_barycenter_transport(trials, 4, 5, 1e-9, seed),
        _ => return None,
    };
    Some(report)
}
