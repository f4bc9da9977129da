//! Acceptance criteria, run in sequence so that wall-clock limits are
//! measured without competing test threads.

use std::process::ExitCode;

use qvbs_core::suites::{self, SuiteReport};

const SEED: u64 = 20240611;

type Criterion = (&'static str, fn() -> SuiteReport);

fn criteria() -> Vec<Criterion> {
    vec![
        ("S=2 transfer spectrum", suites::s2_spectrum),
        ("eigenvalue formula", suites::conjecture),
        ("divisibility", || suites::divisibility(&[1, 2, 3, 4])),
        ("ground-state annihilation", || suites::annihilation(SEED)),
        ("MPS equivalence", suites::mps_equivalence),
        ("S^z distribution", suites::sz_probabilities),
        ("closed-form correlators", suites::closed_forms),
        ("finite-chain oracle closure", suites::oracle_closure),
        ("algebra relations", suites::algebra),
    ]
}

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria().into_iter().enumerate() {
        let report = run();
        println!("criterion {}: {} [{name}]", i + 1, report.summary_line());
        for c in report.failures() {
            println!("    failed check {}: {}", c.label, c.detail);
        }
        if !report.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria().len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
