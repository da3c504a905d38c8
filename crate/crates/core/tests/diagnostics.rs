//! The verification suite and the xi_0 fit on the bundled orbits.

mod common;

use common::session;
use kleinian::diagnostics::{failure_error, shadow_report, verify, Check, VerifyReport, DEFAULT_XI_STEP};
use kleinian::par::Execution;

#[test]
fn level_27_passes_every_check() {
    let s = session("27.2.a.a", 40);
    let r = verify(&s, 1, Execution::Parallel).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    assert!(failure_error(&r).is_none());
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert!(names.contains(&"Gamma_0(N) invariance"));
    assert!(names.contains(&"Laplacian"));
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let s = session("27.2.a.a", 30);
    let a = verify(&s, 7, Execution::Sequential).unwrap();
    let b = verify(&s, 7, Execution::Parallel).unwrap();
    assert_eq!(a.to_json_value(), b.to_json_value());
}

#[test]
fn shadow_fit_is_consistent_across_points() {
    let s = session("23.2.a.a", 40);
    let r = shadow_report(&s, 4, DEFAULT_XI_STEP, 3, Execution::Parallel).unwrap();
    assert!(r.spread < 1e-5, "spread {:e}", r.spread);
    assert!(r.relative_error < 1e-6, "{} off by {:e}", r.convention, r.relative_error);
}

#[test]
fn first_failing_check_is_reported() {
    let s = session("27.2.a.a", 30);
    let mut r: VerifyReport = verify(&s, 1, Execution::Parallel).unwrap();
    r.checks.insert(1, Check::new("forced", 1.0, 1e-3));
    assert!(!r.passed());
    assert_eq!(r.first_failure().unwrap().name, "forced");
    assert!(failure_error(&r).unwrap().to_string().contains("forced"));
}
