//! Acceptance gate: runs every criterion and prints one line per result.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines as
//! they complete.

use curvechar::acceptance;

#[test]
fn acceptance_criteria() {
    let results = acceptance::run(None);
    assert_eq!(
        results.len(),
        acceptance::CRITERIA.len(),
        "every criterion must report"
    );
    let mut failures = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {:2} {:<14} [{:6} ms] {}",
            r.id, r.name, r.millis, r.details
        );
        if !r.passed {
            failures.push(format!("criterion {} ({}): {}", r.id, r.name, r.details));
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance failures:\n{}",
        failures.join("\n")
    );
}
