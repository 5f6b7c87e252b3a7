//! One PASS/FAIL line per acceptance criterion, including runtime budgets.

use commoninfo::verify::{Suite, CRITERIA};

#[test]
fn acceptance() {
    let suite = Suite::new(0);
    let mut failed = Vec::new();
    for (id, name, _) in CRITERIA {
        let r = suite.run(id);
        let ok = r.passed && r.within_budget();
        let budget = if r.budget().is_finite() { format!("{}s", r.budget()) } else { "none".into() };
        println!(
            "{} criterion {id:>2} {name}: {} [{:.2}s, budget {budget}]",
            if ok { "PASS" } else { "FAIL" },
            r.detail,
            r.elapsed.as_secs_f64(),
        );
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
