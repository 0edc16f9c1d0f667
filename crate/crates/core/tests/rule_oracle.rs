use hypercomb::rules::{check_rule, registry};

const TRIALS: usize = 200;
const SEED: u64 = 20240611;

#[test]
fn every_rule_matches_direct_summation() {
    let mut bad = Vec::new();
    for rule in registry() {
        let report = check_rule(rule, TRIALS, SEED);
        println!(
            "{:<18} passed {}/{} resampled {}",
            rule.id, report.passed, report.trials, report.resampled
        );
        if !report.ok() {
            println!("  minimized: {:?}", report.minimized);
            bad.push(rule.id);
        }
    }
    assert!(bad.is_empty(), "failing rules: {bad:?}");
}
