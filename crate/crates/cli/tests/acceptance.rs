//! One line per acceptance criterion. Every comparison is an exact equality
//! of rationals (tolerance 0).

mod common;

use common::ok;
use toprec_cli::verify::{acceptance_criteria, Check};

/// Commands whose output is compared across cache states.
const COMMANDS: [&[&str]; 5] = [
    &["--curve", "airy", "omega", "--g", "2", "--n", "2"],
    &["--curve", "gaussian", "omega", "--g", "1", "--n", "2"],
    &["--curve", "gaussian", "fg", "--g", "2"],
    &["--curve", "lambert", "expand", "--target", "W:1:2", "--weight", "log", "--window", "1..3"],
    &["--curve", "gaussian", "--format", "json", "expand", "--target", "disc", "--weight", "infinity", "--window", "0..10"],
];

fn cache_check() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let with_cache = |args: &[&str]| {
        let mut v = vec!["--cache", cache];
        v.extend_from_slice(args);
        ok(&v)
    };
    let mut detail = Vec::new();
    for args in COMMANDS {
        let plain = ok(args);
        let cold = with_cache(args);
        let warm = with_cache(args);
        std::fs::remove_dir_all(cache).unwrap();
        let rebuilt = with_cache(args);
        if [&cold, &warm, &rebuilt].iter().any(|o| **o != plain) {
            detail.push(format!("{args:?} differs across cache states"));
        }
    }
    Check {
        name: "cold, warm and rebuilt cache byte-identical".into(),
        passed: detail.is_empty(),
        detail: if detail.is_empty() { format!("{} commands", COMMANDS.len()) } else { detail.join("; ") },
    }
}

#[test]
fn acceptance() {
    let mut criteria = acceptance_criteria();
    criteria.last_mut().expect("six criteria").2.push(cache_check());
    let mut failed = Vec::new();
    for (id, title, checks) in &criteria {
        let passed = checks.iter().all(|c| c.passed);
        let status = if passed { "PASS" } else { "FAIL" };
        println!("criterion {id}: {status} {title} ({} checks, exact, tolerance 0)", checks.len());
        for c in checks.iter().filter(|c| !c.passed) {
            println!("    {c}");
        }
        if !passed {
            failed.push(*id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
