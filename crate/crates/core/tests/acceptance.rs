//! Runs the nine numbered checks at their pinned parameters and prints one
//! line per check. Exits nonzero when any outcome differs from `EXPECTED`.

use std::process::ExitCode;

use padic_stark::verify::{self, CriterionReport};

const SEED: u64 = 0x5eed;

/// Expected outcome per check. Check 8 fails on the `U_p` eigenvalue sign:
/// the family satisfies `U_p F = (1 + eps L'/L) F`, not the stated
/// `1 - eps L'/L`. Every failure there must name `U_p`; anything else is a
/// regression, and so is the sign check starting to pass.
const EXPECTED: [(u8, bool); 9] = [
    (1, true),
    (2, true),
    (3, true),
    (4, true),
    (5, true),
    (6, true),
    (7, true),
    (8, false),
    (9, true),
];

fn failures_are_the_known_sign(r: &CriterionReport) -> bool {
    !r.failures.is_empty() && r.failures.iter().all(|f| f.contains("U_p"))
}

fn main() -> ExitCode {
    let suite = match verify::run_all(SEED) {
        Ok(s) => s,
        Err(e) => {
            println!("acceptance: error {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut unexpected = Vec::new();
    for (r, (id, pass)) in suite.criteria.iter().zip(EXPECTED) {
        assert_eq!(r.id, id);
        println!("{}", r.summary_line());
        for f in r.failures.iter().skip(1) {
            println!("    {f}");
        }
        let as_expected = r.pass == pass && (pass || failures_are_the_known_sign(r));
        if !as_expected {
            unexpected.push(id);
        }
    }
    let a = serde_json::to_string(&suite).expect("serializes");
    let b = serde_json::to_string(&verify::run_all(SEED).expect("reruns")).expect("serializes");
    if a != b {
        println!("acceptance: reports differ between identical runs");
        unexpected.push(0);
    }
    let passed = suite.criteria.iter().filter(|c| c.pass).count();
    println!("acceptance: {passed}/9 criteria pass; known deviation: criterion 8 (U_p eigenvalue sign)");
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for {unexpected:?}");
        ExitCode::FAILURE
    }
}
