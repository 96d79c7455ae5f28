//! The ten acceptance criteria at full size, one line per criterion.
//!
//! Criterion 1 is expected red: the cylinder built from averaged orderings
//! fails ∂² = 0 on algebras whose ∂² vanishes only by graded commutativity.
//! For it the test asserts the recorded diagnosis instead of a pass.
//!
//! Runs without the libtest harness so the lines always print.

use std::time::Duration;

use giroux_core::suite::{diagnose_red, run_check, CheckOutcome, SuiteSize, DOCUMENTED_RED};

const SEED: u64 = 1;

/// Wall-clock limits in seconds; criteria without one are unbounded.
fn limit(id: usize) -> Option<Duration> {
    let secs = match id {
        1 | 4 => 60,
        2 | 7 => 120,
        3 => 10,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

fn main() {
    let size = SuiteSize::FULL;
    let mut problems = Vec::new();
    for id in 1..=10 {
        let o: CheckOutcome = run_check(id, SEED, &size);
        println!("{}", o.line());
        if let Some(max) = limit(id) {
            if o.elapsed > max {
                problems.push(format!("criterion {id} took {:.2}s, limit {}s", o.elapsed.as_secs_f64(), max.as_secs()));
            }
        }
        if o.passed() {
            continue;
        }
        if DOCUMENTED_RED.contains(&id) {
            match diagnose_red(id, SEED, &size) {
                Ok(d) => println!("       documented red: {d}"),
                Err(e) => problems.push(format!("criterion {id} is red and its diagnosis fails: {e}")),
            }
        } else {
            problems.push(o.line());
        }
    }
    if !problems.is_empty() {
        eprintln!("acceptance failed:\n{}", problems.join("\n"));
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass or are documented red with a holding diagnosis");
}
