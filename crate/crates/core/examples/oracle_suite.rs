//! Runs the oracle suite and prints the worst error of each check.
//!
//! `cargo run --release --example oracle_suite`

use std::time::Instant;

use heatgrad::validate::{run_validation, ValidationOptions};

fn main() -> heatgrad::Result<()> {
    let start = Instant::now();
    let report = run_validation(&ValidationOptions::default())?;
    println!("{:<24} {:>12} {:>10} {:>7}  result", "check", "max error", "tolerance", "points");
    for c in &report.checks {
        println!(
            "{:<24} {:>12.3e} {:>10.1e} {:>7}  {}",
            c.id,
            c.max_error,
            c.tolerance,
            c.points,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    println!("all passed: {} ({:.2?})", report.passed(), start.elapsed());
    Ok(())
}
