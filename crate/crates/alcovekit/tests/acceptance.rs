//! One line per acceptance criterion. Runs without the libtest harness so the
//! lines are always printed.

use std::process::ExitCode;

use alcovekit::acceptance::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!("criterion {}: {} - {} ({})", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if results.len() != 9 || !failed.is_empty() {
        eprintln!("failed criteria: {failed:?} ({} reported)", results.len());
        return ExitCode::FAILURE;
    }
    println!("acceptance: 9/9 criteria pass");
    ExitCode::SUCCESS
}
