//! Runs the eight acceptance criteria and prints one line per criterion.
//! Uses its own main so the lines show up without `--nocapture`.

use std::process::ExitCode;

use entangle_core::verify::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for c in &results {
        println!("{}", c.line());
    }
    let failed: Vec<u8> = results.iter().filter(|c| !c.passed).map(|c| c.number).collect();
    if results.len() == 8 && failed.is_empty() {
        println!("acceptance: 8/8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
