//! Runs the bundled manifest through the command line entry point and prints
//! the summary table. Reports land in the system temp directory.

use std::path::Path;

fn main() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/suite_v1.csv");
    let dir = std::env::temp_dir().join("freelab-suite-example");
    let summary = dir.join("summary.csv");
    let code = freelab::cli::main_with_args([
        "freelab",
        "verify-suite",
        "--manifest",
        manifest.to_str().unwrap(),
        "--report-dir",
        dir.join("reports").to_str().unwrap(),
        "--out",
        summary.to_str().unwrap(),
    ]);
    match std::fs::read_to_string(&summary) {
        Ok(text) => print!("{text}"),
        Err(e) => eprintln!("no summary: {e}"),
    }
    println!("exit code {code}");
}
