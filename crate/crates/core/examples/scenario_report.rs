//! Run a canned scenario with an override and print its JSON report.

use vn_readout::error::Result;
use vn_readout::scenarios::{run, ScenarioConfig, ScenarioName};

pub fn run_example() -> Result<()> {
    let mut cfg = ScenarioConfig::defaults(ScenarioName::Eigenstate);
    cfg.set("gA", "0.75")?;
    let report = run(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    println!("all checks pass: {}", report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
