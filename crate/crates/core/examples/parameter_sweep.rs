//! Log sweep of the coupling in the post-selected scenario, written as CSV
//! to standard output.

use vn_readout::cli::{run_sweep, sweep_values, write_sweep_csv};
use vn_readout::error::Result;
use vn_readout::scenarios::{ScenarioConfig, ScenarioName};

pub fn run_example() -> Result<()> {
    let base = ScenarioConfig::defaults(ScenarioName::WeakPostselect);
    let values = sweep_values(1e-3, 1e-1, 5, true)?;
    let rows = run_sweep(&base, "gA", &values, Some(2))?;
    write_sweep_csv(std::io::stdout(), "gA", &rows)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
