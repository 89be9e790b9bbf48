//! Times both schemes on a reduced grid and compares against the operator-count model.

use sgfd::kernel::RunOptions;
use sgfd::workbench::cmd_bench;
use sgfd::workbench::experiments::bench_reference;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (mut config, model) = bench_reference()?;
    config.nt = 100;
    let report = cmd_bench(&config, &model, 3, &RunOptions::serial())?;
    print!("{}", report.to_text());
    Ok(())
}
