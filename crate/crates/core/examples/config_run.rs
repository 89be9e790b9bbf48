//! Parses a configuration text, checks it, runs it, and prints a seismogram excerpt.

use std::path::Path;

use sgfd::kernel::{run_simulation, RunOptions};
use sgfd::stability::check_config;
use sgfd::workbench::modelio::homogeneous_experiment_model;
use sgfd::workbench::parse_config_str;

const CONFIG: &str = "
# small homogeneous run
grid.nx = 200
grid.nz = 160
grid.h = 10
time.dt = 0.001
time.nt = 400
scheme = nonbalanced
coeffs.m = 7
source.ix = 100
source.iz = 80
source.f0 = 14
receivers.component = vz
receivers.positions = 100:50, 130:50, 160:50
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let loaded = parse_config_str(CONFIG, Path::new("."))?;
    println!("config sha256 {}", loaded.digest());
    let config = loaded.sim;
    let model = homogeneous_experiment_model(config.geometry.nx, config.geometry.nz)?;
    print!("{}", check_config(&config, &model)?.to_text());

    let out = run_simulation(&config, &model, &RunOptions::serial())?;
    for line in out.seismograms.to_csv().lines().step_by(50) {
        println!("{line}");
    }
    Ok(())
}
