//! Runs the homogeneous experiment with both schemes at M=4 and M=7 and
//! reports each against the M=30 balanced reference.

use sgfd::coeffs::taylor_coefficients;
use sgfd::kernel::{run_simulation, RunOptions, Scheme};
use sgfd::workbench::experiments::{comparison_coefficients, homogeneous_experiment, normalized_misfit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let options = RunOptions {
        threads: 0,
        ..Default::default()
    };
    // The M=30 reference freezes a 30-cell edge frame; a wider sponge absorbs before it.
    let setup = |scheme, coeffs| -> sgfd::Result<_> {
        let (mut config, model) = homogeneous_experiment(scheme, coeffs)?;
        config.sponge.width = 60;
        config.receivers.positions.retain(|&(ix, _)| (65..236).contains(&ix));
        Ok((config, model))
    };
    let (config, model) = setup(Scheme::Balanced, taylor_coefficients(30)?)?;
    let reference = run_simulation(&config, &model, &options)?;

    for scheme in [Scheme::Balanced, Scheme::NonBalanced] {
        for m in [4, 7] {
            let (config, model) = setup(scheme, comparison_coefficients(scheme, m)?)?;
            let out = run_simulation(&config, &model, &options)?;
            let worst = out
                .seismograms
                .data
                .iter()
                .zip(&reference.seismograms.data)
                .map(|(a, r)| normalized_misfit(a, r))
                .fold(0.0, f64::max);
            println!(
                "{scheme:>12} M={m}: worst trace misfit {:.2}%  ({:.2}s)",
                100.0 * worst,
                out.wall_seconds
            );
        }
    }
    Ok(())
}
