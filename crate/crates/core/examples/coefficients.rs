//! Operator weights from each source: Taylor, Table 1, least-squares fits,
//! and the band edge that reproduces the tabulated set.

use std::f64::consts::PI;

use sgfd::coeffs::{
    calibrate_to_table1, solve_balanced_space_domain, solve_space_domain, solve_time_space_domain,
    table1_coefficients, taylor_coefficients, FitBand,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = 5;
    let sets = [
        ("taylor", taylor_coefficients(m)?),
        ("table1", table1_coefficients(m)?),
        ("space-ls", solve_space_domain(m, &FitBand::default_for(m))?),
        ("balanced-ls", solve_balanced_space_domain(m, &FitBand::space(0.8 * PI, 512))?),
        (
            "time-space-ls",
            solve_time_space_domain(m, &FitBand::time_space(0.6 * PI, 256, vec![0.0, PI / 8.0, PI / 4.0], 0.25))?,
        ),
    ];
    for (name, c) in &sets {
        let w: Vec<String> = c.weights().iter().map(|v| format!("{v:+.8}")).collect();
        println!("{name:>14}: {}", w.join(" "));
    }

    println!();
    for m in [3, 5, 7] {
        let cal = calibrate_to_table1(m)?;
        println!(
            "M={m}: table weights reproduced with kh_max = {:.2} pi (max deviation {:.2e})",
            cal.kh_max / PI,
            cal.max_deviation
        );
    }

    // The text format read back by `coeffs.file` in a run configuration.
    print!("\n{}", sets[1].1.to_text());
    Ok(())
}
