//! Phase-velocity ratio of both schemes at a few wavenumbers, plus the
//! fraction of the band within 0.5% of exact.

use std::f64::consts::PI;

use sgfd::coeffs::{table1_coefficients, taylor_coefficients};
use sgfd::dispersion::{figure_angles, figure_kh_grid, fractions_by_angle, scan_curves, Wave};
use sgfd::kernel::Scheme;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (alpha, h, dt) = (2598.0, 20.0, 1e-3);
    let r = alpha * dt / h;
    let cases = [
        (Scheme::Balanced, taylor_coefficients(7)?),
        (Scheme::NonBalanced, table1_coefficients(7)?),
    ];
    for (scheme, coeffs) in &cases {
        let points = scan_curves(coeffs, *scheme, Wave::P, &figure_angles(), &figure_kh_grid(), r);
        println!("{scheme} M=7, P wave, r={r:.4}");
        for kh in [0.25, 0.5, 0.75] {
            let p = points
                .iter()
                .filter(|p| p.theta == 0.0)
                .min_by(|a, b| (a.kh - kh * PI).abs().total_cmp(&(b.kh - kh * PI).abs()))
                .unwrap();
            println!("  kh={:.2}pi  delta={:.6}", p.kh / PI, p.delta);
        }
        for (theta, frac) in fractions_by_angle(&points, 5e-3) {
            println!("  theta={:5.1} deg  within 0.5%: {:.1}%", theta.to_degrees(), 100.0 * frac);
        }
    }
    Ok(())
}
