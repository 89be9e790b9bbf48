//! Fixed experiment setups shared by the figure, bench and acceptance drivers.

use crate::coeffs::{
    solve_space_domain, table1_coefficients, taylor_coefficients, FitBand, StencilCoefficients,
};
use crate::error::Result;
use crate::kernel::{
    Mechanism, ReceiverSpec, Scheme, SimulationConfig, SourceSpec, SpongeSpec,
};
use crate::model::{ElasticModel, Field, GridGeometry};

use super::config::default_receiver_line;
use super::modelio::{homogeneous_experiment_model, layered_miniature};

pub const HOMOGENEOUS_N: usize = 301;
pub const HOMOGENEOUS_NT: usize = 1600;
pub const LAYERED_NX: usize = 420;
pub const LAYERED_NZ: usize = 260;
/// Wider than the default so the long reference operator's unupdated edge
/// frame (30 cells) sits deep inside the absorbing layer.
pub const LAYERED_SPONGE: usize = 60;
pub const LAYERED_NT: usize = 1500;

/// Weights each scheme uses at operator length `m` in the scheme comparisons:
/// Taylor for balanced; Table 1 (or a space-domain fit when `m` has no row)
/// for non-balanced.
pub fn comparison_coefficients(scheme: Scheme, m: usize) -> Result<StencilCoefficients> {
    match scheme {
        Scheme::Balanced => taylor_coefficients(m),
        Scheme::NonBalanced => match m {
            3 | 5 | 7 => table1_coefficients(m),
            _ => solve_space_domain(m, &FitBand::default_for(m)),
        },
    }
}

/// Homogeneous model (α=1732.1, β=1000, ρ=1000, h=10, dt=1 ms), 14 Hz explosive
/// source in the centre and nine `vz` receivers on a horizontal line above it.
pub fn homogeneous_experiment(
    scheme: Scheme,
    coeffs: StencilCoefficients,
) -> Result<(SimulationConfig, ElasticModel)> {
    let n = HOMOGENEOUS_N;
    let geometry = GridGeometry::new(n, n, 10.0)?;
    let source = SourceSpec::ricker_at(n / 2, n / 2, 14.0);
    let sponge = SpongeSpec::default();
    let positions = default_receiver_line(geometry, &source, sponge.width);
    let config = SimulationConfig {
        geometry,
        dt: 1e-3,
        nt: HOMOGENEOUS_NT,
        scheme,
        coeffs,
        source,
        receivers: ReceiverSpec {
            component: Field::Vz,
            positions,
        },
        sponge,
        override_stability: false,
        snapshot_steps: Vec::new(),
    };
    Ok((config, homogeneous_experiment_model(n, n)?))
}

/// Layered miniature model with a shallow receiver line every five cells.
pub fn layered_experiment(
    scheme: Scheme,
    coeffs: StencilCoefficients,
) -> Result<(SimulationConfig, ElasticModel)> {
    let geometry = GridGeometry::new(LAYERED_NX, LAYERED_NZ, 10.0)?;
    let sponge = SpongeSpec {
        width: LAYERED_SPONGE,
        ..SpongeSpec::default()
    };
    let depth = sponge.width + 5;
    let positions = (depth..LAYERED_NX - depth).step_by(5).map(|ix| (ix, depth)).collect();
    let source = SourceSpec {
        mechanism: Mechanism::Explosive,
        ..SourceSpec::ricker_at(LAYERED_NX / 2, depth + 5, 14.0)
    };
    let config = SimulationConfig {
        geometry,
        dt: 1e-3,
        nt: LAYERED_NT,
        scheme,
        coeffs,
        source,
        receivers: ReceiverSpec {
            component: Field::Vz,
            positions,
        },
        sponge,
        override_stability: false,
        snapshot_steps: Vec::new(),
    };
    Ok((config, layered_miniature(LAYERED_NX, LAYERED_NZ)?))
}

pub const BENCH_N: usize = 400;
pub const BENCH_NT: usize = 300;

/// Desk-scale timing setup: homogeneous 400 x 400 grid, 300 steps, Table 1 M=7.
pub fn bench_reference() -> Result<(SimulationConfig, ElasticModel)> {
    let n = BENCH_N;
    let geometry = GridGeometry::new(n, n, 10.0)?;
    let source = SourceSpec::ricker_at(n / 2, n / 2, 14.0);
    let sponge = SpongeSpec::default();
    let positions = default_receiver_line(geometry, &source, sponge.width);
    let config = SimulationConfig {
        geometry,
        dt: 1e-3,
        nt: BENCH_NT,
        scheme: Scheme::NonBalanced,
        coeffs: table1_coefficients(7)?,
        source,
        receivers: ReceiverSpec {
            component: Field::Vz,
            positions,
        },
        sponge,
        override_stability: false,
        snapshot_steps: Vec::new(),
    };
    Ok((config, homogeneous_experiment_model(n, n)?))
}

/// `||a - b|| / ||b||` over one trace.
pub fn normalized_misfit(a: &[f32], reference: &[f32]) -> f64 {
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(reference) {
        num += (x as f64 - y as f64).powi(2);
        den += (y as f64).powi(2);
    }
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setups_validate() {
        for scheme in [Scheme::Balanced, Scheme::NonBalanced] {
            let (c, m) = homogeneous_experiment(scheme, comparison_coefficients(scheme, 7).unwrap()).unwrap();
            c.validate().unwrap();
            assert_eq!(m.shape(), (c.geometry.nx, c.geometry.nz));
            assert_eq!(c.receivers.positions.len(), 9);
            let (c, _) = layered_experiment(scheme, taylor_coefficients(30).unwrap()).unwrap();
            c.validate().unwrap();
        }
    }

    #[test]
    fn misfit_basics() {
        assert_eq!(normalized_misfit(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert!((normalized_misfit(&[0.0, 0.0], &[3.0, 4.0]) - 1.0).abs() < 1e-12);
        assert_eq!(normalized_misfit(&[0.0], &[0.0]), 0.0);
    }
}
