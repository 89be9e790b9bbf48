use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::WaveState;

/// Ricker wavelet `(1 - 2 pi^2 f0^2 tau^2) exp(-pi^2 f0^2 tau^2)` with `tau = t - t0`.
pub fn ricker(t: f64, f0: f64, t0: f64) -> f64 {
    let arg = PI * f0 * (t - t0);
    let a2 = arg * arg;
    (1.0 - 2.0 * a2) * (-a2).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    /// Equal increments to `txx` and `tzz` at `(ix + 1/2, iz)`.
    Explosive,
    /// Increment to `vz` at `(ix + 1/2, iz + 1/2)`.
    VerticalForce,
}

impl Mechanism {
    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Explosive => "explosive",
            Mechanism::VerticalForce => "vertical_force",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explosive" => Ok(Mechanism::Explosive),
            "vertical_force" => Ok(Mechanism::VerticalForce),
            _ => Err(Error::Config(format!(
                "unknown source mechanism '{s}' (expected explosive or vertical_force)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub ix: usize,
    pub iz: usize,
    /// Ricker central frequency (Hz).
    pub f0: f64,
    /// Wavelet delay (s).
    pub t0: f64,
    pub mechanism: Mechanism,
    pub amplitude: f64,
}

impl SourceSpec {
    /// Delay of `1.2 / f0`, enough to start the wavelet from rest.
    pub fn ricker_at(ix: usize, iz: usize, f0: f64) -> Self {
        SourceSpec {
            ix,
            iz,
            f0,
            t0: 1.2 / f0,
            mechanism: Mechanism::Explosive,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0 > 0.0 && self.f0.is_finite()) {
            return Err(Error::Config(format!("source f0 must be positive, got {}", self.f0)));
        }
        if !self.t0.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::Config("source t0 and amplitude must be finite".into()));
        }
        if self.t0 < 1.0 / self.f0 {
            log::warn!(
                "source delay t0={} is below 1/f0={}; the wavelet starts truncated",
                self.t0,
                1.0 / self.f0
            );
        }
        Ok(())
    }

    /// Source-time value at `t`, already scaled by amplitude.
    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * ricker(t, self.f0, self.t0)
    }
}

/// Adds `ricker(t) * amplitude * dt` at the source node. The position must lie
/// strictly inside the grid.
pub fn inject_source(state: &mut WaveState, spec: &SourceSpec, t: f64, dt: f64) -> Result<()> {
    let g = state.geometry;
    if spec.ix == 0 || spec.iz == 0 || spec.ix + 1 >= g.nx || spec.iz + 1 >= g.nz {
        return Err(Error::Config(format!(
            "source ({}, {}) is not inside the {}x{} grid",
            spec.ix, spec.iz, g.nx, g.nz
        )));
    }
    let k = g.index(spec.ix, spec.iz);
    let inc = (spec.value(t) * dt) as f32;
    match spec.mechanism {
        Mechanism::Explosive => {
            state.txx[k] += inc;
            state.tzz[k] += inc;
        }
        Mechanism::VerticalForce => state.vz[k] += inc,
    }
    Ok(())
}
