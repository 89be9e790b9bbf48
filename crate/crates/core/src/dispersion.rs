//! Grid-dispersion error curves for the balanced and non-balanced schemes.
//!
//! For a plane wave at angle `theta` with `kx = k cos(theta)`, `kz = k sin(theta)`,
//! the phase-velocity ratio is
//!
//! ```text
//! delta = 2 / (r kh) * asin(r sqrt(q))
//! ```
//!
//! where `q = X^2 + Z^2` for the balanced scheme and
//! `q = sin(kx h / 2) X + sin(kz h / 2) Z` for the non-balanced one. The wave
//! type only enters through the Courant number `r` (P: `alpha dt / h`,
//! S: `beta dt / h`); `q` itself is wave-independent.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;

use crate::coeffs::StencilCoefficients;
use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::kernel::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wave {
    P,
    S,
}

impl fmt::Display for Wave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wave::P => "P",
            Wave::S => "S",
        })
    }
}

/// Balanced symbol `q1`.
pub fn q_balanced(coeffs: &StencilCoefficients, kh: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    coeffs.sine_sum(kh * c).powi(2) + coeffs.sine_sum(kh * s).powi(2)
}

/// Non-balanced symbol `q2`.
pub fn q_nonbalanced(coeffs: &StencilCoefficients, kh: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    coeffs.nonbalanced_symbol(kh * c) + coeffs.nonbalanced_symbol(kh * s)
}

fn delta_from_q(q: f64, kh: f64, theta: f64, r: f64) -> Result<f64> {
    let arg = r * q.sqrt();
    if arg > 1.0 {
        return Err(Error::UnstableSample {
            kh,
            theta,
            value: arg,
        });
    }
    Ok(2.0 / (r * kh) * arg.asin())
}

/// Phase-velocity ratio of the balanced scheme.
pub fn delta_balanced(coeffs: &StencilCoefficients, kh: f64, theta: f64, r: f64) -> Result<f64> {
    delta_from_q(q_balanced(coeffs, kh, theta), kh, theta, r)
}

/// Phase-velocity ratio of the non-balanced scheme.
pub fn delta_nonbalanced(coeffs: &StencilCoefficients, kh: f64, theta: f64, r: f64) -> Result<f64> {
    let q = q_nonbalanced(coeffs, kh, theta);
    if q < 0.0 {
        return Err(Error::NegativeSymbol { kh, theta, q2: q });
    }
    delta_from_q(q, kh, theta, r)
}

pub fn delta(scheme: Scheme, coeffs: &StencilCoefficients, kh: f64, theta: f64, r: f64) -> Result<f64> {
    match scheme {
        Scheme::Balanced => delta_balanced(coeffs, kh, theta, r),
        Scheme::NonBalanced => delta_nonbalanced(coeffs, kh, theta, r),
    }
}

/// Mixed-derivative error of the balanced scheme:
/// `(kx h kz h)^2 - [2 sum c sin((m-1/2) kx h)]^2 [2 sum c sin((m-1/2) kz h)]^2`.
pub fn mixed_error_balanced(coeffs: &StencilCoefficients, kxh: f64, kzh: f64) -> f64 {
    let x = coeffs.balanced_symbol(kxh);
    let z = coeffs.balanced_symbol(kzh);
    (kxh * kzh).powi(2) - (x * x) * (z * z)
}

/// Mixed-derivative error of the non-balanced scheme:
/// `(kx h kz h)^2 - 16 sin(kx h/2) sin(kz h/2) sum c sin((m-1/2) kx h) sum c sin((m-1/2) kz h)`.
pub fn mixed_error_nonbalanced(coeffs: &StencilCoefficients, kxh: f64, kzh: f64) -> f64 {
    (kxh * kzh).powi(2)
        - 16.0 * (0.5 * kxh).sin() * (0.5 * kzh).sin() * coeffs.sine_sum(kxh) * coeffs.sine_sum(kzh)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFlag {
    Ok,
    UnstableSample,
    NegativeSymbol,
}

impl SampleFlag {
    pub fn name(self) -> &'static str {
        match self {
            SampleFlag::Ok => "ok",
            SampleFlag::UnstableSample => "unstable_sample",
            SampleFlag::NegativeSymbol => "negative_symbol",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub kh: f64,
    pub theta: f64,
    /// NaN when the sample is flagged.
    pub delta: f64,
    pub wave: Wave,
    pub scheme: Scheme,
    pub flag: SampleFlag,
}

/// One row per `(theta, kh)`, angles outermost. Failed samples are kept with a flag.
pub fn scan_curves(
    coeffs: &StencilCoefficients,
    scheme: Scheme,
    wave: Wave,
    angles: &[f64],
    kh_grid: &[f64],
    r: f64,
) -> Vec<DispersionPoint> {
    let pairs: Vec<(f64, f64)> = angles
        .iter()
        .flat_map(|&t| kh_grid.iter().map(move |&k| (t, k)))
        .collect();
    pairs
        .par_iter()
        .map(|&(theta, kh)| {
            let (delta, flag) = match delta(scheme, coeffs, kh, theta, r) {
                Ok(d) => (d, SampleFlag::Ok),
                Err(Error::NegativeSymbol { .. }) => (f64::NAN, SampleFlag::NegativeSymbol),
                Err(_) => (f64::NAN, SampleFlag::UnstableSample),
            };
            DispersionPoint {
                kh,
                theta,
                delta,
                wave,
                scheme,
                flag,
            }
        })
        .collect()
}

/// 512 uniform samples on `(0, pi]`.
pub fn figure_kh_grid() -> Vec<f64> {
    (1..=512).map(|i| PI * i as f64 / 512.0).collect()
}

/// `0, pi/8, pi/4, 3pi/8, pi/2`.
pub fn figure_angles() -> Vec<f64> {
    (0..5).map(|i| PI * i as f64 / 8.0).collect()
}

/// Fraction of rows with `|delta - 1| < tol`; flagged rows never qualify.
pub fn qualifying_fraction(points: &[DispersionPoint], tol: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let good = points
        .iter()
        .filter(|p| p.flag == SampleFlag::Ok && (p.delta - 1.0).abs() < tol)
        .count();
    good as f64 / points.len() as f64
}

/// Per-angle qualifying fractions, in the order the angles first appear.
pub fn fractions_by_angle(points: &[DispersionPoint], tol: f64) -> Vec<(f64, f64)> {
    let mut angles: Vec<f64> = Vec::new();
    for p in points {
        if !angles.contains(&p.theta) {
            angles.push(p.theta);
        }
    }
    angles
        .into_iter()
        .map(|t| {
            let rows: Vec<DispersionPoint> = points.iter().copied().filter(|p| p.theta == t).collect();
            (t, qualifying_fraction(&rows, tol))
        })
        .collect()
}

pub const CSV_HEADER: &str = "scheme,wave,theta,kh,delta,flag";

pub fn to_csv(points: &[DispersionPoint]) -> String {
    let mut out = String::with_capacity(points.len() * 48);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.scheme,
            p.wave,
            sig9(p.theta),
            sig9(p.kh),
            sig9(p.delta),
            p.flag.name()
        ));
    }
    out
}
