//! Courant stability bounds for the balanced and non-balanced schemes.
//!
//! With `X = sum c_m sin((m - 1/2) kx h)` (and `Z` likewise) the balanced
//! scheme is stable for `alpha dt / h <= 1 / sqrt(max(X^2 + Z^2))`. The
//! non-balanced scheme replaces `X^2` by `X'^2 = sin(kx h / 2) X`. Both
//! symbols are separable, so the 2D maximum is twice the 1D maximum,
//! attained on the diagonal.
//!
//! For alternating-sign weights the maxima sit at `kh = pi`, giving
//! `1 / (sqrt(2) sum |c_m|)` (balanced) and `1 / sqrt(2 sum |c_m|)`
//! (non-balanced). The bound is always computed by numeric maximisation so
//! user weights with other sign patterns are handled too.

use std::f64::consts::PI;
use std::fmt;

use crate::coeffs::StencilCoefficients;
use crate::error::{Error, Result};
use crate::kernel::{Scheme, SimulationConfig};
use crate::model::ElasticModel;

/// Samples per axis for the coarse scan before golden-section refinement.
pub const SCAN_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityBound {
    /// Largest admissible Courant number `alpha dt / h`.
    pub bound: f64,
    /// `(kx h, kz h)` maximising the 2D symbol.
    pub extremizer: (f64, f64),
    /// Maximum of the 2D symbol.
    pub symbol_max: f64,
}

/// Balanced-scheme bound from `max(X^2 + Z^2)`.
pub fn bound_balanced(coeffs: &StencilCoefficients) -> StabilityBound {
    let (x, fmax) = maximize_on_axis(|kh| coeffs.sine_sum(kh).powi(2));
    let symbol_max = 2.0 * fmax;
    StabilityBound {
        bound: 1.0 / symbol_max.sqrt(),
        extremizer: (x, x),
        symbol_max,
    }
}

/// Non-balanced bound from `max(X'^2 + Z'^2)`. Rejects weights whose symbol
/// `X'^2` goes negative on `[0, pi]`.
pub fn bound_nonbalanced(coeffs: &StencilCoefficients) -> Result<StabilityBound> {
    let tol = 1e-12;
    for i in 1..=SCAN_SAMPLES {
        let kh = PI * i as f64 / SCAN_SAMPLES as f64;
        let v = coeffs.nonbalanced_symbol(kh);
        if v < -tol {
            return Err(Error::Coefficients(format!(
                "non-balanced symbol is negative ({v:.3e}) at kh={kh:.6}; weights unusable"
            )));
        }
    }
    let (x, fmax) = maximize_on_axis(|kh| coeffs.nonbalanced_symbol(kh));
    let symbol_max = 2.0 * fmax;
    Ok(StabilityBound {
        bound: 1.0 / symbol_max.sqrt(),
        extremizer: (x, x),
        symbol_max,
    })
}

pub fn bound_for(scheme: Scheme, coeffs: &StencilCoefficients) -> Result<StabilityBound> {
    match scheme {
        Scheme::Balanced => Ok(bound_balanced(coeffs)),
        Scheme::NonBalanced => bound_nonbalanced(coeffs),
    }
}

/// Maximum of `f` on `[0, pi]`: coarse scan, then golden-section search in the
/// bracket around the best sample.
fn maximize_on_axis(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let step = PI / SCAN_SAMPLES as f64;
    let (mut best_i, mut best) = (0usize, f(0.0));
    for i in 1..=SCAN_SAMPLES {
        let v = f(i as f64 * step);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = (best_i.saturating_sub(1)) as f64 * step;
    let mut hi = ((best_i + 1).min(SCAN_SAMPLES)) as f64 * step;
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..80 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    // The sample endpoints may still beat the interior point (maxima at pi).
    [(x, fx), (best_i as f64 * step, best)]
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("two candidates")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub bound_s: f64,
    pub r_actual: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub extremizer: (f64, f64),
}

impl StabilityReport {
    pub fn new(bound: StabilityBound, r_actual: f64) -> Self {
        let margin = bound.bound - r_actual;
        StabilityReport {
            bound_s: bound.bound,
            r_actual,
            margin,
            verdict: if margin > 0.0 {
                Verdict::Stable
            } else {
                Verdict::Unstable
            },
            extremizer: bound.extremizer,
        }
    }

    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        format!(
            "bound={:.6}\nr_actual={:.6}\nmargin={:.6}\nverdict={}\nextremizer={:.6},{:.6}\n",
            self.bound_s, self.r_actual, self.margin, self.verdict, self.extremizer.0, self.extremizer.1
        )
    }
}

/// Stability of a configuration, judged on the fastest P velocity in the model.
pub fn check_config(config: &SimulationConfig, model: &ElasticModel) -> Result<StabilityReport> {
    let bound = bound_for(config.scheme, &config.coeffs)?;
    let r_actual = model.max_vp() * config.dt / config.geometry.h;
    Ok(StabilityReport::new(bound, r_actual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{table1_coefficients, taylor_coefficients};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn second_order_bounds_coincide() {
        let c = taylor_coefficients(1).unwrap();
        let b = bound_balanced(&c);
        let nb = bound_nonbalanced(&c).unwrap();
        assert!((b.bound - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(b.bound, nb.bound);
    }

    #[test]
    fn taylor_m2_closed_form() {
        let c = taylor_coefficients(2).unwrap();
        let b = bound_balanced(&c);
        let expected = 1.0 / (2f64.sqrt() * (1.125 + 1.0 / 24.0));
        assert!((b.bound - expected).abs() < 1e-12);
        assert!((b.bound - 0.6061).abs() < 1e-4);
        assert!((b.extremizer.0 - PI).abs() < 1e-9);
    }

    #[test]
    fn table1_bounds() {
        let c7 = table1_coefficients(7).unwrap();
        let b7 = bound_nonbalanced(&c7).unwrap();
        assert!((b7.bound - 0.491).abs() < 1e-3, "{}", b7.bound);
        assert!((b7.bound - 1.0 / (2.0 * c7.sum_abs()).sqrt()).abs() < 1e-12);

        let c3 = table1_coefficients(3).unwrap();
        let expected = 1.0 / (2.0 * (1.40887 + 0.16472 + 0.0172717f64)).sqrt();
        assert!((bound_nonbalanced(&c3).unwrap().bound - expected).abs() < 1e-12);
    }

    #[test]
    fn negative_symbol_rejected() {
        let bad = StencilCoefficients::user(vec![1.0, -0.8]).unwrap();
        // sin(kh/2) - 0.8 sin(3kh/2) < 0 for small kh.
        assert!(bound_nonbalanced(&bad).is_err());
    }

    #[test]
    fn non_alternating_weights_use_numeric_maximum() {
        let c = StencilCoefficients::user(vec![1.2, 0.3]).unwrap();
        let b = bound_balanced(&c);
        // The maximum sits strictly inside (0, pi).
        assert!(b.extremizer.0 < PI - 1e-3);
        assert!(b.bound > 1.0 / (2f64.sqrt() * c.sum_abs()));
    }

    #[test]
    fn verdict_follows_margin() {
        let c = table1_coefficients(7).unwrap();
        let b = bound_nonbalanced(&c).unwrap();
        let stable = StabilityReport::new(b, 4908.0 * 1e-3 / 10.0);
        let unstable = StabilityReport::new(b, 4912.0 * 1e-3 / 10.0);
        assert_eq!(stable.verdict, Verdict::Stable);
        assert_eq!(unstable.verdict, Verdict::Unstable);
        assert!(stable.to_text().contains("verdict=stable\n"));
    }
}
