//! Staggered first-derivative weights.
//!
//! A length-`M` staggered operator approximates `df/dx` at a half node by
//! `1/h * sum_m c_m (f[+m-1/2] - f[-m+1/2])`. Its wavenumber symbol is
//! `2 * sum_m c_m sin((m - 1/2) kh)`, which the balanced scheme tries to
//! match to `kh`. The non-balanced scheme pairs this operator with the
//! plain two-point difference (symbol `2 sin(kh/2)`), so its weights are
//! designed so that `sin(kh/2) * sum_m c_m sin((m - 1/2) kh)` matches
//! `(kh)^2 / 4` instead.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fmt::sig9;

/// Where a weight set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Taylor,
    SpaceDomainLs,
    TimeSpaceLs,
    BalancedSpaceLs,
    Table1,
    User,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Taylor => "taylor",
            Provenance::SpaceDomainLs => "space_domain_ls",
            Provenance::TimeSpaceLs => "time_space_ls",
            Provenance::BalancedSpaceLs => "balanced_space_ls",
            Provenance::Table1 => "table1",
            Provenance::User => "user",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Provenance::Taylor,
            Provenance::SpaceDomainLs,
            Provenance::TimeSpaceLs,
            Provenance::BalancedSpaceLs,
            Provenance::Table1,
            Provenance::User,
        ]
        .into_iter()
        .find(|p| p.tag() == s)
        .ok_or_else(|| Error::Coefficients(format!("unknown provenance '{s}'")))
    }
}

/// Weights `c_1..c_M` of a staggered first-derivative operator.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilCoefficients {
    c: Vec<f64>,
    pub provenance: Provenance,
    /// Upper end of the fitting band for least-squares sets.
    pub kh_max: Option<f64>,
}

impl StencilCoefficients {
    /// User-supplied weights. A broken sign pattern is logged, not rejected.
    pub fn user(c: Vec<f64>) -> Result<Self> {
        let set = Self::checked(c, Provenance::User, None)?;
        if !set.alternating_signs() {
            log::warn!("user weights {:?} do not alternate in sign", set.c);
        }
        Ok(set)
    }

    pub(crate) fn checked(c: Vec<f64>, provenance: Provenance, kh_max: Option<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Coefficients("operator half-length must be at least 1".into()));
        }
        if let Some(bad) = c.iter().find(|v| !v.is_finite()) {
            return Err(Error::Coefficients(format!("non-finite weight {bad}")));
        }
        if c[0] <= 0.0 {
            return Err(Error::Coefficients(format!("leading weight must be positive, got {}", c[0])));
        }
        Ok(StencilCoefficients {
            c,
            provenance,
            kh_max,
        })
    }

    /// Half-length `M`.
    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.c
    }

    /// `sign(c_m) = (-1)^(m+1)` for every term.
    pub fn alternating_signs(&self) -> bool {
        self.c
            .iter()
            .enumerate()
            .all(|(j, &v)| if j % 2 == 0 { v > 0.0 } else { v < 0.0 })
    }

    pub fn sum_abs(&self) -> f64 {
        self.c.iter().map(|v| v.abs()).sum()
    }

    /// `sum_m c_m sin((m - 1/2) x)`.
    pub fn sine_sum(&self, x: f64) -> f64 {
        sine_sum(&self.c, x)
    }

    /// Symbol of the long operator, `2 sum_m c_m sin((m - 1/2) kh)`, which approximates `kh`.
    pub fn balanced_symbol(&self, kh: f64) -> f64 {
        2.0 * self.sine_sum(kh)
    }

    /// `sin(kh/2) sum_m c_m sin((m - 1/2) kh)`, which approximates `(kh)^2 / 4`.
    pub fn nonbalanced_symbol(&self, kh: f64) -> f64 {
        (0.5 * kh).sin() * self.sine_sum(kh)
    }

    /// `|2 sum_m c_m sin((m - 1/2) kh) - kh|`.
    pub fn consistency_residual(&self, kh: f64) -> f64 {
        (self.balanced_symbol(kh) - kh).abs()
    }

    /// Plain-text export: a header line followed by one weight per line.
    pub fn to_text(&self) -> String {
        let kh = self.kh_max.map(sig9).unwrap_or_else(|| "none".into());
        let mut out = format!("M={} provenance={} kh_max={}\n", self.m(), self.provenance, kh);
        for v in &self.c {
            out.push_str(&sig9(*v));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Coefficients(msg);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("empty coefficient file".into()))?;
        let (mut m, mut provenance, mut kh_max) = (None, None, None);
        for token in header.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| bad(format!("malformed header token '{token}'")))?;
            match k {
                "M" => m = Some(v.parse::<usize>().map_err(|e| bad(format!("M: {e}")))?),
                "provenance" => provenance = Some(v.parse::<Provenance>()?),
                "kh_max" if v == "none" => kh_max = None,
                "kh_max" => kh_max = Some(v.parse::<f64>().map_err(|e| bad(format!("kh_max: {e}")))?),
                other => return Err(bad(format!("unknown header key '{other}'"))),
            }
        }
        let m = m.ok_or_else(|| bad("header is missing M".into()))?;
        let provenance = provenance.ok_or_else(|| bad("header is missing provenance".into()))?;
        let c = lines
            .map(|l| l.parse::<f64>().map_err(|e| bad(format!("weight '{l}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if c.len() != m {
            return Err(bad(format!("header declares M={m} but {} weights follow", c.len())));
        }
        Self::checked(c, provenance, kh_max)
    }
}

pub(crate) fn sine_sum(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(j, &cj)| cj * ((j as f64 + 0.5) * x).sin())
        .sum()
}

/// Classical staggered Taylor weights, exact to order `(kh)^(2m-1)`.
///
/// Closed form of the odd-moment system `sum_j c_j (2j-1)^(2p-1) = delta_{p1}`:
/// `c_j = 1/(2j-1) * prod_{n != j} (2n-1)^2 / ((2n-1)^2 - (2j-1)^2)`.
pub fn taylor_coefficients(m: usize) -> Result<StencilCoefficients> {
    if m == 0 {
        return Err(Error::Coefficients("operator half-length must be at least 1".into()));
    }
    if m > 20 {
        log::warn!("Taylor weights for M={m} are poorly conditioned");
    }
    let c = (1..=m)
        .map(|j| {
            let oj = (2 * j - 1) as f64;
            let prod: f64 = (1..=m)
                .filter(|&n| n != j)
                .map(|n| {
                    let on = (2 * n - 1) as f64;
                    on * on / (on * on - oj * oj)
                })
                .product();
            prod / oj
        })
        .collect();
    StencilCoefficients::checked(c, Provenance::Taylor, None)
}

const TABLE1_M3: [f64; 3] = [1.40887, -0.16472, 0.0172717];
const TABLE1_M5: [f64; 5] = [1.53147, -0.252544, 0.0607465, -0.0135055, 0.00199132];
const TABLE1_M7: [f64; 7] = [
    1.59906,
    -0.310692,
    0.10345,
    -0.0398274,
    0.0150857,
    -0.00487876,
    0.00104241,
];

/// Published non-balanced weights for `m` in {3, 5, 7}.
pub fn table1_coefficients(m: usize) -> Result<StencilCoefficients> {
    let c: &[f64] = match m {
        3 => &TABLE1_M3,
        5 => &TABLE1_M5,
        7 => &TABLE1_M7,
        _ => {
            return Err(Error::Coefficients(format!(
                "no tabulated non-balanced weights for M={m} (available: 3, 5, 7)"
            )))
        }
    };
    StencilCoefficients::checked(c.to_vec(), Provenance::Table1, None)
}

/// Sampling of the wavenumber band (and, for time-space fits, angles and Courant number).
#[derive(Debug, Clone, PartialEq)]
pub struct FitBand {
    pub kh_max: f64,
    pub n_samples: usize,
    pub angles: Vec<f64>,
    /// `r = beta * dt / h`; only used by time-space fits.
    pub courant: Option<f64>,
}

/// Sample count used by the default bands.
pub const DEFAULT_SAMPLES: usize = 512;

impl FitBand {
    pub fn space(kh_max: f64, n_samples: usize) -> Self {
        FitBand {
            kh_max,
            n_samples,
            angles: Vec::new(),
            courant: None,
        }
    }

    pub fn time_space(kh_max: f64, n_samples: usize, angles: Vec<f64>, courant: f64) -> Self {
        FitBand {
            kh_max,
            n_samples,
            angles,
            courant: Some(courant),
        }
    }

    /// Default non-balanced band for half-length `m`: `kh_max = (0.1 m + 0.08) pi`,
    /// capped at `0.95 pi`. This tracks the calibrated bands for the tabulated sets
    /// (0.39, 0.58 and 0.78 pi at M = 3, 5, 7).
    pub fn default_for(m: usize) -> Self {
        let frac = (0.1 * m as f64 + 0.08).min(0.95);
        FitBand::space(frac * PI, DEFAULT_SAMPLES.max(4 * m))
    }

    fn validate(&self, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::Coefficients("operator half-length must be at least 1".into()));
        }
        if !(self.kh_max > 0.0 && self.kh_max <= PI) {
            return Err(Error::Coefficients(format!(
                "kh_max must lie in (0, pi], got {}",
                self.kh_max
            )));
        }
        if self.n_samples < 4 * m {
            return Err(Error::Coefficients(format!(
                "{} samples cannot overdetermine a length-{m} fit (need at least {})",
                self.n_samples,
                4 * m
            )));
        }
        Ok(())
    }

    /// Midpoint-free uniform samples `i * kh_max / n` for `i = 1..=n`.
    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let step = self.kh_max / self.n_samples as f64;
        (1..=self.n_samples).map(move |i| i as f64 * step)
    }
}

/// Condition estimate (ratio of extreme singular values of the design matrix)
/// above which a fit is reported as rank deficient.
const RANK_LIMIT: f64 = 1e13;

/// Minimises `||A c - b||_2`. Normal equations with Cholesky for small, well-conditioned
/// systems; Householder QR otherwise.
fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Vec<f64>> {
    let sv = a.singular_values();
    let (smax, smin) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition.is_nan() || condition >= RANK_LIMIT {
        return Err(Error::RankDeficient { condition });
    }
    let m = a.ncols();
    // The normal matrix squares the condition number.
    if m <= 10 && condition * condition < 1e10 {
        let normal = a.transpose() * a;
        let rhs = a.transpose() * b;
        if let Some(chol) = normal.cholesky() {
            return Ok(chol.solve(&rhs).iter().copied().collect());
        }
    }
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * b;
    let r = qr.r();
    let x = r
        .solve_upper_triangular(&qtb)
        .ok_or(Error::RankDeficient { condition })?;
    Ok(x.iter().copied().collect())
}

fn fit(rows: Vec<Vec<f64>>, rhs: Vec<f64>, m: usize) -> Result<Vec<f64>> {
    let n = rows.len();
    let a = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    least_squares(&a, &b)
}

/// Space-domain least-squares weights for the non-balanced scheme.
///
/// Minimises `sum_i [sin(kh_i/2) sum_j c_j sin((j - 1/2) kh_i) - kh_i^2 / 4]^2`
/// over uniform samples of `(0, kh_max]`. No velocity enters the objective.
pub fn solve_space_domain(m: usize, band: &FitBand) -> Result<StencilCoefficients> {
    band.validate(m)?;
    let (rows, rhs) = band
        .samples()
        .map(|kh| {
            let s = (0.5 * kh).sin();
            let row = (1..=m).map(|j| s * ((j as f64 - 0.5) * kh).sin()).collect();
            (row, kh * kh / 4.0)
        })
        .unzip();
    let c = fit(rows, rhs, m)?;
    StencilCoefficients::checked(c, Provenance::SpaceDomainLs, Some(band.kh_max))
}

/// Time-space least-squares weights for the non-balanced scheme at Courant number
/// `r = beta dt / h`, fitted jointly over all `(kh, theta)` samples.
pub fn solve_time_space_domain(m: usize, band: &FitBand) -> Result<StencilCoefficients> {
    band.validate(m)?;
    let r = band
        .courant
        .ok_or_else(|| Error::Coefficients("time-space fit needs a Courant number".into()))?;
    if band.angles.is_empty() {
        return Err(Error::Coefficients("time-space fit needs at least one angle".into()));
    }
    // Loosest 2D staggered bound (M = 1); tighter checks follow once the weights exist.
    if !(r > 0.0 && r < std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::Coefficients(format!(
            "Courant number {r} outside (0, 1/sqrt(2))"
        )));
    }
    let mut rows = Vec::with_capacity(band.n_samples * band.angles.len());
    let mut rhs = Vec::with_capacity(rows.capacity());
    for &theta in &band.angles {
        let (st, ct) = theta.sin_cos();
        for kh in band.samples() {
            let (kx, kz) = (kh * ct, kh * st);
            let row = (1..=m)
                .map(|j| {
                    let w = j as f64 - 0.5;
                    (0.5 * kz).sin() * (w * kz).sin() + (0.5 * kx).sin() * (w * kx).sin()
                })
                .collect();
            rows.push(row);
            rhs.push((1.0 - (kh * r).cos()) / (2.0 * r * r));
        }
    }
    let c = fit(rows, rhs, m)?;
    let set = StencilCoefficients::checked(c, Provenance::TimeSpaceLs, Some(band.kh_max))?;
    let bound = crate::stability::bound_nonbalanced(&set)?.bound;
    if r >= bound {
        return Err(Error::Coefficients(format!(
            "Courant number {r} is not below the stability bound {bound} of the fitted weights"
        )));
    }
    Ok(set)
}

/// Space-domain least-squares weights for the balanced scheme:
/// `2 sum_j c_j sin((j - 1/2) kh) ~ kh` over the band.
pub fn solve_balanced_space_domain(m: usize, band: &FitBand) -> Result<StencilCoefficients> {
    band.validate(m)?;
    let (rows, rhs) = band
        .samples()
        .map(|kh| {
            let row = (1..=m).map(|j| 2.0 * ((j as f64 - 0.5) * kh).sin()).collect();
            (row, kh)
        })
        .unzip();
    let c = fit(rows, rhs, m)?;
    StencilCoefficients::checked(c, Provenance::BalancedSpaceLs, Some(band.kh_max))
}

/// Candidate band edges for the tabulated-weight calibration: `0.30 pi .. 0.95 pi` in steps of `0.01 pi`.
pub fn calibration_grid() -> impl Iterator<Item = f64> {
    (30..=95).map(|p| p as f64 / 100.0 * PI)
}

/// Outcome of matching a space-domain fit to the tabulated weights.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub coeffs: StencilCoefficients,
    pub kh_max: f64,
    /// Largest absolute weight difference from the table.
    pub max_deviation: f64,
}

/// Sweeps the band edge and keeps the space-domain fit closest (max-abs) to the table.
pub fn calibrate_to_table1(m: usize) -> Result<Calibration> {
    let table = table1_coefficients(m)?;
    let mut best: Option<Calibration> = None;
    for kh_max in calibration_grid() {
        let coeffs = solve_space_domain(m, &FitBand::space(kh_max, DEFAULT_SAMPLES))?;
        let max_deviation = coeffs
            .weights()
            .iter()
            .zip(table.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| max_deviation < b.max_deviation) {
            best = Some(Calibration {
                coeffs,
                kh_max,
                max_deviation,
            });
        }
    }
    Ok(best.expect("calibration grid is non-empty"))
}
