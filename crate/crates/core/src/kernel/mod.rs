//! Velocity-stress leapfrog time stepping.
//!
//! One step updates `vx`, `vz` from the stresses, then `txx`, `tzz`, `txz`
//! from the new velocities. Eight spatial derivatives are evaluated per step.
//! The balanced scheme applies the length-`M` operator to all of them; the
//! non-balanced scheme applies it to four and the two-point difference to the
//! other four:
//!
//! | update | long operator        | two-point difference  |
//! |--------|----------------------|-----------------------|
//! | `vx`   | `d txx / dx`         | `d txz / dz`          |
//! | `vz`   | `d tzz / dz`         | `d txz / dx`          |
//! | `txx`, `tzz` | -              | `d vx / dx`, `d vz / dz` |
//! | `txz`  | `d vz / dx`, `d vx / dz` | -                 |
//!
//! `txx` and `tzz` share their two derivatives, so the non-balanced scheme
//! costs `4M + 4` weighted terms per cell against `8M` for the balanced one.
//!
//! All derivatives are accumulated row by row in the same order for both
//! schemes, and rows are independent, so results do not depend on the number
//! of threads.

mod ftz;
mod run;
mod source;
mod sponge;

pub use run::{
    run_simulation, ReceiverSpec, RunOptions, RunOutput, SeismogramSet, SimulationConfig, Snapshot,
    SpongeSpec,
};
pub use source::{inject_source, ricker, Mechanism, SourceSpec};
pub use sponge::{apply_sponge, Sponge};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::coeffs::StencilCoefficients;
use crate::error::{Error, Result};
use crate::model::{ElasticModel, WaveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Balanced,
    NonBalanced,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Balanced => "balanced",
            Scheme::NonBalanced => "non_balanced",
        }
    }

    /// Weighted-difference terms per interior cell and step.
    pub fn terms_per_cell(self, m: usize) -> u64 {
        let m = m as u64;
        match self {
            Scheme::Balanced => 8 * m,
            Scheme::NonBalanced => 4 * m + 4,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(Scheme::Balanced),
            "non_balanced" | "nonbalanced" => Ok(Scheme::NonBalanced),
            _ => Err(Error::Config(format!(
                "unknown scheme '{s}' (expected balanced or non_balanced)"
            ))),
        }
    }
}

/// Work counters accumulated by a [`Kernel`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounters {
    pub steps: u64,
    pub weighted_terms: u64,
}

/// Material arrays pre-scaled by `dt / h`, in `f32`.
#[derive(Debug, Clone)]
struct Medium {
    /// `dt / (rho h)`
    buoyancy: Vec<f32>,
    /// `(lambda + 2 mu) dt / h`
    l2m: Vec<f32>,
    /// `lambda dt / h`
    lam: Vec<f32>,
    /// `mu dt / h`
    mu: Vec<f32>,
}

impl Medium {
    fn new(model: &ElasticModel, dt: f64, h: f64) -> Self {
        let s = dt / h;
        let rho = model.rho.as_slice();
        let lambda = model.lambda.as_slice();
        let mu = model.mu.as_slice();
        Medium {
            buoyancy: rho.iter().map(|&r| (s / r) as f32).collect(),
            l2m: lambda
                .iter()
                .zip(mu)
                .map(|(&l, &m)| ((l + 2.0 * m) * s) as f32)
                .collect(),
            lam: lambda.iter().map(|&l| (l * s) as f32).collect(),
            mu: mu.iter().map(|&m| (m * s) as f32).collect(),
        }
    }
}

/// Operator weights for each of the eight derivatives.
#[derive(Debug, Clone)]
struct Operators {
    txx_x: Vec<f32>,
    txz_z: Vec<f32>,
    txz_x: Vec<f32>,
    tzz_z: Vec<f32>,
    vx_x: Vec<f32>,
    vz_z: Vec<f32>,
    vz_x: Vec<f32>,
    vx_z: Vec<f32>,
}

impl Operators {
    fn new(scheme: Scheme, coeffs: &StencilCoefficients) -> Self {
        let long: Vec<f32> = coeffs.weights().iter().map(|&c| c as f32).collect();
        let short = match scheme {
            Scheme::Balanced => long.clone(),
            Scheme::NonBalanced => vec![1.0],
        };
        Operators {
            txx_x: long.clone(),
            txz_z: short.clone(),
            txz_x: short.clone(),
            tzz_z: long.clone(),
            vx_x: short.clone(),
            vz_z: short,
            vz_x: long.clone(),
            vx_z: long,
        }
    }
}

/// Precomputed stepper for one scheme, weight set, model and time step.
#[derive(Debug, Clone)]
pub struct Kernel {
    scheme: Scheme,
    m: usize,
    nx: usize,
    nz: usize,
    medium: Medium,
    ops: Operators,
    counters: StepCounters,
}

impl Kernel {
    pub fn new(
        scheme: Scheme,
        coeffs: &StencilCoefficients,
        model: &ElasticModel,
        dt: f64,
        h: f64,
    ) -> Result<Self> {
        let (nx, nz) = model.shape();
        let m = coeffs.m();
        if nx < 2 * m + 2 || nz < 2 * m + 2 {
            return Err(Error::Grid(format!(
                "model {nx}x{nz} cannot hold an operator of half-length {m}"
            )));
        }
        if !(dt > 0.0 && h > 0.0) {
            return Err(Error::Config(format!("dt={dt} and h={h} must be positive")));
        }
        Ok(Kernel {
            scheme,
            m,
            nx,
            nz,
            medium: Medium::new(model, dt, h),
            ops: Operators::new(scheme, coeffs),
            counters: StepCounters::default(),
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn counters(&self) -> StepCounters {
        self.counters
    }

    /// Cells updated per step: `[M, n - M)` on each axis.
    pub fn interior_cells(&self) -> u64 {
        ((self.nx - 2 * self.m) * (self.nz - 2 * self.m)) as u64
    }

    /// Advances `state` by one time step on the current thread.
    pub fn step(&mut self, state: &mut WaveState) {
        self.check_shape(state);
        self.velocity_phase(state, false);
        self.stress_phase(state, false);
        self.finish_step(state);
    }

    /// Advances `state` by one step, spreading rows over the current rayon pool.
    /// Bit-identical to [`Kernel::step`].
    pub fn step_parallel(&mut self, state: &mut WaveState) {
        self.check_shape(state);
        self.velocity_phase(state, true);
        self.stress_phase(state, true);
        self.finish_step(state);
    }

    fn check_shape(&self, state: &WaveState) {
        assert_eq!(
            (state.geometry.nx, state.geometry.nz),
            (self.nx, self.nz),
            "state and kernel grids differ"
        );
    }

    fn finish_step(&mut self, state: &mut WaveState) {
        state.time_index += 1;
        self.counters.steps += 1;
        self.counters.weighted_terms += self.interior_cells() * self.scheme.terms_per_cell(self.m);
    }

    fn velocity_phase(&self, state: &mut WaveState, parallel: bool) {
        let WaveState {
            vx,
            vz,
            txx,
            tzz,
            txz,
            ..
        } = state;
        let (txx, tzz, txz) = (&txx[..], &tzz[..], &txz[..]);
        let nx = self.nx;
        let row = |j: usize, vx_row: &mut [f32], vz_row: &mut [f32], scratch: &mut Scratch| {
            if !self.is_interior_row(j) {
                return;
            }
            let (lo, hi) = (self.m, nx - self.m);
            let base = j * nx;
            let Scratch { a, b } = scratch;

            a.fill(0.0);
            b.fill(0.0);
            dx_minus(a, &txx[base..base + nx], &self.ops.txx_x, lo);
            dz_minus(b, txz, nx, j, &self.ops.txz_z, lo);
            let buoy = &self.medium.buoyancy[base + lo..base + hi];
            for (((v, &bu), &da), &db) in vx_row[lo..hi].iter_mut().zip(buoy).zip(a.iter()).zip(b.iter()) {
                *v += bu * (da + db);
            }

            a.fill(0.0);
            b.fill(0.0);
            dx_plus(a, &txz[base..base + nx], &self.ops.txz_x, lo);
            dz_plus(b, tzz, nx, j, &self.ops.tzz_z, lo);
            for (((v, &bu), &da), &db) in vz_row[lo..hi].iter_mut().zip(buoy).zip(a.iter()).zip(b.iter()) {
                *v += bu * (da + db);
            }
        };
        let len = nx - 2 * self.m;
        if parallel {
            vx.par_chunks_mut(nx)
                .zip(vz.par_chunks_mut(nx))
                .enumerate()
                .for_each_init(|| Scratch::new(len), |s, (j, (x, z))| row(j, x, z, s));
        } else {
            let mut s = Scratch::new(len);
            for (j, (x, z)) in vx.chunks_mut(nx).zip(vz.chunks_mut(nx)).enumerate() {
                row(j, x, z, &mut s);
            }
        }
    }

    fn stress_phase(&self, state: &mut WaveState, parallel: bool) {
        let WaveState {
            vx,
            vz,
            txx,
            tzz,
            txz,
            ..
        } = state;
        let (vx, vz) = (&vx[..], &vz[..]);
        let nx = self.nx;
        let row = |j: usize,
                   txx_row: &mut [f32],
                   tzz_row: &mut [f32],
                   txz_row: &mut [f32],
                   scratch: &mut Scratch| {
            if !self.is_interior_row(j) {
                return;
            }
            let (lo, hi) = (self.m, nx - self.m);
            let base = j * nx;
            let Scratch { a, b } = scratch;
            let med = &self.medium;

            a.fill(0.0);
            b.fill(0.0);
            dx_plus(a, &vx[base..base + nx], &self.ops.vx_x, lo);
            dz_minus(b, vz, nx, j, &self.ops.vz_z, lo);
            let l2m = &med.l2m[base + lo..base + hi];
            let lam = &med.lam[base + lo..base + hi];
            for (k, (sxx, szz)) in txx_row[lo..hi].iter_mut().zip(&mut tzz_row[lo..hi]).enumerate() {
                *sxx += l2m[k] * a[k] + lam[k] * b[k];
                *szz += lam[k] * a[k] + l2m[k] * b[k];
            }

            a.fill(0.0);
            b.fill(0.0);
            dx_minus(a, &vz[base..base + nx], &self.ops.vz_x, lo);
            dz_plus(b, vx, nx, j, &self.ops.vx_z, lo);
            let mu = &med.mu[base + lo..base + hi];
            for (((s, &m), &da), &db) in txz_row[lo..hi].iter_mut().zip(mu).zip(a.iter()).zip(b.iter()) {
                *s += m * (da + db);
            }
        };
        let len = nx - 2 * self.m;
        if parallel {
            txx.par_chunks_mut(nx)
                .zip(tzz.par_chunks_mut(nx))
                .zip(txz.par_chunks_mut(nx))
                .enumerate()
                .for_each_init(
                    || Scratch::new(len),
                    |s, (j, ((xx, zz), xz))| row(j, xx, zz, xz, s),
                );
        } else {
            let mut s = Scratch::new(len);
            for (j, ((xx, zz), xz)) in txx
                .chunks_mut(nx)
                .zip(tzz.chunks_mut(nx))
                .zip(txz.chunks_mut(nx))
                .enumerate()
            {
                row(j, xx, zz, xz, &mut s);
            }
        }
    }

    #[inline]
    fn is_interior_row(&self, j: usize) -> bool {
        j >= self.m && j < self.nz - self.m
    }
}

struct Scratch {
    a: Vec<f32>,
    b: Vec<f32>,
}

impl Scratch {
    fn new(len: usize) -> Self {
        Scratch {
            a: vec![0.0; len],
            b: vec![0.0; len],
        }
    }
}

// Staggered differences over one row segment starting at column `lo`.
// `minus` evaluates at i - 1/2 relative to the input samples:
//     sum_m c_m (f[i + m - 1] - f[i - m])
// `plus` evaluates at i + 1/2:
//     sum_m c_m (f[i + m] - f[i - m + 1])

#[inline]
fn dx_minus(acc: &mut [f32], row: &[f32], c: &[f32], lo: usize) {
    let len = acc.len();
    for (k, &cm) in c.iter().enumerate() {
        let m = k + 1;
        let fwd = &row[lo + m - 1..lo + m - 1 + len];
        let bwd = &row[lo - m..lo - m + len];
        for ((a, &f), &g) in acc.iter_mut().zip(fwd).zip(bwd) {
            *a += cm * (f - g);
        }
    }
}

#[inline]
fn dx_plus(acc: &mut [f32], row: &[f32], c: &[f32], lo: usize) {
    let len = acc.len();
    for (k, &cm) in c.iter().enumerate() {
        let m = k + 1;
        let fwd = &row[lo + m..lo + m + len];
        let bwd = &row[lo + 1 - m..lo + 1 - m + len];
        for ((a, &f), &g) in acc.iter_mut().zip(fwd).zip(bwd) {
            *a += cm * (f - g);
        }
    }
}

#[inline]
fn dz_minus(acc: &mut [f32], field: &[f32], nx: usize, j: usize, c: &[f32], lo: usize) {
    let len = acc.len();
    for (k, &cm) in c.iter().enumerate() {
        let m = k + 1;
        let fwd = &field[(j + m - 1) * nx + lo..][..len];
        let bwd = &field[(j - m) * nx + lo..][..len];
        for ((a, &f), &g) in acc.iter_mut().zip(fwd).zip(bwd) {
            *a += cm * (f - g);
        }
    }
}

#[inline]
fn dz_plus(acc: &mut [f32], field: &[f32], nx: usize, j: usize, c: &[f32], lo: usize) {
    let len = acc.len();
    for (k, &cm) in c.iter().enumerate() {
        let m = k + 1;
        let fwd = &field[(j + m) * nx + lo..][..len];
        let bwd = &field[(j + 1 - m) * nx + lo..][..len];
        for ((a, &f), &g) in acc.iter_mut().zip(fwd).zip(bwd) {
            *a += cm * (f - g);
        }
    }
}

/// One balanced step. Builds a throwaway [`Kernel`]; use [`Kernel`] directly in loops.
pub fn step_balanced(
    state: &mut WaveState,
    model: &ElasticModel,
    coeffs: &StencilCoefficients,
    dt: f64,
    h: f64,
) -> Result<()> {
    step_with(Scheme::Balanced, state, model, coeffs, dt, h)
}

/// One non-balanced step. Builds a throwaway [`Kernel`]; use [`Kernel`] directly in loops.
pub fn step_nonbalanced(
    state: &mut WaveState,
    model: &ElasticModel,
    coeffs: &StencilCoefficients,
    dt: f64,
    h: f64,
) -> Result<()> {
    step_with(Scheme::NonBalanced, state, model, coeffs, dt, h)
}

fn step_with(
    scheme: Scheme,
    state: &mut WaveState,
    model: &ElasticModel,
    coeffs: &StencilCoefficients,
    dt: f64,
    h: f64,
) -> Result<()> {
    let mut kernel = Kernel::new(scheme, coeffs, model, dt, h)?;
    kernel.step(state);
    if !state.is_finite() {
        return Err(Error::NumericalAbort {
            step: state.time_index,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{table1_coefficients, taylor_coefficients};
    use crate::model::{allocate_state, Field, GridGeometry};

    fn setup(n: usize) -> (ElasticModel, WaveState) {
        let model = ElasticModel::homogeneous(n, n, 1732.1, 1000.0, 1000.0).unwrap();
        let state = allocate_state(GridGeometry::new(n, n, 10.0).unwrap(), 7).unwrap();
        (model, state)
    }

    fn support(field: &[f32], nx: usize) -> Option<(usize, usize, usize, usize)> {
        let mut b: Option<(usize, usize, usize, usize)> = None;
        for (k, &v) in field.iter().enumerate() {
            if v != 0.0 {
                let (i, j) = (k % nx, k / nx);
                b = Some(match b {
                    None => (i, i, j, j),
                    Some((a, bb, c, d)) => (a.min(i), bb.max(i), c.min(j), d.max(j)),
                });
            }
        }
        b
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let (model, mut state) = setup(40);
        let c = table1_coefficients(7).unwrap();
        for scheme in [Scheme::Balanced, Scheme::NonBalanced] {
            let mut k = Kernel::new(scheme, &c, &model, 1e-3, 10.0).unwrap();
            for _ in 0..5 {
                k.step(&mut state);
            }
            assert_eq!(state.max_abs(), 0.0);
        }
    }

    #[test]
    fn impulse_support_follows_operator_reach() {
        let n = 60;
        let c = taylor_coefficients(7).unwrap();
        for scheme in [Scheme::Balanced, Scheme::NonBalanced] {
            let (model, mut state) = setup(n);
            let (ci, cj) = (30, 30);
            state.txx[cj * n + ci] = 1.0;
            let mut k = Kernel::new(scheme, &c, &model, 1e-3, 10.0).unwrap();
            k.step(&mut state);
            // vx reads txx through the x operator only: row cj, columns ci-6..=ci+7.
            let (x0, x1, z0, z1) = support(&state.vx, n).unwrap();
            assert_eq!((x0, x1, z0, z1), (ci - 6, ci + 7, cj, cj));
            // vz never sees txx directly.
            let txz_reach = support(&state.txz, n).unwrap();
            assert!(support(&state.vz, n).is_none());
            // txz is driven by vx through d/dz: the long z operator spans 2M rows.
            assert_eq!(txz_reach.2, cj - 7);
            assert_eq!(txz_reach.3, cj + 6);
            // txx is driven by vx through the x operator (long or two-point).
            let (sx0, sx1, _, _) = support(&state.txx, n).unwrap();
            match scheme {
                Scheme::Balanced => assert_eq!((sx0, sx1), (ci - 13, ci + 13)),
                Scheme::NonBalanced => assert_eq!((sx0, sx1), (ci - 7, ci + 7)),
            }
        }
    }

    #[test]
    fn second_order_schemes_are_bit_identical() {
        let n = 32;
        let c = taylor_coefficients(1).unwrap();
        let (model, mut a) = setup(n);
        for (k, v) in a.txx.iter_mut().enumerate() {
            *v = ((k * 37 % 101) as f32 - 50.0) * 1e3;
        }
        for (k, v) in a.vz.iter_mut().enumerate() {
            *v = ((k * 17 % 29) as f32 - 14.0) * 1e-3;
        }
        let mut b = a.clone();
        let mut kb = Kernel::new(Scheme::Balanced, &c, &model, 1e-3, 10.0).unwrap();
        let mut kn = Kernel::new(Scheme::NonBalanced, &c, &model, 1e-3, 10.0).unwrap();
        for _ in 0..20 {
            kb.step(&mut a);
            kn.step(&mut b);
        }
        for f in Field::ALL {
            assert!(a.field(f).iter().zip(b.field(f)).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn parallel_step_matches_serial_bitwise() {
        let n = 48;
        let c = table1_coefficients(7).unwrap();
        let (model, mut a) = setup(n);
        a.txx[24 * n + 20] = 1.0e6;
        a.tzz[24 * n + 20] = 1.0e6;
        let mut b = a.clone();
        let mut k1 = Kernel::new(Scheme::NonBalanced, &c, &model, 1e-3, 10.0).unwrap();
        let mut k2 = k1.clone();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        for _ in 0..30 {
            k1.step(&mut a);
            pool.install(|| k2.step_parallel(&mut b));
        }
        assert_eq!(a, b);
    }

    #[test]
    fn counters_track_operator_terms() {
        let (model, mut state) = setup(40);
        let c = table1_coefficients(7).unwrap();
        let mut kb = Kernel::new(Scheme::Balanced, &c, &model, 1e-3, 10.0).unwrap();
        let mut kn = Kernel::new(Scheme::NonBalanced, &c, &model, 1e-3, 10.0).unwrap();
        for _ in 0..3 {
            kb.step(&mut state);
            kn.step(&mut state);
        }
        let cells = (40 - 14) * (40 - 14) * 3;
        assert_eq!(kb.counters().weighted_terms, cells * 56);
        assert_eq!(kn.counters().weighted_terms, cells * 32);
        assert_eq!(kn.counters().steps, 3);
    }

    #[test]
    fn free_step_functions_advance_time() {
        let (model, mut state) = setup(30);
        let c = table1_coefficients(3).unwrap();
        step_balanced(&mut state, &model, &c, 1e-3, 10.0).unwrap();
        step_nonbalanced(&mut state, &model, &c, 1e-3, 10.0).unwrap();
        assert_eq!(state.time_index, 2);
        let small = ElasticModel::homogeneous(15, 15, 2000.0, 1000.0, 1000.0).unwrap();
        let mut s = allocate_state(GridGeometry::new(15, 15, 10.0).unwrap(), 1).unwrap();
        assert!(step_balanced(&mut s, &small, &taylor_coefficients(7).unwrap(), 1e-3, 10.0).is_err());
    }
}
