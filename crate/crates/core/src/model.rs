//! Staggered-grid data model: geometry, material fields and wavefield state.
//!
//! Every field is stored as a full `nx * nz` array, row-major with `x` fastest
//! (`index = iz * nx + ix`). The half-cell offsets are a matter of
//! interpretation only:
//!
//! | field        | physical position        |
//! |--------------|--------------------------|
//! | `vx`         | `(ix, iz)`               |
//! | `txx`, `tzz` | `(ix + 1/2, iz)`         |
//! | `txz`        | `(ix, iz + 1/2)`         |
//! | `vz`         | `(ix + 1/2, iz + 1/2)`   |
//!
//! Material parameters are sampled at the nominal node of the updated field,
//! without averaging across staggered positions.

use std::fmt;

use crate::error::{Error, Result};

/// Uniform 2D grid: `nx` by `nz` cells with spacing `h` metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub nx: usize,
    pub nz: usize,
    pub h: f64,
}

impl GridGeometry {
    pub fn new(nx: usize, nz: usize, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Grid(format!("spacing h must be positive, got {h}")));
        }
        if nx < 4 || nz < 4 {
            return Err(Error::Grid(format!(
                "grid {nx}x{nz} is too small for any staggered operator (need at least 4x4)"
            )));
        }
        Ok(GridGeometry { nx, nz, h })
    }

    /// Checks that a length-`m` operator fits with at least two interior cells per axis.
    pub fn check_operator(&self, m: usize) -> Result<()> {
        let min = 2 * m + 2;
        if self.nx < min || self.nz < min {
            return Err(Error::Grid(format!(
                "grid {}x{} cannot hold an operator of half-length {m} (need at least {min} cells per axis)",
                self.nx, self.nz
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iz: usize) -> usize {
        iz * self.nx + ix
    }
}

/// Dense row-major 2D array with `x` as the fast axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Array2<T> {
    nx: usize,
    nz: usize,
    data: Vec<T>,
}

impl<T: Copy> Array2<T> {
    pub fn filled(nx: usize, nz: usize, value: T) -> Self {
        Array2 {
            nx,
            nz,
            data: vec![value; nx * nz],
        }
    }

    pub fn from_vec(nx: usize, nz: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != nx * nz {
            return Err(Error::Grid(format!(
                "array of length {} does not match {nx}x{nz}",
                data.len()
            )));
        }
        Ok(Array2 { nx, nz, data })
    }

    pub fn from_fn(nx: usize, nz: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nx * nz);
        for iz in 0..nz {
            for ix in 0..nx {
                data.push(f(ix, iz));
            }
        }
        Array2 { nx, nz, data }
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Array2<U> {
        Array2 {
            nx: self.nx,
            nz: self.nz,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, ix: usize, iz: usize) -> T {
        self.data[iz * self.nx + ix]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, iz: usize, value: T) {
        self.data[iz * self.nx + ix] = value;
    }
}

impl<T> Array2<T> {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.nz)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }
}

/// Isotropic elastic medium sampled on the grid.
#[derive(Debug, Clone)]
pub struct ElasticModel {
    pub vp: Array2<f64>,
    pub vs: Array2<f64>,
    pub rho: Array2<f64>,
    pub lambda: Array2<f64>,
    pub mu: Array2<f64>,
    /// True when some node has `vs == 0` (fluid region).
    pub has_acoustic: bool,
}

/// Builds an elastic model, deriving the Lamé fields from velocities and density.
pub fn build_model(vp: Array2<f64>, vs: Array2<f64>, rho: Array2<f64>) -> Result<ElasticModel> {
    if vp.shape() != vs.shape() || vp.shape() != rho.shape() {
        return Err(Error::Model(format!(
            "shape mismatch: vp {:?}, vs {:?}, rho {:?}",
            vp.shape(),
            vs.shape(),
            rho.shape()
        )));
    }
    let nx = vp.nx();
    let mut has_acoustic = false;
    for (k, ((&a, &b), &r)) in vp
        .as_slice()
        .iter()
        .zip(vs.as_slice())
        .zip(rho.as_slice())
        .enumerate()
    {
        let (ix, iz) = (k % nx, k / nx);
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Model(format!("density {r} at ({ix}, {iz}) must be positive")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Model(format!("P velocity {a} at ({ix}, {iz}) must be positive")));
        }
        if b.is_nan() || b < 0.0 || b >= a {
            return Err(Error::Model(format!(
                "S velocity {b} at ({ix}, {iz}) must satisfy 0 <= vs < vp = {a}"
            )));
        }
        has_acoustic |= b == 0.0;
    }
    if has_acoustic {
        log::warn!("model contains acoustic nodes (vs = 0)");
    }

    let (nx, nz) = vp.shape();
    let mut lambda = Array2::filled(nx, nz, 0.0);
    let mut mu = Array2::filled(nx, nz, 0.0);
    for k in 0..nx * nz {
        let (a, b, r) = (vp.as_slice()[k], vs.as_slice()[k], rho.as_slice()[k]);
        mu.as_mut_slice()[k] = r * b * b;
        lambda.as_mut_slice()[k] = r * (a * a - 2.0 * b * b);
    }
    Ok(ElasticModel {
        vp,
        vs,
        rho,
        lambda,
        mu,
        has_acoustic,
    })
}

impl ElasticModel {
    pub fn homogeneous(nx: usize, nz: usize, vp: f64, vs: f64, rho: f64) -> Result<Self> {
        build_model(
            Array2::filled(nx, nz, vp),
            Array2::filled(nx, nz, vs),
            Array2::filled(nx, nz, rho),
        )
    }

    pub fn shape(&self) -> (usize, usize) {
        self.vp.shape()
    }

    pub fn max_vp(&self) -> f64 {
        self.vp.as_slice().iter().copied().fold(0.0, f64::max)
    }
}

/// The five velocity-stress components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Vx,
    Vz,
    Txx,
    Tzz,
    Txz,
}

impl Field {
    pub const ALL: [Field; 5] = [Field::Vx, Field::Vz, Field::Txx, Field::Tzz, Field::Txz];

    pub fn name(self) -> &'static str {
        match self {
            Field::Vx => "vx",
            Field::Vz => "vz",
            Field::Txx => "txx",
            Field::Tzz => "tzz",
            Field::Txz => "txz",
        }
    }

    pub fn parse(s: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Wavefield at one time level. Arrays are `f32`; see the module docs for staggering.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub geometry: GridGeometry,
    pub vx: Vec<f32>,
    pub vz: Vec<f32>,
    pub txx: Vec<f32>,
    pub tzz: Vec<f32>,
    pub txz: Vec<f32>,
    pub time_index: usize,
}

/// Zero-initialised state for a grid that must hold a length-`m` operator.
pub fn allocate_state(geometry: GridGeometry, m: usize) -> Result<WaveState> {
    geometry.check_operator(m)?;
    let n = geometry.len();
    Ok(WaveState {
        geometry,
        vx: vec![0.0; n],
        vz: vec![0.0; n],
        txx: vec![0.0; n],
        tzz: vec![0.0; n],
        txz: vec![0.0; n],
        time_index: 0,
    })
}

impl WaveState {
    pub fn field(&self, field: Field) -> &[f32] {
        match field {
            Field::Vx => &self.vx,
            Field::Vz => &self.vz,
            Field::Txx => &self.txx,
            Field::Tzz => &self.tzz,
            Field::Txz => &self.txz,
        }
    }

    pub fn field_mut(&mut self, field: Field) -> &mut [f32] {
        match field {
            Field::Vx => &mut self.vx,
            Field::Vz => &mut self.vz,
            Field::Txx => &mut self.txx,
            Field::Tzz => &mut self.tzz,
            Field::Txz => &mut self.txz,
        }
    }

    /// Largest absolute value over all five fields. NaN propagates.
    pub fn max_abs(&self) -> f32 {
        Field::ALL
            .iter()
            .flat_map(|&f| self.field(f).iter())
            .fold(0.0f32, |acc, &v| {
                let a = v.abs();
                if a.is_nan() || acc.is_nan() {
                    f32::NAN
                } else {
                    acc.max(a)
                }
            })
    }

    pub fn is_finite(&self) -> bool {
        Field::ALL
            .iter()
            .all(|&f| self.field(f).iter().all(|v| v.is_finite()))
    }
}
