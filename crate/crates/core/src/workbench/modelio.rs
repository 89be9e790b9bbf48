//! Raw-grid model files and wavefield snapshots.
//!
//! A model is a text header plus three grids of little-endian `f32`, row-major
//! with `x` fastest:
//!
//! ```text
//! nx=300
//! nz=200
//! h=10
//! vp=model.vp.bin
//! vs=model.vs.bin
//! rho=model.rho.bin
//! label=layered miniature
//! ```
//!
//! Grid paths are relative to the header. `h` and `label` are optional.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::kernel::Snapshot;
use crate::model::{build_model, Array2, ElasticModel, Field};

/// Label attached to the layered stand-in for the salt model.
pub const LAYERED_LABEL: &str = "layered miniature (stand-in for the salt model)";

#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: ElasticModel,
    pub h: Option<f64>,
    pub label: Option<String>,
}

pub fn read_f32_grid(path: &Path, nx: usize, nz: usize) -> Result<Array2<f64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let expected = nx * nz * 4;
    if bytes.len() != expected {
        return Err(Error::Model(format!(
            "{}: expected {expected} bytes for a {nx}x{nz} grid, found {}",
            path.display(),
            bytes.len()
        )));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
        .collect();
    Array2::from_vec(nx, nz, data)
}

pub fn write_f32(path: &Path, values: impl IntoIterator<Item = f32>) -> Result<()> {
    let bytes: Vec<u8> = values.into_iter().flat_map(f32::to_le_bytes).collect();
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn parse_header(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Model(format!("{}: bad header line '{line}'", path.display())))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn header_value<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, path: &Path) -> Result<T> {
    let v = map
        .get(key)
        .ok_or_else(|| Error::Model(format!("{}: missing '{key}'", path.display())))?;
    v.parse()
        .map_err(|_| Error::Model(format!("{}: bad value for '{key}': '{v}'", path.display())))
}

/// Reads a model header and its three grids.
pub fn load_model(header: impl AsRef<Path>) -> Result<ModelFile> {
    let header = header.as_ref();
    let map = parse_header(header)?;
    let nx: usize = header_value(&map, "nx", header)?;
    let nz: usize = header_value(&map, "nz", header)?;
    let h = match map.get("h") {
        Some(_) => Some(header_value::<f64>(&map, "h", header)?),
        None => None,
    };
    let dir = header.parent().unwrap_or(Path::new("."));
    let grid = |key: &str| -> Result<Array2<f64>> {
        let rel: String = header_value(&map, key, header)?;
        read_f32_grid(&dir.join(rel), nx, nz)
    };
    let model = build_model(grid("vp")?, grid("vs")?, grid("rho")?)?;
    Ok(ModelFile {
        model,
        h,
        label: map.get("label").cloned(),
    })
}

/// Writes `<dir>/<name>.hdr` plus `<name>.{vp,vs,rho}.bin`; returns the header path.
pub fn write_model(
    dir: &Path,
    name: &str,
    model: &ElasticModel,
    h: Option<f64>,
    label: Option<&str>,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (nx, nz) = model.shape();
    let mut hdr = format!("nx={nx}\nnz={nz}\n");
    if let Some(h) = h {
        hdr.push_str(&format!("h={}\n", sig9(h)));
    }
    for (key, grid) in [("vp", &model.vp), ("vs", &model.vs), ("rho", &model.rho)] {
        let file = format!("{name}.{key}.bin");
        write_f32(&dir.join(&file), grid.as_slice().iter().map(|&v| v as f32))?;
        hdr.push_str(&format!("{key}={file}\n"));
    }
    if let Some(label) = label {
        hdr.push_str(&format!("label={label}\n"));
    }
    let path = dir.join(format!("{name}.hdr"));
    std::fs::write(&path, hdr).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Homogeneous model of the scheme-comparison experiment: α=1732.1, β=1000, ρ=1000.
pub fn homogeneous_experiment_model(nx: usize, nz: usize) -> Result<ElasticModel> {
    ElasticModel::homogeneous(nx, nz, 1732.1, 1000.0, 1000.0)
}

/// Three flat layers with a fast elliptical body standing in for salt.
/// Velocities stay below 4200 m/s so the long balanced reference is stable at
/// `dt = 1 ms`, `h = 10 m`.
pub fn layered_miniature(nx: usize, nz: usize) -> Result<ElasticModel> {
    let (fx, fz) = (nx as f64, nz as f64);
    let props = |ix: usize, iz: usize| -> (f64, f64, f64) {
        let (x, z) = (ix as f64 / fx, iz as f64 / fz);
        let ex = (x - 0.55) / 0.22;
        let ez = (z - 0.62) / 0.14;
        if ex * ex + ez * ez <= 1.0 {
            (4200.0, 2400.0, 2150.0)
        } else if z < 0.3 {
            (1800.0, 1000.0, 1900.0)
        } else if z < 0.55 {
            (2500.0, 1400.0, 2100.0)
        } else {
            (3200.0, 1800.0, 2300.0)
        }
    };
    build_model(
        Array2::from_fn(nx, nz, |i, j| props(i, j).0),
        Array2::from_fn(nx, nz, |i, j| props(i, j).1),
        Array2::from_fn(nx, nz, |i, j| props(i, j).2),
    )
}

/// Writes one raw file per field plus `snap_<step>.hdr`; returns every path written.
pub fn write_snapshot(dir: &Path, snap: &Snapshot, dt: f64) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let g = snap.state.geometry;
    let mut paths = Vec::new();
    let mut hdr = format!(
        "nx={}\nnz={}\nh={}\ndt={}\nstep={}\n",
        g.nx,
        g.nz,
        sig9(g.h),
        sig9(dt),
        snap.step
    );
    for f in Field::ALL {
        let file = format!("snap_{:06}_{}.bin", snap.step, f.name());
        let path = dir.join(&file);
        write_f32(&path, snap.state.field(f).iter().copied())?;
        hdr.push_str(&format!("{}={file}\n", f.name()));
        paths.push(path);
    }
    let path = dir.join(format!("snap_{:06}.hdr", snap.step));
    std::fs::write(&path, hdr).map_err(|e| Error::io(&path, e))?;
    paths.push(path);
    Ok(paths)
}
