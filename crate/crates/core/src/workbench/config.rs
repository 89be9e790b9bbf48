//! Flat `key=value` configuration files.
//!
//! ```text
//! # comment
//! grid.nx = 300
//! grid.nz = 300
//! grid.h = 10
//! time.dt = 0.001
//! time.nt = 1200
//! source.ix = 150
//! source.iz = 150
//! ```
//!
//! One assignment per line; blank lines and lines starting with `#` are
//! skipped. Keys are case-sensitive, duplicates and unknown keys are errors.
//!
//! | key | default |
//! |-----|---------|
//! | `grid.nx`, `grid.nz`, `grid.h` | required |
//! | `time.dt`, `time.nt` | required |
//! | `scheme` | `non_balanced` |
//! | `coeffs.m` | `7` |
//! | `coeffs.kind` | `table1` (non-balanced) or `taylor` (balanced); also `space_ls`, `balanced_ls`, `user`, `file` |
//! | `coeffs.kh_max` | per-kind default band edge (least-squares kinds only) |
//! | `coeffs.weights` | comma-separated weights (`kind = user`) |
//! | `coeffs.file` | coefficient text file (`kind = file`), relative to the config |
//! | `source.ix`, `source.iz` | required |
//! | `source.f0` | `14` Hz |
//! | `source.t0` | `1.2 / f0` |
//! | `source.mechanism` | `explosive` (or `vertical_force`) |
//! | `source.amplitude` | `1` |
//! | `receivers.component` | `vz` |
//! | `receivers.positions` | nine receivers on a line halfway between the top sponge and the source |
//! | `sponge.width`, `sponge.decay` | `30`, `0.015` |
//! | `stability.override` | `false` |
//! | `snapshots.steps` | none |
//! | `model.header` | none (relative to the config) |
//!
//! Receiver positions are written `ix:iz` and separated by commas.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::coeffs::{
    solve_balanced_space_domain, solve_space_domain, table1_coefficients, taylor_coefficients,
    FitBand, StencilCoefficients, DEFAULT_SAMPLES,
};
use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::kernel::{
    Mechanism, ReceiverSpec, Scheme, SimulationConfig, SourceSpec, SpongeSpec,
};
use crate::model::{Field, GridGeometry};

const KNOWN_KEYS: &[&str] = &[
    "grid.nx",
    "grid.nz",
    "grid.h",
    "time.dt",
    "time.nt",
    "scheme",
    "coeffs.m",
    "coeffs.kind",
    "coeffs.kh_max",
    "coeffs.weights",
    "coeffs.file",
    "source.ix",
    "source.iz",
    "source.f0",
    "source.t0",
    "source.mechanism",
    "source.amplitude",
    "receivers.component",
    "receivers.positions",
    "sponge.width",
    "sponge.decay",
    "stability.override",
    "snapshots.steps",
    "model.header",
];

/// Default band edge for balanced least-squares weights.
pub const BALANCED_LS_KH_MAX: f64 = 0.8 * PI;

/// A parsed configuration plus what is needed to reproduce it.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub sim: SimulationConfig,
    pub model_header: Option<PathBuf>,
    /// Every resolved key, defaults included, as sorted `key=value` lines.
    pub canonical: String,
}

impl LoadedConfig {
    /// SHA-256 of the canonical text, hex encoded.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Reads and resolves a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    load_config(path).map(|c| c.sim)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base)
}

/// Parses configuration text; relative paths resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<LoadedConfig> {
    let mut raw = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KNOWN_KEYS.contains(&k) {
            return Err(Error::Config(format!("line {}: unknown key '{k}'", lineno + 1)));
        }
        if raw.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{k}'", lineno + 1)));
        }
    }
    Resolver { raw, resolved: BTreeMap::new() }.resolve(base)
}

struct Resolver {
    raw: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    fn required<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self
            .raw
            .get(key)
            .cloned()
            .ok_or_else(|| Error::Config(format!("missing required key '{key}'")))?;
        self.parse(key, &v)
    }

    fn optional<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw.get(key).cloned() {
            Some(v) => self.parse(key, &v).map(Some),
            None => Ok(None),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, v: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let out = v
            .parse::<T>()
            .map_err(|e| Error::Config(format!("key '{key}': cannot parse '{v}': {e}")))?;
        self.resolved.insert(key.into(), v.into());
        Ok(out)
    }

    fn record(&mut self, key: &str, value: impl Into<String>) {
        self.resolved.insert(key.into(), value.into());
    }

    fn resolve(mut self, base: &Path) -> Result<LoadedConfig> {
        let nx: usize = self.required("grid.nx")?;
        let nz: usize = self.required("grid.nz")?;
        let h: f64 = self.required("grid.h")?;
        let geometry = GridGeometry::new(nx, nz, h)?;
        let dt: f64 = self.required("time.dt")?;
        let nt: usize = self.required("time.nt")?;
        if nt == 0 {
            return Err(Error::Config("time.nt must be at least 1".into()));
        }

        let scheme = match self.optional::<String>("scheme")? {
            Some(s) => s.parse::<Scheme>()?,
            None => Scheme::NonBalanced,
        };
        self.record("scheme", scheme.name());

        let coeffs = self.coefficients(scheme, base)?;

        let ix: usize = self.required("source.ix")?;
        let iz: usize = self.required("source.iz")?;
        let f0: f64 = self.optional("source.f0")?.unwrap_or(14.0);
        self.record("source.f0", sig9(f0));
        let t0: f64 = self.optional("source.t0")?.unwrap_or(1.2 / f0);
        self.record("source.t0", sig9(t0));
        let mechanism = match self.optional::<String>("source.mechanism")? {
            Some(m) => m.parse::<Mechanism>()?,
            None => Mechanism::Explosive,
        };
        self.record("source.mechanism", mechanism.name());
        let amplitude: f64 = self.optional("source.amplitude")?.unwrap_or(1.0);
        self.record("source.amplitude", sig9(amplitude));
        let source = SourceSpec {
            ix,
            iz,
            f0,
            t0,
            mechanism,
            amplitude,
        };

        let width: usize = self.optional("sponge.width")?.unwrap_or(30);
        let decay: f64 = self.optional("sponge.decay")?.unwrap_or(0.015);
        self.record("sponge.width", width.to_string());
        self.record("sponge.decay", sig9(decay));
        let sponge = SpongeSpec { width, decay };

        let component = match self.optional::<String>("receivers.component")? {
            Some(c) => Field::parse(&c)
                .ok_or_else(|| Error::Config(format!("unknown receiver component '{c}'")))?,
            None => Field::Vz,
        };
        self.record("receivers.component", component.name());
        let positions = match self.optional::<String>("receivers.positions")? {
            Some(list) => parse_positions(&list)?,
            None => default_receiver_line(geometry, &source, width),
        };
        self.record("receivers.positions", format_positions(&positions));

        let override_stability: bool = self.optional("stability.override")?.unwrap_or(false);
        self.record("stability.override", override_stability.to_string());

        let snapshot_steps = match self.optional::<String>("snapshots.steps")? {
            Some(list) => parse_list::<usize>("snapshots.steps", &list)?,
            None => Vec::new(),
        };

        let model_header = self.optional::<String>("model.header")?.map(|p| base.join(p));

        let sim = SimulationConfig {
            geometry,
            dt,
            nt,
            scheme,
            coeffs,
            source,
            receivers: ReceiverSpec {
                component,
                positions,
            },
            sponge,
            override_stability,
            snapshot_steps,
        };
        sim.validate()?;

        let canonical = self
            .resolved
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        Ok(LoadedConfig {
            sim,
            model_header,
            canonical,
        })
    }

    fn coefficients(&mut self, scheme: Scheme, base: &Path) -> Result<StencilCoefficients> {
        let m: usize = self.optional("coeffs.m")?.unwrap_or(7);
        self.record("coeffs.m", m.to_string());
        let kind = self.optional::<String>("coeffs.kind")?.unwrap_or_else(|| {
            match scheme {
                Scheme::NonBalanced => "table1",
                Scheme::Balanced => "taylor",
            }
            .to_string()
        });
        self.record("coeffs.kind", kind.clone());
        let kh_max: Option<f64> = self.optional("coeffs.kh_max")?;
        let coeffs = match kind.as_str() {
            "table1" => table1_coefficients(m)?,
            "taylor" => taylor_coefficients(m)?,
            "space_ls" => {
                let mut band = FitBand::default_for(m);
                if let Some(k) = kh_max {
                    band.kh_max = k;
                }
                self.record("coeffs.kh_max", sig9(band.kh_max));
                solve_space_domain(m, &band)?
            }
            "balanced_ls" => {
                let band = FitBand::space(kh_max.unwrap_or(BALANCED_LS_KH_MAX), DEFAULT_SAMPLES.max(4 * m));
                self.record("coeffs.kh_max", sig9(band.kh_max));
                solve_balanced_space_domain(m, &band)?
            }
            "user" => {
                let list: String = self.required("coeffs.weights")?;
                StencilCoefficients::user(parse_list::<f64>("coeffs.weights", &list)?)?
            }
            "file" => {
                let rel: String = self.required("coeffs.file")?;
                let path = base.join(rel);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                StencilCoefficients::from_text(&text)?
            }
            other => {
                return Err(Error::Config(format!("unknown coeffs.kind '{other}'")));
            }
        };
        if coeffs.m() != m {
            return Err(Error::Config(format!(
                "coeffs.m={m} but the {kind} weights have M={}",
                coeffs.m()
            )));
        }
        if matches!(kind.as_str(), "user" | "file") {
            let weights = coeffs.weights().iter().map(|&w| sig9(w)).collect::<Vec<_>>();
            self.record("coeffs.weights", weights.join(","));
        }
        Ok(coeffs)
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, list: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| Error::Config(format!("key '{key}': cannot parse '{s}': {e}")))
        })
        .collect()
}

fn parse_positions(list: &str) -> Result<Vec<(usize, usize)>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("receiver position '{p}' is not ix:iz")))?;
            let ix = a.trim().parse::<usize>();
            let iz = b.trim().parse::<usize>();
            match (ix, iz) {
                (Ok(ix), Ok(iz)) => Ok((ix, iz)),
                _ => Err(Error::Config(format!("receiver position '{p}' is not ix:iz"))),
            }
        })
        .collect()
}

fn format_positions(p: &[(usize, usize)]) -> String {
    p.iter()
        .map(|(x, z)| format!("{x}:{z}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Nine receivers on the row halfway between the top sponge and the source,
/// evenly spread over the non-sponge interior with a five-cell inset.
pub fn default_receiver_line(g: GridGeometry, source: &SourceSpec, sponge: usize) -> Vec<(usize, usize)> {
    let iz = (sponge + source.iz) / 2;
    let lo = sponge + 5;
    let hi = g.nx.saturating_sub(sponge + 6).max(lo);
    (0..9).map(|k| (lo + k * (hi - lo) / 8, iz)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Provenance;

    const MINIMAL: &str = "grid.nx=120\ngrid.nz=120\ngrid.h=10\ntime.dt=0.001\ntime.nt=10\nsource.ix=60\nsource.iz=70\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str(MINIMAL, Path::new(".")).unwrap();
        let s = &c.sim;
        assert_eq!(s.scheme, Scheme::NonBalanced);
        assert_eq!(s.coeffs.m(), 7);
        assert_eq!(s.coeffs.provenance, Provenance::Table1);
        assert_eq!(s.sponge, SpongeSpec { width: 30, decay: 0.015 });
        assert_eq!(s.source.f0, 14.0);
        assert_eq!(s.receivers.component, Field::Vz);
        assert_eq!(s.receivers.positions.len(), 9);
        assert!(s.receivers.positions.iter().all(|&(_, iz)| iz == 50));
        assert!(!s.override_stability);
    }

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = parse_config_str(MINIMAL, Path::new(".")).unwrap();
        let reordered: String = MINIMAL.lines().rev().map(|l| format!("{l}\n")).collect();
        let b = parse_config_str(&format!("# comment\n\n{reordered}"), Path::new(".")).unwrap();
        assert_eq!(a.digest(), b.digest());
        let c = parse_config_str(&format!("{MINIMAL}source.f0=15\n"), Path::new(".")).unwrap();
        assert_ne!(a.digest(), c.digest());
        // Explicitly writing a default does not change the digest.
        let d = parse_config_str(&format!("{MINIMAL}scheme=non_balanced\n"), Path::new(".")).unwrap();
        assert_eq!(a.digest(), d.digest());
    }

    #[test]
    fn misspelled_key_is_named() {
        let err = parse_config_str(&format!("{MINIMAL}sourse.f0=14\n"), Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("sourse.f0"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_and_malformed_values() {
        let err = parse_config_str("grid.nx=100\n", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("grid.nz"));
        assert!(parse_config_str(&format!("{MINIMAL}grid.nx=5\n"), Path::new(".")).is_err());
        assert!(parse_config_str(&MINIMAL.replace("grid.h=10", "grid.h=ten"), Path::new(".")).is_err());
        assert!(parse_config_str(&MINIMAL.replace("source.iz=70", "source.iz=10"), Path::new(".")).is_err());
        assert!(parse_config_str(&format!("{MINIMAL}receivers.positions=40:40,50\n"), Path::new(".")).is_err());
        assert!(parse_config_str("just a line\n", Path::new(".")).is_err());
    }

    #[test]
    fn unstable_dt_still_parses() {
        let text = MINIMAL.replace("time.dt=0.001", "time.dt=0.01");
        let c = parse_config_str(&text, Path::new(".")).unwrap();
        assert_eq!(c.sim.dt, 0.01);
    }

    #[test]
    fn coefficient_kinds() {
        let bal = parse_config_str(&format!("{MINIMAL}scheme=balanced\ncoeffs.m=4\n"), Path::new(".")).unwrap();
        assert_eq!(bal.sim.coeffs.provenance, Provenance::Taylor);
        let user = parse_config_str(
            &format!("{MINIMAL}coeffs.m=2\ncoeffs.kind=user\ncoeffs.weights=1.125, -0.0416666667\n"),
            Path::new("."),
        )
        .unwrap();
        assert_eq!(user.sim.coeffs.weights(), &[1.125, -0.0416666667]);
        let ls = parse_config_str(&format!("{MINIMAL}coeffs.m=4\ncoeffs.kind=space_ls\n"), Path::new(".")).unwrap();
        assert_eq!(ls.sim.coeffs.provenance, Provenance::SpaceDomainLs);
        assert!(parse_config_str(&format!("{MINIMAL}coeffs.m=4\n"), Path::new(".")).is_err());
        assert!(parse_config_str(&format!("{MINIMAL}coeffs.kind=magic\n"), Path::new(".")).is_err());
    }
}
