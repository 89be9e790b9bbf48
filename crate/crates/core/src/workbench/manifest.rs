use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fmt::sig9;

/// Record of one subcommand invocation, written as `manifest.txt` next to its outputs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Hex SHA-256 of the resolved configuration, when there is one.
    pub digest: Option<String>,
    /// `(path, kind)`; paths are relative to the output directory.
    pub outputs: Vec<(PathBuf, String)>,
    /// Wall-clock seconds per phase.
    pub timings: Vec<(String, f64)>,
    pub counters: Vec<(String, u64)>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn output(&mut self, path: impl Into<PathBuf>, kind: &str) {
        self.outputs.push((path.into(), kind.into()));
    }

    pub fn timing(&mut self, phase: &str, seconds: f64) {
        self.timings.push((phase.into(), seconds));
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("command={}\n", self.command);
        if let Some(d) = &self.digest {
            out.push_str(&format!("config_sha256={d}\n"));
        }
        for (p, kind) in &self.outputs {
            out.push_str(&format!("output={} kind={kind}\n", p.display()));
        }
        for (phase, s) in &self.timings {
            out.push_str(&format!("timing.{phase}={}\n", sig9(*s)));
        }
        for (name, v) in &self.counters {
            out.push_str(&format!("counter.{name}={v}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note={n}\n"));
        }
        out
    }

    /// Checks every declared output exists, then writes `manifest.txt`.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        for (p, _) in &self.outputs {
            let full = out_dir.join(p);
            if !full.exists() {
                return Err(Error::Config(format!(
                    "declared output {} was not written",
                    full.display()
                )));
            }
        }
        let path = out_dir.join("manifest.txt");
        std::fs::write(&path, self.to_text()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_output_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("run");
        m.output("a.csv", "seismogram");
        assert!(m.write(dir.path()).is_err());
        std::fs::write(dir.path().join("a.csv"), "x").unwrap();
        m.digest = Some("ab".into());
        m.timing("steps", 1.5);
        let text = std::fs::read_to_string(m.write(dir.path()).unwrap()).unwrap();
        assert_eq!(
            text,
            "command=run\nconfig_sha256=ab\noutput=a.csv kind=seismogram\ntiming.steps=1.5\n"
        );
    }
}
