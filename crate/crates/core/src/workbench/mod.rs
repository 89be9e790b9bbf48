//! File formats and drivers around the numerical core.

pub mod bench;
pub mod cli;
pub mod config;
pub mod experiments;
pub mod figures;
pub mod manifest;
pub mod modelio;

pub use bench::{cmd_bench, BenchReport};
pub use config::{load_config, parse_config, parse_config_str, LoadedConfig};
pub use figures::cmd_figures;
pub use manifest::RunManifest;
pub use modelio::{load_model, write_model, ModelFile};
