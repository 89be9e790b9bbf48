//! Staggered-grid finite-difference modeling of 2D elastic waves with balanced
//! (uniform long operator) and non-balanced (long operator paired with the
//! two-point difference) discretizations.
//!
//! - [`coeffs`]: operator weights (Taylor, least-squares fits, tabulated sets)
//! - [`dispersion`]: phase-velocity error and mixed-derivative error
//! - [`stability`]: Courant bounds and configuration checks
//! - [`model`]: grid, material and wavefield containers
//! - [`kernel`]: time stepping, sources, sponge boundary, simulation driver
//! - [`workbench`]: configuration files, model I/O, benchmarks, figure data

pub mod coeffs;
pub mod dispersion;
pub mod error;
pub mod fmt;
pub mod kernel;
pub mod model;
pub mod stability;
pub mod workbench;

pub use error::{Error, Result};
