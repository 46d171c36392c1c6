//! Configuration, scenario presets, file formats and command-line front end
//! for the constrained geodesic solver in [`cuot_core`].
//!
//! - [`config`]: the TOML problem document.
//! - [`scenario`]: expansion of a document into a [`cuot_core::ProblemSpec`].
//! - [`presets`]: built-in scenario documents.
//! - [`raster`], [`schedule`]: input array and time-series formats.
//! - [`export`]: run directories (arrays, summary, diagnostics).
//! - [`run`]: solving on a rayon pool.

pub mod assets;
pub mod config;
pub mod error;
pub mod executor;
pub mod export;
pub mod expr;
pub mod metrics;
pub mod presets;
pub mod raster;
pub mod run;
pub mod scenario;
pub mod schedule;

pub use config::ConfigDoc;
pub use error::{Error, Result};
pub use executor::RayonExecutor;
pub use scenario::{build, Files, Scenario};
