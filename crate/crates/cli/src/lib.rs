//! Manifest-driven frontend for the `homlat` solver: parsing, run
//! execution and file outputs. The `homlat` binary is a thin wrapper.

// Positivity checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod manifest;
pub mod output;
pub mod run;
pub mod selftest;

pub use error::{CliError, Result};
pub use manifest::{parse_manifest, parse_manifest_str, Geometry, HeatmapField, RunManifest, SweepGrid};
pub use output::emit_heatmap;
pub use run::{run_effective, run_solve, run_sweep};
