//! IO companion to `shiftdeconv-core`: file formats, run manifests, and the
//! command implementations behind the `shiftdeconv` binary.
//!
//! Formats are deliberately minimal and text-first so results round-trip
//! across tools and languages: signals travel as a tiny CSV dialect with an
//! offset header, rasters as binary PGM/PPM with maxval 255, and every
//! artifact is accompanied by a `.manifest` recording the exact command,
//! input digests and parameters that produced it.

pub mod args;
pub mod commands;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod netpbm;

pub use error::CliError;
