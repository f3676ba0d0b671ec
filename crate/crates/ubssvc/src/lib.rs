//! Everything around the `ubssvc-core` algorithms that touches the outside
//! world: PGM and raw-planar frame I/O, the `UBSS` container, key-value
//! configuration files, seeded synthetic sequences, external-codec
//! benchmarking and report formatting.

pub mod bench;
pub mod config;
mod error;
pub mod report;
pub mod synth;
pub mod vio;

pub use error::{Error, Result};
