//! Mid-infrared frequency-comb simulation: an Er-fiber pump, a red-shifted
//! continuum, difference-frequency generation in GaSe, and FTIR or dual-comb
//! read-out with a detector noise budget.
//!
//! The `mircomb` binary drives everything from a TOML file; see [`cli`].

// Validation uses `!(x > 0.0)` on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod comb;
pub mod crystal;
pub mod error;
mod fourier;
pub mod pipeline;
pub mod propagation;
pub mod pulse;
pub mod spectral;
pub mod spectrometer;

pub use error::{Error, Result};
