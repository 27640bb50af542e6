//! Sparse sequence-to-sequence modeling at desk scale.
//!
//! - [`entmax`]: softmax, sparsemax, 1.5-entmax and bisection-based α-entmax.
//! - [`losses`]: Tsallis negentropies, Fenchel-Young losses, label smoothing.
//! - [`model`]: a small attention model trained by manual backpropagation.
//! - [`decoding`]: beam search, exact search and the empty-string audit.
//! - [`metrics`]: edit-distance metrics, support density and calibration.

pub mod decoding;
pub mod entmax;
pub mod error;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod tables;

pub use entmax::{transform, AlphaParam, LogitVector, SimplexDistribution};
pub use error::{Error, Result};
pub use losses::{SmoothingSpec, TargetDistribution};
