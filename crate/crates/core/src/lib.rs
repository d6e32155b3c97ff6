//! Phase vortices produced by three interfering monochromatic point sources.
//!
//! - [`wavefield`]: exact, far-field and plane-wave field synthesis on rasters.
//! - [`analytic`]: closed-form far-field vortex positions and trajectories.
//! - [`lattice`]: the `(m, n)` parameter-space ellipse and its lattice points.
//! - [`detector`]: winding-number detection and prediction matching.
//! - [`diffraction`]: Rayleigh-Sommerfeld point-pinhole propagation.
//! - [`cli`]: command-line front end and file writers.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod detector;
pub mod diffraction;
pub mod error;
pub mod lattice;
pub mod wavefield;

pub use analytic::{predict_all, predict_vortex, Branch, VortexPrediction};
pub use detector::{detect_vortices, match_vortices, DetectedVortex, MatchReport};
pub use diffraction::PinholeScreen;
pub use error::{Result, VortexError};
pub use lattice::{conic_from_arrangement, enumerate_lattice, ConicClass, EllipseDescriptor};
pub use wavefield::{sample_grid, FieldGrid, ModelTag, SourceArrangement, Window};
