//! Online thinning of paired random samples.
//!
//! Two i.i.d. samples of size `n` from the same distribution on `R^d`
//! typically disagree by `O(sqrt(n))` points on some anchored box. This
//! crate implements an online procedure that discards a small fraction of
//! both samples so that the remaining two-sample discrepancy drops to
//! polylogarithmic size, together with the machinery it is built from:
//!
//! - [`cdf`]: randomized integral transform reducing arbitrary marginals
//!   to uniform marginals on `[0,1]`.
//! - [`dyadic`]: dyadic interval/box indexing of the unit cube and the
//!   sparse indicator encoding of points.
//! - [`walk`]: the cube-confined random walk that makes the online
//!   keep/discard decisions.
//! - [`pipeline`]: the full two-sample flow (transform, interleave,
//!   encode, walk) producing thinned sub-samples and a report.
//! - [`balance`]: online sign assignment for sparse vector streams built
//!   from parallel rounds of cube walks.
//! - [`oracle`]: exact discrepancy computations (two-sample, prefix sign,
//!   dyadic/lattice suprema, slice counts, star discrepancy) used to
//!   verify every bound the other modules promise.

pub mod balance;
pub mod cdf;
pub mod dyadic;
mod error;
pub mod oracle;
pub mod pipeline;
pub mod seed;
pub mod sparse;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};

/// A point of `R^d`, stored as its `d` coordinates.
pub type Point = Vec<f64>;
