//! Ratio-cut polytope machinery and convex relaxations of K-means clustering.
//!
//! The crate is organized around the ratio-cut encoding of a clustering: a
//! partition of `n` points into clusters maps to a vector over point pairs
//! with entry `1/|cluster|` for pairs inside a cluster and `0` across
//! clusters. On top of that encoding it provides:
//!
//! * [`core`] — shared types (point sets, distance matrices, partitions,
//!   ratio-cut vectors) and pair indexing.
//! * [`polytope`] — exact rational study of the ratio-cut polytope and its
//!   polyhedral relaxation: inequality generation, validity and facetness
//!   checks, vertex enumeration and the equality counterexample.
//! * [`lp`] — a cutting-plane LP relaxation over generalized triangle
//!   inequalities with a dense simplex backend, plus the weaker baseline LP.
//! * [`sdp`] — the trace/row-stochastic/PSD/nonnegative relaxation solved by
//!   operator splitting.
//! * [`certificate`] — deterministic optimality condition and explicit dual
//!   certificates for the two-cluster LP.
//! * [`oracle`] — exhaustive K-means and Lloyd's heuristic as ground truth.
//! * [`sbm`] — stochastic ball model instance generation.
//! * [`continuum`] — quadrature checks of the continuum split-cost function
//!   and the geometric recovery threshold.
//! * [`sweep`] — recovery/tightness experiment driver with CSV/SVG output.

pub mod certificate;
pub mod continuum;
pub mod core;
mod error;
pub mod lp;
pub mod oracle;
pub mod polytope;
pub mod sbm;
pub mod sdp;
pub mod sweep;

pub use error::{Error, Result};
