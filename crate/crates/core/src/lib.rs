//! Group-invariant metrization of finitely presented topological spaces.
//!
//! Distances are built from chains of open covers with exact dyadic
//! arithmetic; every construction is re-verified against the inclusions and
//! identities it is meant to satisfy.

pub mod au;
pub mod cli;
pub mod cover;
pub mod document;
pub mod dyadic;
pub mod error;
pub mod examples;
pub mod gauge;
pub mod invariance;
pub mod pointset;
pub mod space;
pub mod tunnels;
pub mod verdict;

pub use dyadic::{Dist, Dyadic};
pub use error::{Error, Result};
pub use pointset::PointSet;
pub use verdict::{Status, Verdict, Witness};
