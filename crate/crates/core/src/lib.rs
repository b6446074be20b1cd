//! Distributed two-dimensional skyline computation in the coordinator model.
//!
//! A coordinator talks to `s` sites in synchronous rounds. Each protocol is
//! a [`coordsim::Coordinator`] plus a [`coordsim::Site`] implementation; the
//! engine in [`coordsim`] runs them and charges every message in words.

pub mod baselines;
pub mod coordsim;
pub mod datagen;
mod error;
pub mod experiment;
pub mod horizontal;
pub mod point;
pub mod quantiles;
pub mod vertical;

pub use coordsim::{CostReport, Outcome, Transcript};
pub use error::{Error, Result};
pub use point::{dominates, skyline, skyline_bruteforce, validate_distinct, Point, PointId, Skyline};
