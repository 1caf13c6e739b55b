//! Desk-scale models of idempotent measures over the max-plus and max-times
//! semirings: scalar arithmetic and the `ln`/`exp` bridge, finitely-supported
//! measures with their evaluation functionals, tropical polytopes and convex
//! combinations, barycenter maps with their structural identities, and a
//! numerical openness probe for piecewise tropical-linear maps with
//! certified non-openness witnesses.

pub mod barycenter;
pub mod convexity;
pub mod error;
pub mod measures;
pub mod probe;
pub mod report;
pub mod semiring;

pub use error::{Error, Result};
pub use report::CheckReport;

/// Default absolute tolerance for floating comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
