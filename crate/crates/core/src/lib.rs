//! Monte Carlo study of outcome delay in blinded sample size re-estimation
//! (SSR) designs for two-arm trials.
//!
//! The crate simulates internal-pilot SSR trials with continuous or binary
//! endpoints, models pipeline participants accrued while outcomes are
//! awaited, and aggregates efficiency metrics (delay impact, MSE/RMSE, cost)
//! over scenario grids. The `harness` module drives deterministic parallel
//! runs and emits CSV/JSON results; the `ssr-delay` binary exposes it all as
//! a CLI.

// Domain checks are written as negated comparisons so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod engine;
mod error;
pub mod harness;
pub mod metrics;
pub mod recruitment;
pub mod statdist;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
