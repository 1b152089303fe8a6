//! Tied-rank aware analysis of Mean Opinion Scores.
//!
//! Distinct MOS values are rarely distinguishable when they fall within
//! each other's 95% confidence intervals, yet rank statistics treat every
//! numeric difference as an ordering. This crate
//!
//! * groups CI-indistinguishable conditions and replaces their MOS with a
//!   shared value ([`transform`]),
//! * provides fractional ranking, Spearman's coefficient and closed-form
//!   error terms for unrecognised ties ([`stats`]),
//! * runs a seeded Monte Carlo study of Spearman's coefficient under
//!   Gaussian MOS noise ([`simulation`]),
//! * reads and writes dataset files and drives the `mos-ties` CLI.

pub mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod simulation;
pub mod stats;
pub mod transform;

pub use error::{Error, Result};
pub use stats::{Dataset, MosEstimate, Scale};
