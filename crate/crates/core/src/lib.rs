//! Inference-time alignment on finite prompt/response problems.
//!
//! The crate provides tabular problem instances and lower-bound fixtures, a
//! seeded sample-and-evaluate oracle, best-of-N and pessimistic rejection
//! samplers, exact output laws for each sampler, coverage and divergence
//! measures, experiment drivers, and a CLI.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod divergences;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod instances;
pub mod io;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
