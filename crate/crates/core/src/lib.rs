//! Reverse-auction resource market simulator.
//!
//! Vendors bid to serve dynamically arriving buyer requests. The crate
//! implements MPRA, which labels bidders by recent losses, scores them on
//! several buyer preferences with simple additive weighting and picks a
//! winner among the most deprived bidders, alongside two price-only
//! baselines, a deterministic discrete-event engine and the metrics used to
//! compare them.

pub mod cli;
pub mod engine;
pub mod error;
pub mod history;
pub mod market;
pub mod metrics;
pub mod priority;
pub mod saw;
pub mod strategy;
pub mod winner;

pub use error::{Error, Result};
