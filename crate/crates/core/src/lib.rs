//! Downlink coverage and rate analysis for cellular-V2X networks whose
//! vehicular nodes live on a Poisson line process of roads.
//!
//! The crate has two independent engines. [`analysis`] and [`load`] evaluate
//! the closed-form model by quadrature, and [`montecarlo`] simulates the
//! original network with per-node shadowing so the two can be compared.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod load;
pub mod montecarlo;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;

pub use channel::{equivalent_densities, EquivalentDensities, NetworkParams};
pub use error::{Error, Result};
