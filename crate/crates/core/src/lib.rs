//! Simulation and verification toolkit for the one-dimensional forest-fire
//! process with spread delays and burn times.

pub mod analytics;
pub mod distributions;
pub mod engine;
pub mod experiments;
pub mod io;
pub mod rng;

pub use distributions::{DeltaSpec, DistSpec, SiteFamily};
pub use engine::{simulate, EngineError, ModelConfig, RunSummary};
pub use rng::RngPolicy;
