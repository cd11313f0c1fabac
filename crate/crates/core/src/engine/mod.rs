//! Event-driven simulation of the forest-fire process on the half-line.

pub mod config;
pub mod records;
pub mod shear;
pub mod sim;
pub mod window;

use thiserror::Error;

pub use config::{FrontierMode, ModelConfig, DEFAULT_SENTINEL, DEFAULT_SITE_CAP};
pub use records::{
    Arrow, Classification, Episode, FireRecord, HaltReason, MaximaRecord, RunSummary, SiteTimeline,
};
pub use shear::{simulate_sheared, ShearedTrace};
pub use sim::simulate;
pub use window::{influence_window, next_plant_time, Window};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("site cap exceeded: {sites} sites requested")]
    ResourceLimit { sites: u64 },
    #[error("no exactly classified infinite fire within the horizon")]
    NoInfiniteFire,
}
