//! Configuration files, per-replication records and SVG export.

pub mod config;
pub mod records;
pub mod svg;

use thiserror::Error;

pub use config::{EnsembleSection, RunConfigFile, SCHEMA_VERSION};
pub use records::{
    round_sig, summary_csv, write_csv_records, write_jsonl, FireSummary, MaximumSummary, ResultRecord,
};
pub use svg::{render_svg, Scene, SceneArrow, Segment, SvgWindow};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema version {found}, expected {expected}")]
    Schema { found: u32, expected: u32 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("render window is empty: {0}")]
    EmptyWindow(String),
    #[error("run was recorded without timelines")]
    MissingTimelines,
}
