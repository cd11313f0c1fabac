//! Closed forms, certified numerics and post-processing of runs.

pub mod burn_ratio;
pub mod classify;
pub mod continuation;
pub mod kappa;
pub mod maxima;
pub mod product;
pub mod quadrature;

use thiserror::Error;

pub use burn_ratio::{burn_ratio_stats, BurnRatioRow};
pub use classify::{frontier_classify, FrontierOutcome, FrontierQuery};
pub use continuation::continuation_product;
pub use kappa::{m1_infinite_mass, m1_marginal_pmf, m1_pmf, p_kappa1_bounds, p_kappa1_quadrature, KappaBounds};
pub use maxima::extract_maxima;
pub use product::ProductBound;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("run was recorded without timelines")]
    MissingTimelines,
}
