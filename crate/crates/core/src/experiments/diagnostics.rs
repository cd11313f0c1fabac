//! Exploratory per-run sequences. Nothing here is tested against a claim.

use serde::{Deserialize, Serialize};

use crate::engine::RunSummary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaDiagnostic {
    pub i: u64,
    pub site: u64,
    /// `ln ln m_i`, defined for `m_i >= 2`.
    pub log_log_site: Option<f64>,
    /// `f_{m_i,2} / ln m_i` when the second burn was observed.
    pub second_burn_ratio: Option<f64>,
}

pub fn maxima_diagnostics(run: &RunSummary) -> Vec<MaximaDiagnostic> {
    run.maxima
        .iter()
        .map(|m| {
            let log_m = (m.site as f64).ln();
            MaximaDiagnostic {
                i: m.i,
                site: m.site,
                log_log_site: (m.site >= 2).then(|| log_m.ln()),
                second_burn_ratio: m.f_second.filter(|_| m.site >= 2).map(|f| f / log_m),
            }
        })
        .collect()
}

/// Number of distinct fires flagged infinite in one run.
pub fn boundary_classified_fires(run: &RunSummary) -> usize {
    run.boundary_classified()
}
