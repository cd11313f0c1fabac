use serde::{Deserialize, Serialize};

use crate::engine::records::RunSummary;

/// Empirical law of `f_{n,1} / ln n` at one site across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurnRatioRow {
    pub site: u64,
    /// Runs in which the site burnt at least once.
    pub count: usize,
    pub mean: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    #[serde(skip)]
    pub ratios: Vec<f64>,
}

impl BurnRatioRow {
    pub fn fraction_within(&self, lo: f64, hi: f64) -> f64 {
        if self.ratios.is_empty() {
            return f64::NAN;
        }
        self.ratios.iter().filter(|&&r| lo < r && r < hi).count() as f64 / self.ratios.len() as f64
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// One row per site of `site_grid` with `n >= 2`.
pub fn burn_ratio_stats(runs: &[RunSummary], site_grid: &[u64]) -> Vec<BurnRatioRow> {
    site_grid
        .iter()
        .filter(|&&n| n > 1)
        .map(|&n| {
            let log_n = (n as f64).ln();
            let mut ratios: Vec<f64> = runs.iter().filter_map(|r| r.first_burn_time(n)).map(|f| f / log_n).collect();
            let count = ratios.len();
            let mean = if count == 0 { f64::NAN } else { ratios.iter().sum::<f64>() / count as f64 };
            let mut sorted = ratios.clone();
            sorted.sort_by(f64::total_cmp);
            
            BurnRatioRow {
                site: n,
                count,
                mean,
                q05: quantile(&sorted, 0.05),
                q50: quantile(&sorted, 0.5),
                q95: quantile(&sorted, 0.95),
                ratios: std::mem::take(&mut ratios),
            }
        })
        .collect()
}
