//! Whether, and how early, some fire escapes to infinity.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analytics::continuation_product;
use crate::distributions::{DeltaSpec, DistSpec};
use crate::engine::{simulate, FrontierMode, ModelConfig, RunSummary};
use crate::experiments::ensemble::{ExperimentError, Provenance, Runner, StatResult};
use crate::experiments::stats::{two_proportion_greater, wilson_interval};

/// Some fire went `site_sentinel` sites past the previous maximum.
pub fn reached(run: &RunSummary) -> bool {
    run.kappa.is_some()
}

/// Start time of the first fire detected as infinite.
pub fn detection_start(run: &RunSummary) -> Option<f64> {
    run.infinite_start
}

fn proportion(name: &str, hits: u64, n: u64, provenance: Provenance) -> Result<StatResult, ExperimentError> {
    let mut r = StatResult::new(name, n, provenance);
    r.estimate = Some(hits as f64 / n as f64);
    r.interval = Some(wilson_interval(hits, n, 0.95)?);
    r.extra.insert("hits".into(), hits as f64);
    Ok(r)
}

pub(crate) fn reduce_reach(runs: &[&RunSummary], provenance: Provenance) -> Result<StatResult, ExperimentError> {
    if runs.is_empty() {
        return Err(ExperimentError::InsufficientData { needed: 1, got: 0 });
    }
    let hits = runs.iter().filter(|r| reached(r)).count() as u64;
    proportion("long_reach", hits, runs.len() as u64, provenance)
}

pub(crate) fn reduce_existence(runs: &[&RunSummary], horizon: f64, provenance: Provenance) -> Result<StatResult, ExperimentError> {
    if runs.is_empty() {
        return Err(ExperimentError::InsufficientData { needed: 1, got: 0 });
    }
    let hits = runs.iter().filter(|r| detection_start(r).is_some_and(|t| t <= horizon)).count() as u64;
    let mut r = proportion("infinite_fire_by_horizon", hits, runs.len() as u64, provenance)?;
    r.extra.insert("horizon".into(), horizon);
    Ok(r)
}

/// Zero burn time with `c / x` delays; a run "reaches" when a fire started
/// by `last_ignition` gets `reach` sites past the previous maximum.
pub fn reach_config(c: f64, reach: u64, last_ignition: f64) -> ModelConfig {
    let mut cfg = ModelConfig::new(DistSpec::Zero, DeltaSpec::c_over_x(c), 1e9, 0);
    cfg.last_ignition = Some(last_ignition);
    cfg.frontier_mode = FrontierMode::HeuristicSentinel;
    cfg.site_sentinel = reach;
    cfg.stop_on_infinite = true;
    cfg.record_timelines = false;
    cfg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub low: StatResult,
    pub high: StatResult,
    /// One-sided p-value of `P(reach | c_high) > P(reach | c_low)`.
    pub p_value: f64,
    /// `q_x` at `t = 1`, `x = 10` for each `c`.
    pub continuation_low: f64,
    pub continuation_high: f64,
}

pub fn dichotomy_experiment(
    c_low: f64,
    c_high: f64,
    n: u64,
    reach: u64,
    last_ignition: f64,
    runner: &Runner,
) -> Result<DichotomyReport, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    let started = Instant::now();
    let run_c = |c: f64, tag: u64| -> Result<StatResult, ExperimentError> {
        let cfg = reach_config(c, reach, last_ignition);
        cfg.validate()?;
        let sub = Runner { master_seed: runner.master_seed ^ tag, ..*runner };
        let runs = sub.simulate_all(&cfg, n).into_iter().collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&RunSummary> = runs.iter().collect();
        let mut r = reduce_reach(&refs, Provenance::new(&(&cfg, n, "reach"), sub.master_seed))?;
        r.extra.insert("c".into(), c);
        Ok(r.timed(started))
    };
    let low = run_c(c_low, 0x10)?;
    let high = run_c(c_high, 0x20)?;
    let hits = |r: &StatResult| r.extra["hits"] as u64;
    let p_value = two_proportion_greater(hits(&high), n, hits(&low), n)?;
    Ok(DichotomyReport {
        continuation_low: continuation_product(1.0, 10, &DeltaSpec::c_over_x(c_low), 1e-10)?.value(),
        continuation_high: continuation_product(1.0, 10, &DeltaSpec::c_over_x(c_high), 1e-10)?.value(),
        low,
        high,
        p_value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceReport {
    /// One proportion per horizon, in grid order.
    pub fractions: Vec<StatResult>,
    pub nondecreasing: bool,
}

/// Runs are followed until a fire is detected (or `t_max`); the fraction
/// at horizon `t` counts runs whose detected fire started by `t`.
pub fn existence_experiment(
    delta: DeltaSpec,
    theta: DistSpec,
    n: u64,
    t_grid: &[f64],
    sentinel: u64,
    t_max: f64,
    runner: &Runner,
) -> Result<ExistenceReport, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    let started = Instant::now();
    let mut cfg = ModelConfig::new(theta, delta, t_max, 0);
    cfg.frontier_mode = FrontierMode::HeuristicSentinel;
    cfg.site_sentinel = sentinel;
    cfg.stop_on_infinite = true;
    cfg.record_timelines = false;
    cfg.validate()?;
    let runs = runner
        .replicate(n, |_, seed| simulate(&cfg.clone().with_seed(seed)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&RunSummary> = runs.iter().collect();
    let provenance = Provenance::new(&(&cfg, n, t_grid, "existence"), runner.master_seed);
    let fractions = t_grid
        .iter()
        .map(|&t| reduce_existence(&refs, t, provenance.clone()).map(|r| r.timed(started)))
        .collect::<Result<Vec<_>, _>>()?;
    let nondecreasing = fractions.windows(2).all(|w| w[0].estimate <= w[1].estimate);
    Ok(ExistenceReport { fractions, nondecreasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_horizon_has_no_detections() {
        let r = existence_experiment(
            DeltaSpec::constant(1.0),
            DistSpec::Zero,
            20,
            &[0.0, 50.0],
            20,
            1e4,
            &Runner::new(2),
        )
        .unwrap();
        assert_eq!(r.fractions[0].estimate, Some(0.0));
        assert!(r.nondecreasing);
        assert!(r.fractions[1].estimate.unwrap() > 0.5);
    }

    #[test]
    fn analytic_dichotomy_values() {
        let report = dichotomy_experiment(1.0, 2.0, 10, 30, 3.0, &Runner::new(1)).unwrap();
        assert_eq!(report.continuation_low, 0.0);
        assert!(report.continuation_high > 0.0);
    }
}
