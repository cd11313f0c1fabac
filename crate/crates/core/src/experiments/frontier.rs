//! Behaviour of excursions past the running maximum without spread delay.

use std::time::Instant;

use crate::analytics::burn_ratio_stats;
use crate::distributions::DistSpec;
use crate::engine::{simulate, FrontierMode, ModelConfig, RunSummary};
use crate::experiments::ensemble::{ExperimentError, Provenance, Runner, StatResult};
use crate::experiments::stats::{chi_square_gof, pool_bins, wilson_interval};

/// Minimum number of maxima for the jump-law test.
pub const MIN_MAXIMA: usize = 200;
/// Explicit bins `1..=JUMP_BINS` of the jump-count histogram.
pub const JUMP_BINS: u64 = 20;

/// Zero delay with burn-time law `theta`. Fires may start until
/// `last_ignition` and are all followed to the end, so no excursion is cut
/// short by the horizon.
pub fn zero_delay_config(theta: DistSpec, last_ignition: f64) -> ModelConfig {
    let mut cfg = ModelConfig::new(theta, DistSpec::Zero.into(), 1e9, 0);
    cfg.frontier_mode = FrontierMode::HeuristicSentinel;
    cfg.last_ignition = Some(last_ignition);
    cfg.record_timelines = false;
    cfg
}

/// `P(N = n) = (1 - p) ^ (n - 1) p` with `p = e^{-theta}`.
pub fn geometric_pmf(theta: f64, n: u64) -> f64 {
    let p = (-theta).exp();
    (1.0 - p).powi(n as i32 - 1) * p
}

pub(crate) fn reduce_jumps(runs: &[&RunSummary], theta: f64, provenance: Provenance) -> Result<StatResult, ExperimentError> {
    let jumps: Vec<u64> = runs.iter().flat_map(|r| r.maxima.iter().map(|m| m.jumps)).collect();
    if jumps.len() < MIN_MAXIMA {
        return Err(ExperimentError::InsufficientData { needed: MIN_MAXIMA, got: jumps.len() });
    }
    let mut observed = vec![0u64; JUMP_BINS as usize + 1];
    for &j in &jumps {
        observed[(j.clamp(1, JUMP_BINS + 1) - 1) as usize] += 1;
    }
    let mut pmf: Vec<f64> = (1..=JUMP_BINS).map(|n| geometric_pmf(theta, n)).collect();
    pmf.push((1.0 - (-theta).exp()).powi(JUMP_BINS as i32));
    let (obs, probs) = pool_bins(&observed, &pmf, 5.0);
    let (stat, p) = chi_square_gof(&obs, &probs)?;
    let mut result = StatResult::new("jump_law", runs.len() as u64, provenance);
    result.statistic = Some(stat);
    result.p_value = Some(p);
    result.estimate = Some(observed[0] as f64 / jumps.len() as f64);
    result.extra.insert("maxima".into(), jumps.len() as f64);
    result.extra.insert("expected_single".into(), (-theta).exp());
    Ok(result)
}

/// Pooled jump counts of `n_runs` runs against `Geometric(e^{-theta})`.
pub fn jump_law_experiment(theta: f64, n_runs: u64, last_ignition: f64, runner: &Runner) -> Result<StatResult, ExperimentError> {
    if n_runs == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    if !(theta > 0.0) {
        return Err(ExperimentError::Config(format!("burn time must be positive, got {theta}")));
    }
    let started = Instant::now();
    let cfg = zero_delay_config(DistSpec::Constant { value: theta }, last_ignition);
    cfg.validate()?;
    let runs = runner.simulate_all(&cfg, n_runs).into_iter().collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&RunSummary> = runs.iter().collect();
    Ok(reduce_jumps(&refs, theta, Provenance::new(&(&cfg, n_runs, "jumps"), runner.master_seed))?.timed(started))
}

pub(crate) fn reduce_stop_rate(runs: &[&RunSummary], p_star: f64, provenance: Provenance) -> Result<StatResult, ExperimentError> {
    let stops: u64 = runs.iter().map(|r| r.maxima.len() as u64).sum();
    let attempts: u64 = runs.iter().flat_map(|r| r.maxima.iter().map(|m| m.jumps)).sum();
    if attempts == 0 {
        return Err(ExperimentError::InsufficientData { needed: 1, got: 0 });
    }
    let mut result = StatResult::new("stop_rate", runs.len() as u64, provenance);
    result.estimate = Some(stops as f64 / attempts as f64);
    result.interval = Some(wilson_interval(stops, attempts, 0.95)?);
    result.extra.insert("p_star".into(), p_star);
    result.extra.insert("frontier_events".into(), attempts as f64);
    Ok(result)
}

/// Each excursion meets empty sites one after another; it stops at one of
/// them with probability `E e^{-theta}`. Reports stops per empty-site
/// encounter.
pub fn stop_rate_experiment(theta: DistSpec, n_runs: u64, last_ignition: f64, runner: &Runner) -> Result<StatResult, ExperimentError> {
    if n_runs == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    let started = Instant::now();
    let cfg = zero_delay_config(theta, last_ignition);
    cfg.validate()?;
    let runs = runner.simulate_all(&cfg, n_runs).into_iter().collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&RunSummary> = runs.iter().collect();
    let provenance = Provenance::new(&(&cfg, n_runs, "stop_rate"), runner.master_seed);
    Ok(reduce_stop_rate(&refs, theta.laplace_at_one(), provenance)?.timed(started))
}

pub(crate) fn reduce_burn_ratio(
    runs: &[&RunSummary],
    site: u64,
    lo: f64,
    hi: f64,
    provenance: Provenance,
) -> Result<StatResult, ExperimentError> {
    let owned: Vec<RunSummary> = runs.iter().map(|&r| r.clone()).collect();
    let rows = burn_ratio_stats(&owned, &[site]);
    let row = rows.first().ok_or_else(|| ExperimentError::Config(format!("site {site} has no logarithm ratio")))?;
    if row.count == 0 {
        return Err(ExperimentError::InsufficientData { needed: 1, got: 0 });
    }
    let within = row.ratios.iter().filter(|&&r| lo < r && r < hi).count() as u64;
    let mut result = StatResult::new("burn_ratio", runs.len() as u64, provenance);
    result.estimate = Some(within as f64 / runs.len() as f64);
    result.interval = Some(wilson_interval(within, runs.len() as u64, 0.95)?);
    result.extra.insert("mean_ratio".into(), row.mean);
    result.extra.insert("q05".into(), row.q05);
    result.extra.insert("q50".into(), row.q50);
    result.extra.insert("q95".into(), row.q95);
    result.extra.insert("reached".into(), row.count as f64);
    Ok(result)
}

/// Fraction of runs in which `f_{n,1} / ln n` lies in `(lo, hi)`; each run
/// stops as soon as site `n` burns.
pub fn burn_ratio_experiment(
    theta: DistSpec,
    site: u64,
    n_runs: u64,
    bounds: (f64, f64),
    runner: &Runner,
) -> Result<StatResult, ExperimentError> {
    if n_runs == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    let started = Instant::now();
    let mut cfg = zero_delay_config(theta, 1e6);
    cfg.last_ignition = None;
    cfg.t_max = 1e6;
    cfg.halt_on_site = Some(site);
    cfg.validate()?;
    let runs = runner
        .replicate(n_runs, |_, seed| simulate(&cfg.clone().with_seed(seed)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&RunSummary> = runs.iter().collect();
    let provenance = Provenance::new(&(&cfg, n_runs, "burn_ratio"), runner.master_seed);
    Ok(reduce_burn_ratio(&refs, site, bounds.0, bounds.1, provenance)?.timed(started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_masses() {
        assert!((geometric_pmf(1.0, 1) - (-1f64).exp()).abs() < 1e-15);
        assert!((geometric_pmf(1.0, 1) - 0.367_879).abs() < 1e-6);
        let total: f64 = (1..400).map(|n| geometric_pmf(0.5, n)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_burn_time_means_single_stretches() {
        let cfg = zero_delay_config(DistSpec::Zero, 6.0);
        for seed in 0..30 {
            let run = simulate(&cfg.clone().with_seed(seed)).unwrap();
            assert!(run.maxima.iter().all(|m| m.jumps == 1));
        }
    }

    #[test]
    fn too_few_maxima() {
        let err = jump_law_experiment(1.0, 2, 2.0, &Runner::new(1)).unwrap_err();
        assert!(matches!(err, ExperimentError::InsufficientData { .. }));
    }
}
