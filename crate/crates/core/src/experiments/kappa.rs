//! Which fire is the first infinite one, and how far the first fire gets.

use std::time::Instant;

use crate::analytics::{m1_marginal_pmf, p_kappa1_quadrature};
use crate::distributions::{DeltaSpec, DistSpec};
use crate::engine::{Classification, FrontierMode, ModelConfig, RunSummary};
use crate::experiments::ensemble::{ExperimentError, Provenance, Runner, StatResult};
use crate::experiments::stats::{chi_square_gof, pool_bins, wilson_interval};

/// Highest explicit bin of the first-maximum histogram.
pub const M1_BINS: u64 = 15;

/// Zero burn time, constant delay `a`, exact classification at the first
/// step past the previous maximum.
pub fn exact_config(a: f64) -> ModelConfig {
    let mut cfg = ModelConfig::new(DistSpec::Zero, DeltaSpec::constant(a), 1e9, 0);
    cfg.frontier_mode = FrontierMode::ExactClassify;
    cfg.site_sentinel = 2;
    cfg.stop_on_infinite = true;
    cfg.record_timelines = false;
    cfg
}

pub(crate) fn reduce_kappa(runs: &[&RunSummary], provenance: Provenance) -> Result<StatResult, ExperimentError> {
    let kappas: Vec<u64> = runs.iter().filter_map(|r| r.kappa).collect();
    if kappas.is_empty() {
        return Err(ExperimentError::InsufficientData { needed: 1, got: 0 });
    }
    let n = kappas.len() as u64;
    let ones = kappas.iter().filter(|&&k| k == 1).count() as u64;
    let mut result = StatResult::new("p_kappa_1", runs.len() as u64, provenance);
    result.estimate = Some(ones as f64 / n as f64);
    result.interval = Some(wilson_interval(ones, n, 0.95)?);
    for depth in 1..=5u64 {
        let beyond = kappas.iter().filter(|&&k| k > depth).count() as u64;
        let (lo, hi) = wilson_interval(beyond, n, 0.95)?;
        result.extra.insert(format!("p_kappa_gt_{depth}"), beyond as f64 / n as f64);
        result.extra.insert(format!("p_kappa_gt_{depth}_lo"), lo);
        result.extra.insert(format!("p_kappa_gt_{depth}_hi"), hi);
    }
    result.extra.insert("undecided".into(), (runs.len() - kappas.len()) as f64);
    Ok(result)
}

/// Monte Carlo estimate of `P(kappa = 1)` and `P(kappa > n)` for `n <= 5`.
pub fn kappa_experiment(a: f64, n: u64, runner: &Runner) -> Result<StatResult, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    let started = Instant::now();
    let cfg = exact_config(a);
    cfg.validate()?;
    let runs = runner.simulate_all(&cfg, n).into_iter().collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&RunSummary> = runs.iter().collect();
    let mut result = reduce_kappa(&refs, Provenance::new(&(&cfg, n, "kappa"), runner.master_seed))?;
    result.extra.insert("quadrature".into(), p_kappa1_quadrature(a, 1e-8)?);
    Ok(result.timed(started))
}

/// The first maximum `m_1`, or `None` when the first fire is infinite.
pub fn first_maximum(run: &RunSummary) -> Option<u64> {
    let fire = run.fires.first()?;
    match fire.classification {
        Classification::Finite => Some(fire.rightmost),
        _ => None,
    }
}

/// Histogram of simulated `m_1` against its law with `nu_1` integrated out.
///
/// Bins are `0..=15`, the finite tail, and the infinite atom; sparse bins
/// are pooled before the chi-square test.
pub fn m1_law_experiment(a: f64, n: u64, runner: &Runner) -> Result<StatResult, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    let started = Instant::now();
    let mut cfg = exact_config(a);
    cfg.max_fires = Some(1);
    cfg.validate()?;
    let maxima = runner.replicate(n, |_, seed| crate::engine::simulate(&cfg.clone().with_seed(seed)).map(|r| first_maximum(&r)));
    let maxima = maxima.into_iter().collect::<Result<Vec<_>, _>>()?;

    let bins = M1_BINS as usize + 1;
    // Layout: infinite atom, 0..=15, finite tail.
    let mut observed = vec![0u64; bins + 2];
    for m in &maxima {
        match m {
            None => observed[0] += 1,
            Some(k) if (*k as usize) < bins => observed[*k as usize + 1] += 1,
            Some(_) => observed[bins + 1] += 1,
        }
    }
    let infinite = p_kappa1_quadrature(a, 1e-10)?;
    let mut pmf = vec![infinite];
    for k in 0..=M1_BINS {
        pmf.push(m1_marginal_pmf(a, k, 1e-13)?);
    }
    let head: f64 = pmf.iter().sum();
    pmf.push((1.0 - head).max(0.0));

    let (obs, probs) = pool_bins(&observed, &pmf, 5.0);
    let (stat, p) = chi_square_gof(&obs, &probs)?;
    let mut result = StatResult::new("m1_law", n, Provenance::new(&(&cfg, n, "m1"), runner.master_seed));
    result.statistic = Some(stat);
    result.p_value = Some(p);
    result.estimate = Some(observed[0] as f64 / n as f64);
    result.extra.insert("bins".into(), obs.len() as f64);
    Ok(result.timed(started))
}
