//! After the infinite fire, in coordinates moving with it, the process
//! restarts as the zero-delay process from an empty half-line.

use std::time::Instant;

use crate::engine::{simulate, simulate_sheared, EngineError, ModelConfig};
use crate::experiments::ensemble::{ExperimentError, Provenance, Runner, StatResult};
use crate::experiments::kappa::exact_config;
use crate::experiments::stats::{ks_one_sample, ks_two_sample};
use crate::rng::derive_seed;

/// Independent re-draws allowed for a replication without an infinite fire.
const MAX_RESAMPLES: u64 = 16;
/// Origin gaps per baseline run in the exponential check.
pub const GAPS_PER_RUN: u64 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSamples {
    pub inter_burn: Vec<f64>,
    pub cluster_sizes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    /// Two-sample KS of origin burn gaps, sheared against baseline.
    pub inter_burn: StatResult,
    /// Two-sample KS of cluster sizes within the window.
    pub clusters: StatResult,
    /// One-sample KS of baseline origin gaps against Exp(1).
    pub baseline_exponential: StatResult,
    /// Replications re-drawn because no infinite fire was found.
    pub resampled: u64,
    pub sheared: CouplingSamples,
    pub baseline: CouplingSamples,
}

/// Baseline process restricted to sites `0..=window_sites` over `[0, observe_for]`.
pub fn baseline_config(window_sites: u64, observe_for: f64) -> ModelConfig {
    let mut cfg = ModelConfig::baseline(observe_for, 0);
    cfg.site_limit = Some(window_sites);
    cfg
}

fn baseline_samples(cfg: &ModelConfig, seed: u64) -> Result<CouplingSamples, EngineError> {
    let run = simulate(&cfg.clone().with_seed(seed))?;
    let mut prev = 0.0;
    let inter_burn = run
        .fires
        .iter()
        .map(|f| {
            let gap = f.start_time - prev;
            prev = f.start_time;
            gap
        })
        .collect();
    let cluster_sizes = run.fires.iter().map(|f| (f.rightmost + 1) as f64).collect();
    Ok(CouplingSamples { inter_burn, cluster_sizes })
}

fn ks_result(name: &str, xs: &[f64], ys: &[f64], n: u64, provenance: Provenance) -> StatResult {
    let (d, p) = ks_two_sample(xs, ys);
    let mut r = StatResult::new(name, n, provenance);
    r.statistic = Some(d);
    r.p_value = Some(p);
    r.extra.insert("samples_left".into(), xs.len() as f64);
    r.extra.insert("samples_right".into(), ys.len() as f64);
    r
}

pub fn coupling_test(
    a: f64,
    n_runs: u64,
    observe_for: f64,
    window_sites: u64,
    runner: &Runner,
) -> Result<CouplingReport, ExperimentError> {
    if n_runs == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    let started = Instant::now();
    let delayed = exact_config(a);
    delayed.validate()?;
    let baseline = baseline_config(window_sites, observe_for);
    baseline.validate()?;

    let sheared = runner.replicate(n_runs, |_, seed| {
        for attempt in 0..=MAX_RESAMPLES {
            let s = if attempt == 0 { seed } else { derive_seed(seed, attempt) };
            match simulate_sheared(&delayed.clone().with_seed(s), a, window_sites, observe_for) {
                Ok(trace) => {
                    let samples = CouplingSamples {
                        inter_burn: trace.origin_inter_burn_times(),
                        cluster_sizes: trace.cluster_sizes().into_iter().map(|c| c as f64).collect(),
                    };
                    return Ok((samples, attempt));
                }
                Err(EngineError::NoInfiniteFire) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(EngineError::NoInfiniteFire)
    });
    // Baseline replications use seeds disjoint from the delayed ones.
    let base_runner = Runner { master_seed: derive_seed(runner.master_seed, u64::MAX), ..*runner };
    let direct = base_runner.replicate(n_runs, |_, seed| baseline_samples(&baseline, seed));

    let mut left = CouplingSamples { inter_burn: Vec::new(), cluster_sizes: Vec::new() };
    let mut resampled = 0;
    for s in sheared {
        let (samples, attempts) = s?;
        resampled += attempts;
        left.inter_burn.extend(samples.inter_burn);
        left.cluster_sizes.extend(samples.cluster_sizes);
    }
    let mut right = CouplingSamples { inter_burn: Vec::new(), cluster_sizes: Vec::new() };
    for s in direct {
        let samples = s?;
        right.inter_burn.extend(samples.inter_burn);
        right.cluster_sizes.extend(samples.cluster_sizes);
    }

    let provenance = Provenance::new(&(&delayed, &baseline, n_runs, observe_for, "coupling"), runner.master_seed);
    let mut inter_burn = ks_result("coupling_inter_burn", &left.inter_burn, &right.inter_burn, n_runs, provenance.clone());
    inter_burn.extra.insert("resampled".into(), resampled as f64);
    let clusters = ks_result("coupling_clusters", &left.cluster_sizes, &right.cluster_sizes, n_runs, provenance.clone());
    let mut counted = baseline.clone();
    counted.t_max = 1e9;
    counted.max_fires = Some(GAPS_PER_RUN);
    let gap_runner = Runner { master_seed: derive_seed(runner.master_seed, u64::MAX - 1), ..*runner };
    let mut gaps = Vec::new();
    for s in gap_runner.replicate(n_runs, |_, seed| baseline_samples(&counted, seed)) {
        gaps.extend(s?.inter_burn);
    }
    let (d, p) = ks_one_sample(&gaps, |x| -(-x.max(0.0)).exp_m1());
    let mut baseline_exponential = StatResult::new("baseline_exponential", n_runs, provenance);
    baseline_exponential.statistic = Some(d);
    baseline_exponential.p_value = Some(p);
    baseline_exponential.extra.insert("samples".into(), gaps.len() as f64);
    Ok(CouplingReport {
        inter_burn: inter_burn.timed(started),
        clusters: clusters.timed(started),
        baseline_exponential: baseline_exponential.timed(started),
        resampled,
        sheared: left,
        baseline: right,
    })
}
