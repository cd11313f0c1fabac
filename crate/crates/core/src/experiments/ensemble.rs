//! Replicated runs with per-replication seeds and reproducible aggregation.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::engine::{simulate, EngineError, ModelConfig, RunSummary};
use crate::experiments::stats::StatsError;
use crate::rng::derive_seed;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("ensemble has no replications")]
    EmptyEnsemble,
    #[error("insufficient data: {got} observations, {needed} needed")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

/// Which statistic an ensemble is reduced to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    /// `P(kappa = 1)` from the first infinite fire of each run.
    KappaEstimate,
    /// Pooled jump counts against the geometric law.
    JumpLaw,
    /// Fraction of frontier stops against `E e^{-theta}`.
    StopRate,
    /// Fraction of runs with `f_{n,1} / ln n` inside `(lo, hi)`.
    BurnRatio { site: u64, lo: f64, hi: f64 },
    /// Sheared origin burn gaps against the zero-delay process.
    CouplingTest { window_sites: u64, observe_for: f64 },
    /// Fraction of runs in which some fire reaches the sentinel.
    DichotomyCompare,
    /// Fraction of runs whose infinite fire starts by `horizon`.
    InfiniteFireExistence { horizon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub base: ModelConfig,
    pub replications: u64,
    /// Worker threads; `None` uses every available core.
    #[serde(default)]
    pub parallelism: Option<usize>,
    pub master_seed: u64,
    pub kind: ExperimentKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub master_seed: u64,
    pub code_version: String,
}

impl Provenance {
    pub fn new<T: Serialize>(config: &T, master_seed: u64) -> Self {
        let bytes = serde_json::to_vec(config).expect("configurations serialise");
        let digest = Sha256::digest(&bytes);
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Provenance { config_hash, master_seed, code_version: CODE_VERSION.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub name: String,
    pub estimate: Option<f64>,
    /// 95% Wilson interval for proportions.
    pub interval: Option<(f64, f64)>,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub replications: u64,
    pub wall_clock_secs: f64,
    pub provenance: Provenance,
    /// Secondary named quantities.
    #[serde(default)]
    pub extra: BTreeMap<String, f64>,
}

impl StatResult {
    pub fn new(name: &str, replications: u64, provenance: Provenance) -> Self {
        StatResult {
            name: name.to_string(),
            estimate: None,
            interval: None,
            statistic: None,
            p_value: None,
            replications,
            wall_clock_secs: 0.0,
            provenance,
            extra: BTreeMap::new(),
        }
    }

    pub fn covers(&self, value: f64) -> bool {
        self.interval.is_some_and(|(lo, hi)| lo <= value && value <= hi)
    }

    pub(crate) fn timed(mut self, since: Instant) -> Self {
        self.wall_clock_secs = since.elapsed().as_secs_f64();
        self
    }
}

/// Execution settings shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Runner {
    pub master_seed: u64,
    pub parallelism: Option<usize>,
}

impl Runner {
    pub fn new(master_seed: u64) -> Self {
        Runner { master_seed, parallelism: None }
    }

    pub fn with_parallelism(mut self, threads: usize) -> Self {
        self.parallelism = Some(threads);
        self
    }

    /// Evaluate `f(index, seed)` for every replication, in index order.
    pub fn replicate<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, u64) -> T + Sync + Send,
    {
        let master = self.master_seed;
        let work = || (0..n).into_par_iter().map(|i| f(i, derive_seed(master, i))).collect();
        match self.parallelism {
            None => work(),
            Some(threads) => rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .expect("thread pool")
                .install(work),
        }
    }

    /// Run `config` once per replication with derived seeds.
    pub fn simulate_all(&self, config: &ModelConfig, n: u64) -> Vec<Result<RunSummary, EngineError>> {
        self.replicate(n, |_, seed| simulate(&config.clone().with_seed(seed)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub replication: u64,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutcome {
    /// Successful runs with their replication index, in index order.
    pub runs: Vec<(u64, RunSummary)>,
    pub failures: Vec<FailureEntry>,
    pub result: StatResult,
}

/// Simulate every replication of `spec` and reduce the runs to its statistic.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleOutcome, ExperimentError> {
    use crate::experiments::{coupling, existence, frontier, kappa};

    if spec.replications == 0 {
        return Err(ExperimentError::EmptyEnsemble);
    }
    spec.base.validate()?;
    let started = Instant::now();
    let runner = Runner { master_seed: spec.master_seed, parallelism: spec.parallelism };
    let provenance = Provenance::new(spec, spec.master_seed);

    if let ExperimentKind::CouplingTest { window_sites, observe_for } = spec.kind {
        let a = spec
            .base
            .exact_delay()
            .ok_or_else(|| ExperimentError::Config("coupling needs zero burn time and constant delay".into()))?;
        let report = coupling::coupling_test(a, spec.replications, observe_for, window_sites, &runner)?;
        let mut result = report.inter_burn;
        result.provenance = provenance;
        return Ok(EnsembleOutcome { runs: Vec::new(), failures: Vec::new(), result: result.timed(started) });
    }

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    let outcomes = runner.replicate(spec.replications, |i, seed| (i, seed, simulate(&spec.base.clone().with_seed(seed))));
    for (i, seed, outcome) in outcomes {
        match outcome {
            Ok(run) => runs.push((i, run)),
            Err(e) => failures.push(FailureEntry { replication: i, seed, error: e.to_string() }),
        }
    }
    let summaries: Vec<&RunSummary> = runs.iter().map(|(_, r)| r).collect();
    let mut result = match spec.kind {
        ExperimentKind::KappaEstimate => kappa::reduce_kappa(&summaries, provenance.clone())?,
        ExperimentKind::JumpLaw => {
            let theta = spec
                .base
                .theta
                .as_constant()
                .ok_or_else(|| ExperimentError::Config("jump law needs a constant burn time".into()))?;
            frontier::reduce_jumps(&summaries, theta, provenance.clone())?
        }
        ExperimentKind::StopRate => {
            frontier::reduce_stop_rate(&summaries, spec.base.theta.laplace_at_one(), provenance.clone())?
        }
        ExperimentKind::BurnRatio { site, lo, hi } => frontier::reduce_burn_ratio(&summaries, site, lo, hi, provenance.clone())?,
        ExperimentKind::DichotomyCompare => existence::reduce_reach(&summaries, provenance.clone())?,
        ExperimentKind::InfiniteFireExistence { horizon } => {
            existence::reduce_existence(&summaries, horizon, provenance.clone())?
        }
        ExperimentKind::CouplingTest { .. } => unreachable!("handled above"),
    };
    result.replications = spec.replications;
    result.extra.insert("failures".into(), failures.len() as f64);
    Ok(EnsembleOutcome { runs, failures, result: result.timed(started) })
}
