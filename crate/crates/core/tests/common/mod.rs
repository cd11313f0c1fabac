//! Independent re-implementations used as oracles by the integration tests.
//!
//! Both share only the keyed random draws with the engine; the dynamics are
//! recomputed from scratch without an event queue.

#![allow(dead_code)]

use zfire_core::engine::{Classification, ModelConfig};
use zfire_core::rng::{Purpose, RngPolicy};
use zfire_core::{simulate, DistSpec, RunSummary};

/// A tree planted at `plant` and ignited at `ignite`, if it was.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tree {
    pub plant: f64,
    pub ignite: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteRun {
    /// `(start time, rightmost site)` per fire.
    pub fires: Vec<(f64, u64)>,
    pub trees: Vec<Vec<Tree>>,
}

/// The zero-delay, zero-burn-time process on sites `0..sites`, stepped from
/// one growth event to the next until `t_max`.
pub fn brute_baseline(seed: u64, sites: usize, t_max: f64) -> BruteRun {
    let rng = RngPolicy::new(seed);
    let mut next = (0..sites).map(|x| rng.exp1(x as u64, Purpose::Growth, 0)).collect::<Vec<_>>();
    let mut occurrence = vec![1u64; sites];
    let mut occupied = vec![false; sites];
    let mut trees = vec![Vec::new(); sites];
    let mut fires = Vec::new();
    loop {
        let (x, t) = (0..sites)
            .filter(|&x| !occupied[x])
            .map(|x| (x, next[x]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("site 0 is never occupied between events");
        if t > t_max {
            break;
        }
        trees[x].push(Tree { plant: t, ignite: None });
        if x > 0 {
            occupied[x] = true;
            continue;
        }
        let mut n = 0;
        while n + 1 < sites && occupied[n + 1] {
            n += 1;
        }
        for y in 0..=n {
            occupied[y] = false;
            trees[y].last_mut().unwrap().ignite = Some(t);
            next[y] = t + rng.exp1(y as u64, Purpose::Growth, occurrence[y]);
            occurrence[y] += 1;
        }
        fires.push((t, n as u64));
    }
    BruteRun { fires, trees }
}

/// Ignition times per site for zero spread delay and burn law `theta`,
/// computed site by site from the left: every tree at `x + 1` burns at the
/// first instant, at or after it appears, at which site `x` is burning,
/// and each burn at `x` ignites `x + 1` at most once.
pub fn propagate_zero_delay(seed: u64, theta: DistSpec, sites: usize, t_max: f64) -> Vec<Vec<f64>> {
    let rng = RngPolicy::new(seed);
    let mut ignitions: Vec<Vec<f64>> = Vec::with_capacity(sites);
    let mut left: Vec<(f64, f64)> = Vec::new();
    for x in 0..sites as u64 {
        let mut burns = Vec::new();
        let mut intervals = Vec::new();
        let mut plant = rng.exp1(x, Purpose::Growth, 0);
        let mut occurrence = 1;
        let mut cursor = 0;
        while plant <= t_max {
            let ignite = if x == 0 {
                Some(plant)
            } else {
                while cursor < left.len() && left[cursor].1 < plant {
                    cursor += 1;
                }
                let hit = left.get(cursor).map(|&(a, _)| a.max(plant));
                cursor += 1;
                hit
            };
            let Some(t) = ignite.filter(|&t| t <= t_max) else { break };
            let burn = theta.sample(x, Purpose::Theta, burns.len() as u64, &rng);
            burns.push(t);
            intervals.push((t, t + burn));
            plant = t + burn + rng.exp1(x, Purpose::Growth, occurrence);
            occurrence += 1;
        }
        ignitions.push(burns);
        left = intervals;
    }
    ignitions
}

pub const SITES: u64 = 20;

pub fn engine_baseline(seed: u64, t_max: f64) -> RunSummary {
    let mut cfg = ModelConfig::baseline(t_max, seed);
    cfg.site_limit = Some(SITES - 1);
    simulate(&cfg).unwrap()
}

/// First difference between the engine run and the brute-force run.
pub fn baseline_mismatch(run: &RunSummary, brute: &BruteRun) -> Option<String> {
    let fires: Vec<(f64, u64)> = run.fires.iter().map(|f| (f.start_time, f.rightmost)).collect();
    if fires != brute.fires {
        return Some(format!("fires differ: {fires:?} vs {:?}", brute.fires));
    }
    if run.fires.iter().any(|f| f.duration() != Some(0.0) && f.classification == Classification::Finite) {
        return Some("a finished fire took time".into());
    }
    for x in 0..SITES as usize {
        let engine: Vec<Tree> = run
            .timelines
            .get(x)
            .map(|tl| tl.episodes.iter().map(|e| Tree { plant: e.plant_time, ignite: e.ignite_time }).collect())
            .unwrap_or_default();
        let burnt = |trees: &[Tree]| trees.iter().filter_map(|t| t.ignite).collect::<Vec<_>>();
        if x < run.timelines.len() {
            if engine != brute.trees[x] {
                return Some(format!("site {x}: {engine:?} vs {:?}", brute.trees[x]));
            }
        } else if !burnt(&brute.trees[x]).is_empty() {
            return Some(format!("site {x} burns in the oracle but was never reached"));
        }
    }
    None
}
