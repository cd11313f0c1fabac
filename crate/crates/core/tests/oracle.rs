mod common;

use common::{baseline_mismatch, brute_baseline, engine_baseline, propagate_zero_delay, SITES};
use zfire_core::engine::ModelConfig;
use zfire_core::{simulate, DeltaSpec, DistSpec, RunSummary};

#[test]
fn baseline_matches_brute_force_stepper() {
    for seed in 0..1000 {
        let t_max = 1.0 + (seed % 10) as f64;
        let run = engine_baseline(seed, t_max);
        let brute = brute_baseline(seed, SITES as usize, t_max);
        assert_eq!(baseline_mismatch(&run, &brute), None, "seed {seed}");
    }
}

#[test]
fn cluster_rule_at_fire_times() {
    // n_k is the end of the occupied run from site 1 just before the fire.
    for seed in 0..200 {
        let run = engine_baseline(seed, 10.0);
        for f in &run.fires {
            let t = f.start_time - 1e-12;
            let occupied = |x: u64| run.timelines.get(x as usize).is_some_and(|tl| tl.eta(t) == 1);
            let n = (1..SITES).take_while(|&x| occupied(x)).last().unwrap_or(0);
            assert_eq!(f.rightmost, n, "seed {seed} fire {}", f.k);
        }
    }
}

fn engine_ignitions(run: &RunSummary, sites: usize) -> Vec<Vec<f64>> {
    (0..sites)
        .map(|x| run.timelines.get(x).map(|tl| tl.ignitions().map(|(t, _)| t).collect()).unwrap_or_default())
        .collect()
}

#[test]
fn zero_delay_matches_site_recursion() {
    let laws = [DistSpec::Constant { value: 1.0 }, DistSpec::Exponential { rate: 1.0 }, DistSpec::Uniform { lo: 0.0, hi: 0.3 }];
    for theta in laws {
        for seed in 0..200 {
            let t_max = 12.0;
            let run = simulate(&ModelConfig::new(theta, DeltaSpec::constant(0.0), t_max, seed)).unwrap();
            let sites = run.timelines.len() + 1;
            let oracle = propagate_zero_delay(seed, theta, sites, t_max);
            let engine = engine_ignitions(&run, sites);
            assert_eq!(engine, oracle, "{theta:?} seed {seed}");
            for (x, burns) in oracle.iter().enumerate() {
                assert_eq!(run.first_burn_time(x as u64), burns.first().copied());
            }
        }
    }
}
