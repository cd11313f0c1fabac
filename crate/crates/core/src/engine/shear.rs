//! The process seen from the infinite fire: `eta_hat_x(t) = eta_x(t + T + a x)`.

use serde::{Deserialize, Serialize};

use crate::engine::config::{FrontierMode, ModelConfig};
use crate::engine::records::{Classification, Episode, SiteTimeline};
use crate::engine::sim::simulate;
use crate::engine::EngineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShearedTrace {
    /// Start time `T` of the infinite fire.
    pub infinite_start: f64,
    /// Index of the infinite fire.
    pub fire: u64,
    pub shear_slope: f64,
    pub window_sites: u64,
    pub observe_for: f64,
    /// Sheared histories of sites `0..=window_sites`, from the infinite
    /// fire's visit onward.
    pub sites: Vec<SiteTimeline>,
}

impl ShearedTrace {
    /// Sheared ignition times at `site` of the fires after the infinite one.
    pub fn burn_times(&self, site: u64) -> Vec<f64> {
        self.sites[site as usize]
            .episodes
            .iter()
            .filter(|e| e.fire_id.is_some_and(|k| k > self.fire))
            .filter_map(|e| e.ignite_time)
            .filter(|&t| t <= self.observe_for)
            .collect()
    }

    /// Gaps between successive burns at the origin, starting from the
    /// infinite fire's own burn at sheared time 0.
    pub fn origin_inter_burn_times(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.burn_times(0)
            .into_iter()
            .map(|t| {
                let gap = t - prev;
                prev = t;
                gap
            })
            .collect()
    }

    /// Number of sites in `0..=window_sites` burnt by each later fire that
    /// starts within the observation span.
    pub fn cluster_sizes(&self) -> Vec<u64> {
        let starts = self.burn_times(0).len() as u64;
        let mut sizes = vec![0u64; starts as usize];
        for tl in &self.sites {
            for e in &tl.episodes {
                if let Some(k) = e.fire_id {
                    if k > self.fire && k - self.fire <= starts {
                        sizes[(k - self.fire - 1) as usize] += 1;
                    }
                }
            }
        }
        sizes
    }
}

fn shift(e: &Episode, by: f64) -> Episode {
    Episode {
        plant_time: e.plant_time - by,
        ignite_time: e.ignite_time.map(|t| t - by),
        extinguish_time: e.extinguish_time.map(|t| t - by),
        fire_id: e.fire_id,
    }
}

/// Locate the infinite fire of `config` and return the sheared histories of
/// sites `0..=window_sites` over sheared times `[0, observe_for]`.
///
/// `config.t_max` bounds the search for the infinite fire.
pub fn simulate_sheared(
    config: &ModelConfig,
    shear_slope: f64,
    window_sites: u64,
    observe_for: f64,
) -> Result<ShearedTrace, EngineError> {
    if config.exact_delay() != Some(shear_slope) {
        return Err(EngineError::Config("shear slope must equal the constant delay with zero burn time".into()));
    }
    if !(observe_for >= 0.0) {
        return Err(EngineError::Config(format!("observation span must be nonnegative, got {observe_for}")));
    }
    let mut search = config.clone();
    search.frontier_mode = FrontierMode::ExactClassify;
    search.stop_on_infinite = true;
    search.record_timelines = false;
    search.max_fires = None;
    let found = simulate(&search)?;
    let (Some(kappa), Some(start)) = (found.kappa, found.infinite_start) else {
        return Err(EngineError::NoInfiniteFire);
    };
    if found.fires[(kappa - 1) as usize].classification != Classification::InfiniteExact {
        return Err(EngineError::NoInfiniteFire);
    }

    let mut full = search;
    full.stop_on_infinite = false;
    full.record_timelines = true;
    full.t_max = start + shear_slope * window_sites as f64 + observe_for;
    let run = simulate(&full)?;

    let sites = (0..=window_sites)
        .map(|x| {
            let by = start + shear_slope * x as f64;
            let tl = &run.timelines[x as usize];
            let episodes = tl
                .episodes
                .iter()
                .filter(|e| e.fire_id.is_some_and(|k| k >= kappa) || (e.fire_id.is_none() && e.plant_time > by))
                .map(|e| shift(e, by))
                .filter(|e| e.plant_time <= observe_for)
                .collect();
            SiteTimeline { site: x, episodes }
        })
        .collect();
    Ok(ShearedTrace {
        infinite_start: start,
        fire: kappa,
        shear_slope,
        window_sites,
        observe_for,
        sites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{DeltaSpec, DistSpec};

    fn config(seed: u64) -> ModelConfig {
        let mut cfg = ModelConfig::new(DistSpec::Zero, DeltaSpec::constant(1.0), 1e6, seed);
        cfg.frontier_mode = FrontierMode::ExactClassify;
        cfg.site_sentinel = 2;
        cfg
    }

    #[test]
    fn infinite_fire_is_a_flat_front() {
        for seed in 0..20 {
            let trace = simulate_sheared(&config(seed), 1.0, 30, 5.0).unwrap();
            for tl in &trace.sites {
                let front = tl.episodes.iter().find(|e| e.fire_id == Some(trace.fire)).unwrap();
                assert!(front.ignite_time.unwrap().abs() < 1e-9);
                // The origin's tree appears and burns at the same instant.
                if tl.site > 0 {
                    assert_eq!(tl.eta(-1e-9), 1);
                }
                assert_eq!(tl.eta(1e-9), 0);
            }
        }
    }

    #[test]
    fn later_fires_stay_behind_the_front() {
        let trace = simulate_sheared(&config(11), 1.0, 40, 8.0).unwrap();
        let sizes = trace.cluster_sizes();
        assert_eq!(sizes.len(), trace.burn_times(0).len());
        assert!(sizes.iter().all(|&s| (1..=41).contains(&s)));
        // In the sheared frame every later fire burns its cluster at one instant.
        for (j, &size) in sizes.iter().enumerate() {
            let t0 = trace.burn_times(0)[j];
            for x in 0..size {
                assert!(trace.burn_times(x).iter().any(|&t| (t - t0).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn requires_matching_slope() {
        assert!(matches!(simulate_sheared(&config(1), 2.0, 5, 1.0), Err(EngineError::Config(_))));
    }

    #[test]
    fn short_search_reports_no_infinite_fire() {
        let mut cfg = config(1);
        cfg.t_max = 1e-6;
        assert_eq!(simulate_sheared(&cfg, 1.0, 5, 1.0), Err(EngineError::NoInfiniteFire));
    }
}
