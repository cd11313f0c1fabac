use serde::{Deserialize, Serialize};

use crate::distributions::{DeltaSpec, DistSpec};
use crate::engine::EngineError;

/// What to do when one fire has pushed `site_sentinel` sites past the
/// previous global maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrontierMode {
    /// Decide the fire's fate exactly from the continuation product.
    /// Requires zero burn time and a constant positive delay.
    ExactClassify,
    /// Declare the fire infinite.
    HeuristicSentinel,
    /// Flag the fire as undecided and stop it.
    TruncateAndFlag,
}

pub const DEFAULT_SENTINEL: u64 = 1000;
pub const DEFAULT_SITE_CAP: u64 = 1 << 22;

fn default_site_cap() -> u64 {
    DEFAULT_SITE_CAP
}

fn default_record() -> bool {
    true
}

/// Full parameterisation of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub theta: DistSpec,
    pub delta: DeltaSpec,
    pub t_max: f64,
    pub site_sentinel: u64,
    #[serde(default)]
    pub max_fires: Option<u64>,
    pub seed: u64,
    pub frontier_mode: FrontierMode,
    #[serde(default)]
    pub stop_on_infinite: bool,
    /// Restrict the lattice to `0..=site_limit`; fires reaching it stop there.
    #[serde(default)]
    pub site_limit: Option<u64>,
    /// No fire starts after this time; the run ends once the fires already
    /// started have burnt out.
    #[serde(default)]
    pub last_ignition: Option<f64>,
    /// End the run as soon as this site burns for the first time.
    #[serde(default)]
    pub halt_on_site: Option<u64>,
    /// Hard cap on instantiated sites; exceeding it is a resource error.
    #[serde(default = "default_site_cap")]
    pub max_sites: u64,
    /// Keep per-site episode histories and spread arrows in the summary.
    #[serde(default = "default_record")]
    pub record_timelines: bool,
}

impl ModelConfig {
    pub fn new(theta: DistSpec, delta: DeltaSpec, t_max: f64, seed: u64) -> Self {
        Self {
            theta,
            delta,
            t_max,
            site_sentinel: DEFAULT_SENTINEL,
            max_fires: None,
            seed,
            frontier_mode: FrontierMode::HeuristicSentinel,
            stop_on_infinite: false,
            site_limit: None,
            last_ignition: None,
            halt_on_site: None,
            max_sites: DEFAULT_SITE_CAP,
            record_timelines: true,
        }
    }

    /// The zero-delay, zero-burn-time process.
    pub fn baseline(t_max: f64, seed: u64) -> Self {
        Self::new(DistSpec::Zero, DistSpec::Zero.into(), t_max, seed)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The constant delay if exact classification can be used.
    pub fn exact_delay(&self) -> Option<f64> {
        match self.delta.as_constant() {
            Some(a) if a > 0.0 && self.theta.is_zero() => Some(a),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |msg: String| Err(EngineError::Config(msg));
        if !(self.t_max > 0.0) || self.t_max.is_nan() {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.site_sentinel < 2 {
            return bad(format!("site_sentinel must be at least 2, got {}", self.site_sentinel));
        }
        if self.last_ignition.is_some_and(|t| !(t >= 0.0)) {
            return bad("last_ignition must be nonnegative".into());
        }
        if self.max_fires == Some(0) {
            return bad("max_fires must be positive".into());
        }
        self.theta.validate().map_err(|e| EngineError::Config(format!("theta: {e}")))?;
        self.delta.validate().map_err(|e| EngineError::Config(format!("delta: {e}")))?;
        if self.frontier_mode == FrontierMode::ExactClassify && self.exact_delay().is_none() {
            return bad("exact classification needs theta == 0 and a constant positive delay".into());
        }
        if self.max_sites < 2 {
            return bad("max_sites must be at least 2".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_mode_requires_zero_burn_time() {
        let mut cfg = ModelConfig::new(DistSpec::Constant { value: 1.0 }, DeltaSpec::constant(1.0), 10.0, 1);
        cfg.frontier_mode = FrontierMode::ExactClassify;
        assert!(matches!(cfg.validate(), Err(EngineError::Config(_))));
        cfg.theta = DistSpec::Zero;
        assert!(cfg.validate().is_ok());
        cfg.delta = DeltaSpec::c_over_x(2.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn horizon_and_sentinel_bounds() {
        let mut cfg = ModelConfig::baseline(0.0, 1);
        assert!(cfg.validate().is_err());
        cfg.t_max = 1.0;
        assert!(cfg.validate().is_ok());
        cfg.site_sentinel = 1;
        assert!(cfg.validate().is_err());
    }
}
