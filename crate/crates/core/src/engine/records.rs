use serde::{Deserialize, Serialize};

/// One tree's life at a site: planted, possibly ignited, then burnt out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub plant_time: f64,
    pub ignite_time: Option<f64>,
    pub extinguish_time: Option<f64>,
    pub fire_id: Option<u64>,
}

impl Episode {
    /// Occupied (green or red) at time `t`; right-continuous.
    pub fn occupies(&self, t: f64) -> bool {
        t >= self.plant_time && self.extinguish_time.is_none_or(|end| t < end)
    }

    pub fn burning_at(&self, t: f64) -> bool {
        match (self.ignite_time, self.extinguish_time) {
            (Some(a), Some(b)) => a <= t && t < b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteTimeline {
    pub site: u64,
    pub episodes: Vec<Episode>,
}

impl SiteTimeline {
    /// The state `eta_x(t)`, 1 if a tree (burning or not) stands at the site.
    ///
    /// A tree burning with zero burn time is gone at its ignition instant.
    pub fn eta(&self, t: f64) -> u8 {
        u8::from(self.episodes.iter().any(|e| e.occupies(t)))
    }

    pub fn ignitions(&self) -> impl Iterator<Item = (f64, u64)> + '_ {
        self.episodes
            .iter()
            .filter_map(|e| Some((e.ignite_time?, e.fire_id?)))
    }
}

/// A spread attempt from `from_site` to `from_site + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrow {
    pub fire: u64,
    pub from_site: u64,
    /// Ignition time of the source.
    pub source_ignite: f64,
    pub delay: f64,
    pub window_start: f64,
    pub window_end: f64,
    /// Ignition time of the target when the attempt succeeded.
    pub target_ignite: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Finite,
    InfiniteExact,
    InfiniteHeuristic,
    TruncatedUnknown,
}

impl Classification {
    pub fn is_infinite(self) -> bool {
        matches!(self, Classification::InfiniteExact | Classification::InfiniteHeuristic)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FireRecord {
    /// Fire index, starting at 1.
    pub k: u64,
    pub start_time: f64,
    /// Furthest site burnt within the run.
    pub rightmost: u64,
    /// Last extinguish time among the fire's sites; `None` if the fire had
    /// not finished when the run ended or never finishes.
    pub end_time: Option<f64>,
    pub classification: Classification,
    /// Number of simultaneously-burnt stretches past the previous maximum.
    pub jump_count: u64,
    /// Time the fire was classified at the sentinel, if it was.
    #[serde(default)]
    pub classified_at: Option<f64>,
}

impl FireRecord {
    pub fn duration(&self) -> Option<f64> {
        self.end_time.map(|e| e - self.start_time)
    }

    /// `n_k`, or `None` for an unbounded fire.
    pub fn extent(&self) -> Option<u64> {
        if self.classification.is_infinite() {
            None
        } else {
            Some(self.rightmost)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaRecord {
    /// Index of the maximum, starting at 1.
    pub i: u64,
    pub site: u64,
    /// Index of the fire that achieved it.
    pub fire_index: u64,
    pub f_first: f64,
    /// Second burn time of the site, `None` if it did not happen in the run.
    pub f_second: Option<f64>,
    pub stretch_lengths: Vec<u64>,
    pub jumps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    Horizon,
    MaxFires,
    /// Ignitions closed and every started fire burnt out.
    IgnitionsClosed,
    InfiniteFire,
    SiteReached,
}

/// Everything observed in one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub fires: Vec<FireRecord>,
    pub maxima: Vec<MaximaRecord>,
    /// Index of the first fire classified infinite.
    pub kappa: Option<u64>,
    /// Start time of that fire.
    pub infinite_start: Option<f64>,
    pub end_time: f64,
    pub halt: HaltReason,
    pub sites_materialized: u64,
    /// First ignition time per instantiated site.
    #[serde(skip)]
    pub first_burn: Vec<Option<f64>>,
    #[serde(skip)]
    pub timelines: Vec<SiteTimeline>,
    #[serde(skip)]
    pub arrows: Vec<Arrow>,
}

impl RunSummary {
    pub fn first_burn_time(&self, site: u64) -> Option<f64> {
        self.first_burn.get(site as usize).copied().flatten()
    }

    /// Number of fires decided infinite by the frontier rule.
    pub fn boundary_classified(&self) -> usize {
        self.fires.iter().filter(|f| f.classification.is_infinite()).count()
    }
}
