//! Event-driven simulation of the process.
//!
//! Sites are created lazily, left to right, the first time a spread attempt
//! targets them. Influence only flows rightward, so the state of sites
//! `0..=x` never depends on anything to the right of `x`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use crate::analytics::classify::{frontier_classify, FrontierOutcome, FrontierQuery};
use crate::engine::config::{FrontierMode, ModelConfig};
use crate::engine::records::{
    Arrow, Classification, Episode, FireRecord, HaltReason, MaximaRecord, RunSummary, SiteTimeline,
};
use crate::engine::window::{influence_window, next_plant_time};
use crate::engine::EngineError;
use crate::rng::{Purpose, RngPolicy};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Status {
    Vacant,
    Tree,
    Burning,
}

/// Conditioning of a fresh site's first planting, imposed by the exact
/// frontier classifier.
#[derive(Debug, Clone, Copy)]
enum FirstPlant {
    AtMost(f64),
    After(f64),
}

#[derive(Debug, Clone, Copy)]
struct OpenWindow {
    fire: u64,
    end: f64,
    arrow: Option<usize>,
}

#[derive(Debug)]
struct Site {
    status: Status,
    growth_occurrence: u64,
    burns: u64,
    prev_close: f64,
    open: Option<OpenWindow>,
    first_burn: Option<f64>,
    second_burn: Option<f64>,
    episodes: Vec<Episode>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    WindowClose,
    BurnEnd,
    WindowOpen { end: f64, arrow: Option<usize> },
    Plant,
}

impl Kind {
    fn rank(&self) -> u8 {
        match self {
            Kind::WindowClose => 0,
            Kind::BurnEnd => 1,
            Kind::WindowOpen { .. } => 2,
            Kind::Plant => 3,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    site: u64,
    fire: u64,
    kind: Kind,
    seq: u64,
}

// Simultaneous events run left to right by site, then by fire index.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.site.cmp(&other.site))
            .then(self.fire.cmp(&other.fire))
            .then(self.kind.rank().cmp(&other.kind.rank()))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

const NO_FIRE: u64 = u64::MAX;

#[derive(Debug)]
struct Excursion {
    base: i64,
    stretches: Vec<u64>,
    last_time: f64,
}

#[derive(Debug)]
struct FireState {
    record: FireRecord,
    alive: bool,
    latest_extinguish: f64,
    excursion: Option<Excursion>,
    sentinel_done: bool,
}

struct Engine<'a> {
    cfg: &'a ModelConfig,
    policy: RngPolicy,
    now: f64,
    seq: u64,
    queue: BinaryHeap<Reverse<Event>>,
    sites: Vec<Site>,
    fires: Vec<FireState>,
    alive: usize,
    global_max: i64,
    maxima: Vec<MaximaRecord>,
    arrows: Vec<Arrow>,
    conditioned: HashMap<u64, FirstPlant>,
    /// `(site, time, delay)` of an exactly-classified infinite fire.
    infinite_front: Option<(u64, f64, f64)>,
    halt: Option<HaltReason>,
}

/// Run the process described by `cfg` over `[0, t_max]`.
pub fn simulate(cfg: &ModelConfig) -> Result<RunSummary, EngineError> {
    cfg.validate()?;
    let mut engine = Engine {
        cfg,
        policy: RngPolicy::new(cfg.seed),
        now: 0.0,
        seq: 0,
        queue: BinaryHeap::new(),
        sites: Vec::new(),
        fires: Vec::new(),
        alive: 0,
        global_max: -1,
        maxima: Vec::new(),
        arrows: Vec::new(),
        conditioned: HashMap::new(),
        infinite_front: None,
        halt: None,
    };
    engine.instantiate(0)?;
    engine.run()?;
    Ok(engine.finish())
}

impl Engine<'_> {
    fn push(&mut self, time: f64, site: u64, fire: u64, kind: Kind) {
        self.seq += 1;
        self.queue.push(Reverse(Event { time, site, fire, kind, seq: self.seq }));
    }

    fn run(&mut self) -> Result<(), EngineError> {
        while let Some(Reverse(ev)) = self.queue.pop() {
            if ev.time > self.cfg.t_max {
                break;
            }
            self.now = ev.time;
            match ev.kind {
                Kind::Plant => self.on_plant(ev.site)?,
                Kind::BurnEnd => self.on_burn_end(ev.site),
                Kind::WindowOpen { end, arrow } => self.on_window_open(ev.site, ev.fire, end, arrow)?,
                Kind::WindowClose => self.on_window_close(ev.site, ev.fire),
            }
            if self.halt.is_none() && self.alive == 0 {
                if self.cfg.max_fires.is_some_and(|m| self.fires.len() as u64 >= m) {
                    self.halt = Some(HaltReason::MaxFires);
                } else if self.ignitions_closed() {
                    self.halt = Some(HaltReason::IgnitionsClosed);
                }
            }
            if self.halt.is_some() {
                return Ok(());
            }
        }
        self.now = self.cfg.t_max;
        Ok(())
    }

    fn ignitions_closed(&self) -> bool {
        self.cfg.last_ignition.is_some_and(|t| self.now > t)
    }

    fn site(&mut self, x: u64) -> &mut Site {
        &mut self.sites[x as usize]
    }

    /// Create site `x` (the next one to the right) with its growth clock
    /// started at time zero.
    fn instantiate(&mut self, x: u64) -> Result<(), EngineError> {
        debug_assert_eq!(x as usize, self.sites.len());
        if x >= self.cfg.max_sites {
            return Err(EngineError::ResourceLimit { sites: x + 1 });
        }
        let cond = self.conditioned.remove(&x).or_else(|| {
            self.infinite_front
                .filter(|&(front, _, _)| x > front)
                .map(|(front, t, a)| FirstPlant::AtMost(t + a * (x - front) as f64))
        });
        let plant = match cond {
            None => next_plant_time(x, 0.0, &self.policy, 0),
            Some(FirstPlant::AtMost(s)) => {
                // Exp(1) conditioned on not exceeding `s`, by inversion.
                let v = 1.0 - self.policy.uniform(x, Purpose::Growth, 0);
                -(-v * -(-s).exp_m1()).ln_1p()
            }
            Some(FirstPlant::After(s)) => s + self.policy.exp1(x, Purpose::Growth, 0),
        };
        let mut site = Site {
            status: Status::Vacant,
            growth_occurrence: 1,
            burns: 0,
            prev_close: 0.0,
            open: None,
            first_burn: None,
            second_burn: None,
            episodes: Vec::new(),
        };
        if plant <= self.now {
            site.status = Status::Tree;
            if self.cfg.record_timelines {
                site.episodes.push(Episode { plant_time: plant, ignite_time: None, extinguish_time: None, fire_id: None });
            }
        } else {
            self.push(plant, x, NO_FIRE, Kind::Plant);
        }
        self.sites.push(site);
        Ok(())
    }

    fn on_plant(&mut self, x: u64) -> Result<(), EngineError> {
        let now = self.now;
        let record = self.cfg.record_timelines;
        let site = self.site(x);
        debug_assert_eq!(site.status, Status::Vacant);
        site.status = Status::Tree;
        if record {
            site.episodes.push(Episode { plant_time: now, ignite_time: None, extinguish_time: None, fire_id: None });
        }
        if x == 0 {
            let may_start =
                self.cfg.max_fires.is_none_or(|m| (self.fires.len() as u64) < m) && !self.ignitions_closed();
            if may_start {
                let k = self.fires.len() as u64 + 1;
                self.fires.push(FireState {
                    record: FireRecord {
                        k,
                        start_time: now,
                        rightmost: 0,
                        end_time: None,
                        classification: Classification::Finite,
                        jump_count: 0,
                        classified_at: None,
                    },
                    alive: true,
                    latest_extinguish: now,
                    excursion: None,
                    sentinel_done: false,
                });
                self.alive += 1;
                self.ignite(0, k)?;
            }
        } else if let Some(w) = self.site(x).open.take() {
            debug_assert!(now < w.end);
            if let Some(i) = w.arrow {
                self.arrows[i].target_ignite = Some(now);
            }
            self.ignite(x, w.fire)?;
        }
        Ok(())
    }

    fn on_burn_end(&mut self, x: u64) {
        let now = self.now;
        let policy = self.policy;
        let site = self.site(x);
        debug_assert_eq!(site.status, Status::Burning);
        site.status = Status::Vacant;
        let occ = site.growth_occurrence;
        site.growth_occurrence += 1;
        let t = next_plant_time(x, now, &policy, occ);
        self.push(t, x, NO_FIRE, Kind::Plant);
    }

    fn on_window_open(&mut self, x: u64, fire: u64, end: f64, arrow: Option<usize>) -> Result<(), EngineError> {
        let now = self.now;
        if self.site(x).status == Status::Tree {
            if let Some(i) = arrow {
                self.arrows[i].target_ignite = Some(now);
            }
            return self.ignite(x, fire);
        }
        if now < end {
            self.site(x).open = Some(OpenWindow { fire, end, arrow });
            self.push(end, x, fire, Kind::WindowClose);
        } else {
            self.stop_fire(fire, Classification::Finite);
        }
        Ok(())
    }

    fn on_window_close(&mut self, x: u64, fire: u64) {
        let site = self.site(x);
        if site.open.is_some_and(|w| w.fire == fire) {
            site.open = None;
            self.stop_fire(fire, Classification::Finite);
        }
    }

    fn fire(&mut self, k: u64) -> &mut FireState {
        &mut self.fires[(k - 1) as usize]
    }

    /// The fire's spread attempt failed (or was cut); it burns nothing more.
    fn stop_fire(&mut self, k: u64, outcome: Classification) {
        let fire = self.fire(k);
        if !fire.alive {
            return;
        }
        fire.alive = false;
        fire.record.end_time = Some(fire.latest_extinguish);
        fire.record.classification = match (fire.record.classification, outcome) {
            // A heuristic verdict is overturned when the fire dies out.
            (Classification::InfiniteHeuristic, Classification::Finite) => Classification::Finite,
            (Classification::Finite, other) => other,
            (current, _) => current,
        };
        let finished_finite = fire.record.classification == Classification::Finite;
        let excursion = fire.excursion.take();
        let rightmost = fire.record.rightmost;
        self.alive -= 1;
        if let (true, Some(exc)) = (finished_finite, excursion) {
            let f_first = self.sites[rightmost as usize].first_burn.unwrap_or(f64::NAN);
            self.maxima.push(MaximaRecord {
                i: self.maxima.len() as u64 + 1,
                site: rightmost,
                fire_index: k,
                f_first,
                f_second: None,
                jumps: exc.stretches.len() as u64,
                stretch_lengths: exc.stretches,
            });
        }
    }

    fn ignite(&mut self, x: u64, k: u64) -> Result<(), EngineError> {
        let now = self.now;
        let cfg = self.cfg;
        let policy = self.policy;
        let site = &mut self.sites[x as usize];
        debug_assert_eq!(site.status, Status::Tree);
        let occurrence = site.burns;
        site.burns += 1;
        let theta = cfg.theta.sample(x, Purpose::Theta, occurrence, &policy);
        let delta = cfg.delta.sample(x, occurrence, &policy);
        site.status = Status::Burning;
        site.open = None;
        if site.first_burn.is_none() {
            site.first_burn = Some(now);
        } else if site.second_burn.is_none() {
            site.second_burn = Some(now);
        }
        if let Some(ep) = site.episodes.last_mut() {
            ep.ignite_time = Some(now);
            ep.extinguish_time = Some(now + theta);
            ep.fire_id = Some(k);
        }
        let window = influence_window(now, theta, delta, site.prev_close);
        site.prev_close = site.prev_close.max(now + theta + delta);
        self.push(now + theta, x, k, Kind::BurnEnd);

        let fire = self.fire(k);
        fire.record.rightmost = fire.record.rightmost.max(x);
        fire.latest_extinguish = fire.latest_extinguish.max(now + theta);
        self.track_excursion(x, k);

        if self.cfg.halt_on_site == Some(x) {
            self.halt = Some(HaltReason::SiteReached);
        }
        if !self.fire(k).alive {
            return Ok(());
        }
        if self.check_sentinel(x, k) || self.halt.is_some() {
            return Ok(());
        }
        if self.cfg.site_limit.is_some_and(|l| x >= l) {
            self.stop_fire(k, Classification::TruncatedUnknown);
            return Ok(());
        }
        let Some(w) = window else {
            self.stop_fire(k, Classification::Finite);
            return Ok(());
        };
        if self.sites.len() as u64 == x + 1 {
            self.instantiate(x + 1)?;
        }
        let arrow = self.cfg.record_timelines.then(|| {
            self.arrows.push(Arrow {
                fire: k,
                from_site: x,
                source_ignite: now,
                delay: delta,
                window_start: w.start,
                window_end: w.end,
                target_ignite: None,
            });
            self.arrows.len() - 1
        });
        self.push(w.start, x + 1, k, Kind::WindowOpen { end: w.end, arrow });
        Ok(())
    }

    fn track_excursion(&mut self, x: u64, k: u64) {
        let now = self.now;
        if (x as i64) <= self.global_max {
            return;
        }
        let base = self.global_max;
        self.global_max = x as i64;
        let fire = self.fire(k);
        match &mut fire.excursion {
            None => {
                debug_assert_eq!(x as i64, base + 1);
                fire.excursion = Some(Excursion { base, stretches: vec![1], last_time: now });
            }
            Some(exc) => {
                if now > exc.last_time {
                    exc.stretches.push(1);
                } else if let Some(last) = exc.stretches.last_mut() {
                    *last += 1;
                }
                exc.last_time = now;
            }
        }
        fire.record.jump_count = fire.excursion.as_ref().map_or(0, |e| e.stretches.len() as u64);
    }

    /// Apply the frontier rule. Returns true if the fire must not spread
    /// further from this ignition.
    fn check_sentinel(&mut self, x: u64, k: u64) -> bool {
        let sentinel = self.cfg.site_sentinel as i64;
        let now = self.now;
        let fire = self.fire(k);
        let Some(base) = fire.excursion.as_ref().map(|e| e.base) else {
            return false;
        };
        if fire.sentinel_done || (x as i64) - base < sentinel {
            return false;
        }
        fire.sentinel_done = true;
        fire.record.classified_at = Some(now);
        match self.cfg.frontier_mode {
            FrontierMode::HeuristicSentinel => {
                self.fire(k).record.classification = Classification::InfiniteHeuristic;
                if self.cfg.stop_on_infinite {
                    self.halt = Some(HaltReason::InfiniteFire);
                }
                false
            }
            FrontierMode::TruncateAndFlag => {
                self.stop_fire(k, Classification::TruncatedUnknown);
                true
            }
            FrontierMode::ExactClassify => {
                let a = self.cfg.exact_delay().expect("validated");
                let query = FrontierQuery {
                    time: now,
                    site: x,
                    delay: a,
                    highest_materialized: self.sites.len() as u64 - 1,
                    theta_is_zero: true,
                    draw_key: k,
                };
                match frontier_classify(&query, &self.policy).expect("fresh frontier") {
                    FrontierOutcome::Infinite => {
                        self.fire(k).record.classification = Classification::InfiniteExact;
                        self.infinite_front = Some((x, now, a));
                        if self.cfg.stop_on_infinite {
                            self.halt = Some(HaltReason::InfiniteFire);
                        }
                    }
                    FrontierOutcome::StopAt(stop) => {
                        for y in x + 1..stop {
                            self.conditioned.insert(y, FirstPlant::AtMost(now + a * (y - x) as f64));
                        }
                        self.conditioned.insert(stop, FirstPlant::After(now + a * (stop - x) as f64));
                    }
                }
                false
            }
        }
    }

    fn finish(mut self) -> RunSummary {
        let end_time = self.now;
        for fire in &mut self.fires {
            if fire.alive {
                fire.alive = false;
                if !fire.record.classification.is_infinite() {
                    fire.record.classification = Classification::TruncatedUnknown;
                }
            }
        }
        for m in &mut self.maxima {
            m.f_second = self.sites[m.site as usize].second_burn;
        }
        let kappa = self.fires.iter().find(|f| f.record.classification.is_infinite()).map(|f| f.record.k);
        let infinite_start = kappa.map(|k| self.fires[(k - 1) as usize].record.start_time);
        let first_burn = self.sites.iter().map(|s| s.first_burn).collect();
        let timelines = if self.cfg.record_timelines {
            self.sites
                .iter_mut()
                .enumerate()
                .map(|(x, s)| SiteTimeline { site: x as u64, episodes: std::mem::take(&mut s.episodes) })
                .collect()
        } else {
            Vec::new()
        };
        RunSummary {
            seed: self.cfg.seed,
            fires: self.fires.into_iter().map(|f| f.record).collect(),
            maxima: self.maxima,
            kappa,
            infinite_start,
            end_time,
            halt: self.halt.unwrap_or(HaltReason::Horizon),
            sites_materialized: self.sites.len() as u64,
            first_burn,
            timelines,
            arrows: self.arrows,
        }
    }
}
