//! Exact fate of a fire entering untouched territory.
//!
//! With zero burn time and delay `a`, a fire that ignites site `x` at time
//! `t`, with every site beyond `x` still untouched, reaches `x + j` at
//! `t + a j`; site `x + j` holds a tree then with probability
//! `s_j = 1 - e^{-(t + a j)}`, independently over `j`. The fire is infinite
//! with probability `Q_1 = prod_j s_j`; otherwise the first empty site is
//! drawn from its conditional law one site at a time.

use crate::analytics::AnalyticsError;
use crate::rng::{Purpose, RngPolicy};

#[derive(Debug, Clone, Copy)]
pub struct FrontierQuery {
    pub time: f64,
    pub site: u64,
    pub delay: f64,
    pub highest_materialized: u64,
    pub theta_is_zero: bool,
    /// Distinguishes the random draws of different classifications.
    pub draw_key: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontierOutcome {
    Infinite,
    /// The first site that is still empty when the fire arrives.
    StopAt(u64),
}

/// `ln Q_j = sum_{m >= j} ln(1 - e^{-(t + a m)})`.
fn log_tail(t: f64, a: f64, j: u64) -> f64 {
    let mut sum = 0.0;
    let mut m = j;
    loop {
        let y = (-(t + a * m as f64)).exp();
        let term = (-y).ln_1p();
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || y == 0.0 {
            return sum;
        }
        m += 1;
    }
}

/// Probability that the fire continues forever.
pub fn continuation_probability(t: f64, a: f64) -> f64 {
    log_tail(t, a, 1).exp()
}

/// `P(fire passes site x + j | it stops somewhere at or after x + j)`.
pub fn pass_probability(t: f64, a: f64, j: u64) -> f64 {
    let fail_here = -log_tail(t, a, j).exp_m1();
    if fail_here <= 0.0 {
        return 0.0;
    }
    let s_j = -(-(t + a * j as f64)).exp_m1();
    let fail_next = -log_tail(t, a, j + 1).exp_m1();
    (s_j * fail_next / fail_here).min(1.0)
}

/// Offset from the frontier of the first empty site, given that the fire
/// does stop. `uniform(j)` supplies one uniform per examined site.
pub fn sample_stop_offset<U: FnMut(u64) -> f64>(t: f64, a: f64, mut uniform: U) -> u64 {
    let mut j = 1;
    while uniform(j) < pass_probability(t, a, j) {
        j += 1;
    }
    j
}

pub fn frontier_classify(q: &FrontierQuery, policy: &RngPolicy) -> Result<FrontierOutcome, AnalyticsError> {
    if !q.theta_is_zero {
        return Err(AnalyticsError::Precondition("burn time must be identically zero".into()));
    }
    if q.highest_materialized > q.site {
        return Err(AnalyticsError::Precondition(format!(
            "site {} lies beyond the frontier {}",
            q.highest_materialized, q.site
        )));
    }
    if !(q.delay > 0.0) {
        return Err(AnalyticsError::Domain(format!("delay must be positive, got {}", q.delay)));
    }
    let key = q.draw_key.wrapping_mul(2);
    let u = policy.uniform(q.site, Purpose::Frontier, key);
    if u < continuation_probability(q.time, q.delay) {
        return Ok(FrontierOutcome::Infinite);
    }
    let offset = sample_stop_offset(q.time, q.delay, |j| policy.uniform(q.site + j, Purpose::Frontier, key + 1));
    Ok(FrontierOutcome::StopAt(q.site + offset))
}
