use serde::{Deserialize, Serialize};

use crate::rng::{Purpose, RngPolicy};

/// Closed interval of times during which a burning site can ignite its
/// right neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

impl Window {
    pub fn is_instant(&self) -> bool {
        self.start == self.end
    }
}

/// Influence of an ignition at time `ignite` on the next site.
///
/// Opens `delta` after the ignition, closes `delta` after the tree burns
/// out, and never opens before `prev_close`, the closing time of the
/// previous attempt on the same target.
pub fn influence_window(ignite: f64, theta: f64, delta: f64, prev_close: f64) -> Option<Window> {
    let start = (ignite + delta).max(prev_close);
    let end = ignite + theta + delta;
    (start <= end).then_some(Window { start, end })
}

/// Time a vacant site next holds a tree: `after` plus the Exp(1) draw keyed
/// by `(site, Growth, occurrence)`.
pub fn next_plant_time(site: u64, after: f64, policy: &RngPolicy, occurrence: u64) -> f64 {
    after + policy.exp1(site, Purpose::Growth, occurrence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direct_formula() {
        assert_eq!(influence_window(1.0, 0.5, 2.0, 0.0), Some(Window { start: 3.0, end: 3.5 }));
    }

    #[test]
    fn clipped_by_previous_close() {
        assert_eq!(influence_window(1.0, 0.5, 2.0, 3.2), Some(Window { start: 3.2, end: 3.5 }));
        assert_eq!(influence_window(1.0, 0.5, 2.0, 4.0), None);
    }

    #[test]
    fn zero_burn_zero_delay_is_an_instant() {
        let w = influence_window(2.75, 0.0, 0.0, 0.0).unwrap();
        assert!(w.is_instant());
        assert_eq!(w.start, 2.75);
    }

    #[test]
    fn plant_time_is_keyed() {
        let p = RngPolicy::new(11);
        assert_eq!(next_plant_time(4, 1.0, &p, 3), next_plant_time(4, 1.0, &p, 3));
        assert!(next_plant_time(4, 1.0, &p, 3) > 1.0);
    }

    #[test]
    fn growth_clock_has_unit_mean() {
        let p = RngPolicy::new(20_231_017);
        let n = 1_000_000u64;
        let mean = (0..n).map(|i| next_plant_time(i, 0.0, &p, i / 7)).sum::<f64>() / n as f64;
        assert!((0.998..=1.002).contains(&mean), "{mean}");
    }

    #[test]
    fn successive_occurrences_uncorrelated() {
        let p = RngPolicy::new(99);
        let n = 100_000u64;
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|s| (next_plant_time(s, 0.0, &p, 1), next_plant_time(s, 0.0, &p, 2)))
            .collect();
        let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (mx / n as f64, my / n as f64);
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in &pairs {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
            syy += (y - my).powi(2);
        }
        let rho = sxy / (sxx * syy).sqrt();
        assert!(rho.abs() < 0.01, "{rho}");
    }

    proptest! {
        #[test]
        fn window_within_physical_effect(f in 0.0..100.0f64, th in 0.0..5.0f64, d in 0.0..5.0f64, prev in 0.0..120.0f64) {
            match influence_window(f, th, d, prev) {
                Some(w) => {
                    prop_assert!(w.start <= w.end);
                    prop_assert!(w.start >= f + d && w.start >= prev);
                    prop_assert_eq!(w.end, f + th + d);
                }
                None => prop_assert!(prev > f + th + d),
            }
        }
    }
}
