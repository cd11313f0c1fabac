//! Goodness-of-fit tests and binomial intervals.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("bin counts and probabilities differ in length ({0} vs {1})")]
    Shape(usize, usize),
    #[error("probabilities must be nonnegative and sum to one (sum {0})")]
    NotAPmf(f64),
    #[error("at least two bins are needed")]
    TooFewBins,
    #[error("confidence level must lie in (0, 1), got {0}")]
    Level(f64),
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small arguments.
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let s: f64 = (0..6).map(|j| y.powi((2 * j + 1) * (2 * j + 1))).sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for j in 1..=100 {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-17 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

fn ks_p(d: f64, n_eff: f64) -> f64 {
    let root = n_eff.sqrt();
    kolmogorov_sf((root + 0.12 + 0.11 / root) * d)
}

/// One-sample Kolmogorov-Smirnov test of `xs` against a continuous `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 1.0);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    (d, ks_p(d, n))
}

/// Two-sample Kolmogorov-Smirnov test; ties are handled exactly.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    if xs.is_empty() || ys.is_empty() {
        return (0.0, 1.0);
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < n && a[i] <= v {
            i += 1;
        }
        while j < m && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let n_eff = (n * m) as f64 / (n + m) as f64;
    (d, ks_p(d, n_eff))
}

/// Pearson chi-square statistic and p-value of counts against a pmf.
pub fn chi_square_gof(observed: &[u64], pmf: &[f64]) -> Result<(f64, f64), StatsError> {
    if observed.len() != pmf.len() {
        return Err(StatsError::Shape(observed.len(), pmf.len()));
    }
    if observed.len() < 2 {
        return Err(StatsError::TooFewBins);
    }
    let total_p: f64 = pmf.iter().sum();
    if pmf.iter().any(|&p| !(p >= 0.0)) || (total_p - 1.0).abs() > 1e-6 {
        return Err(StatsError::NotAPmf(total_p));
    }
    let n: u64 = observed.iter().sum();
    if n == 0 {
        return Err(StatsError::Empty);
    }
    let n = n as f64;
    let mut stat = 0.0;
    for (&o, &p) in observed.iter().zip(pmf) {
        let e = n * p;
        if e == 0.0 {
            if o > 0 {
                return Ok((f64::INFINITY, 0.0));
            }
            continue;
        }
        stat += (o as f64 - e).powi(2) / e;
    }
    let dof = (observed.len() - 1) as f64;
    let p = ChiSquared::new(dof).expect("positive degrees of freedom").sf(stat);
    Ok((stat, p))
}

/// Merge adjacent bins, left to right, until each expected count reaches
/// `min_expected`. A short remainder joins the last full bin.
pub fn pool_bins(observed: &[u64], pmf: &[f64], min_expected: f64) -> (Vec<u64>, Vec<f64>) {
    let n: u64 = observed.iter().sum();
    let mut obs = Vec::new();
    let mut probs = Vec::new();
    let (mut o_acc, mut p_acc) = (0u64, 0.0);
    for (&o, &p) in observed.iter().zip(pmf) {
        o_acc += o;
        p_acc += p;
        if p_acc * n as f64 >= min_expected {
            obs.push(o_acc);
            probs.push(p_acc);
            o_acc = 0;
            p_acc = 0.0;
        }
    }
    if p_acc > 0.0 || o_acc > 0 {
        match (obs.last_mut(), probs.last_mut()) {
            (Some(o), Some(p)) => {
                *o += o_acc;
                *p += p_acc;
            }
            _ => {
                obs.push(o_acc);
                probs.push(p_acc);
            }
        }
    }
    (obs, probs)
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> Result<(f64, f64), StatsError> {
    if trials == 0 {
        return Err(StatsError::Empty);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::Level(level));
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// One-sided pooled z-test of `H1: p1 > p2`; returns the p-value.
pub fn two_proportion_greater(s1: u64, n1: u64, s2: u64, n2: u64) -> Result<f64, StatsError> {
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::Empty);
    }
    let (p1, p2) = (s1 as f64 / n1 as f64, s2 as f64 / n2 as f64);
    let pooled = (s1 + s2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return Ok(1.0);
    }
    Ok(Normal::standard().sf((p1 - p2) / se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 50, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50, 0.95).unwrap();
        assert!(lo > 0.9);
        assert_eq!(hi, 1.0);
        assert!(wilson_interval(1, 0, 0.95).is_err());
    }

    #[test]
    fn wilson_textbook_value() {
        // 8 successes out of 20 at 95%: (0.2188, 0.6134).
        let (lo, hi) = wilson_interval(8, 20, 0.95).unwrap();
        assert!((lo - 0.218_8).abs() < 1e-4 && (hi - 0.613_4).abs() < 1e-4, "{lo} {hi}");
    }

    #[test]
    fn ks_identical_samples() {
        let xs = [0.3, 1.2, 0.7, 2.2];
        let (d, p) = ks_two_sample(&xs, &xs);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn ks_disjoint_samples() {
        let xs: Vec<f64> = (0..50).map(f64::from).collect();
        let ys: Vec<f64> = (100..150).map(f64::from).collect();
        let (d, p) = ks_two_sample(&xs, &ys);
        assert_eq!(d, 1.0);
        assert!(p < 1e-10);
    }

    #[test]
    fn ks_uniform_grid() {
        // Midpoints of n equal cells: D = 1/(2n).
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let (d, p) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
        assert!(p > 0.999);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Standard critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
        assert!((kolmogorov_sf(0.8) - 0.5441).abs() < 1e-3);
    }

    #[test]
    fn fair_die_by_hand() {
        // Counts 8, 9, 19, 5, 8, 11 over 60 rolls: sum (o - 10)^2 / 10 = 11.6.
        let obs = [8, 9, 19, 5, 8, 11];
        let (stat, p) = chi_square_gof(&obs, &[1.0 / 6.0; 6]).unwrap();
        assert!((stat - 11.6).abs() < 1e-12);
        assert!((p - 0.040_70).abs() < 1e-4, "{p}");
    }

    #[test]
    fn chi_square_rejects_bad_input() {
        assert!(chi_square_gof(&[1, 2], &[0.5]).is_err());
        assert!(chi_square_gof(&[1, 2], &[0.5, 0.6]).is_err());
        assert!(chi_square_gof(&[0, 0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn pooling_merges_sparse_tail() {
        let obs = [50, 30, 15, 3, 1, 1];
        let pmf = [0.5, 0.3, 0.15, 0.03, 0.01, 0.01];
        let (o, p) = pool_bins(&obs, &pmf, 5.0);
        assert_eq!(o, vec![50, 30, 15, 5]);
        assert!((p[3] - 0.05).abs() < 1e-12);
        assert_eq!(o.iter().sum::<u64>(), 100);
    }

    #[test]
    fn one_sided_proportions() {
        let p = two_proportion_greater(60, 100, 40, 100).unwrap();
        assert!((p - 0.002_34).abs() < 1e-4, "{p}");
        assert!(two_proportion_greater(40, 100, 60, 100).unwrap() > 0.99);
        assert_eq!(two_proportion_greater(0, 10, 0, 10).unwrap(), 1.0);
    }
}
