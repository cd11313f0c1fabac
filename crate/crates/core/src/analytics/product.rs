//! Infinite products of the form `prod (1 - y_n)` with certified tails.
//!
//! A product is summed in log space up to a cutoff `N`, and the remaining
//! factor is enclosed using `sum y <= -log prod (1 - y) <= sum y + sum y^2`,
//! valid once every remaining `y_n <= 1/2`.

use serde::{Deserialize, Serialize};

/// Enclosure of an infinite product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductBound {
    pub lower: f64,
    pub upper: f64,
    /// Number of factors evaluated explicitly.
    pub terms: u64,
}

impl ProductBound {
    pub const ZERO: ProductBound = ProductBound { lower: 0.0, upper: 0.0, terms: 0 };

    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Combine an explicit log-partial product with bounds `[lo, hi]` on the
    /// tail sum of `y_n`, whose terms are all at most `y_max`.
    fn from_tail(log_partial: f64, lo: f64, hi: f64, y_max: f64, terms: u64) -> Self {
        debug_assert!(y_max <= 0.5);
        let upper = (log_partial - lo).exp();
        let lower = (log_partial - hi - hi * y_max).exp();
        ProductBound { lower, upper, terms }
    }
}

/// `prod_{n >= 1} (1 - exp(-(t + a n)))` for `a > 0`, `t >= 0`.
pub fn constant_delay_product(t: f64, a: f64, tol: f64) -> ProductBound {
    debug_assert!(a > 0.0 && t >= 0.0);
    let ratio = (-a).exp();
    let mut log_partial = 0.0;
    let mut n = 0u64;
    loop {
        n += 1;
        let y = (-(t + a * n as f64)).exp();
        log_partial += (-y).ln_1p();
        // Geometric tail: sum_{m > n} y_m = y ratio / (1 - ratio).
        let next = y * ratio;
        let tail = next / (1.0 - ratio);
        if next <= 0.5 && tail * (1.0 + next) * log_partial.exp() <= tol * 0.5 {
            return ProductBound::from_tail(log_partial, tail, tail, next, n);
        }
        if log_partial == f64::NEG_INFINITY {
            return ProductBound { terms: n, ..ProductBound::ZERO };
        }
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `prod_{n > x} (1 - exp(-(t + S_{x,n})))` for delays `c / i` at site
/// `i >= 1` (and `c` at the origin), where `S_{x,n}` is the total delay
/// from `x` to `n`. Zero when `c <= 1`.
pub fn c_over_x_product(t: f64, x: u64, c: f64, tol: f64) -> ProductBound {
    if c <= 1.0 {
        return ProductBound::ZERO;
    }
    let delay = |i: u64| if i == 0 { c } else { c / i as f64 };
    // S_{x,n} = offset + c H_{n-1} for n > x.
    let offset = if x == 0 {
        c
    } else {
        -c * (1..x).map(|i| 1.0 / i as f64).sum::<f64>()
    };
    let scale = (-(t + offset)).exp();
    let mut log_partial = 0.0;
    let mut s = 0.0;
    let mut n = x;
    let mut checkpoint = x + 64;
    loop {
        s += delay(n);
        n += 1;
        let y = (-(t + s)).exp();
        if y >= 1.0 {
            return ProductBound { terms: n - x, ..ProductBound::ZERO };
        }
        log_partial += (-y).ln_1p();
        if n < checkpoint {
            continue;
        }
        checkpoint = checkpoint.saturating_mul(2);
        // Tail over m = n' - 1 >= N := n, using
        // ln m + gamma + 1/(2m) - 1/(12 m^2) <= H_m <= ln m + gamma + 1/(2m).
        let big_n = n as f64;
        let power = big_n.powf(1.0 - c) / (c - 1.0);
        let base = scale * (-c * EULER_GAMMA).exp();
        let lo = base * (-c / (2.0 * big_n)).exp() * power;
        let hi = base * (c / (12.0 * big_n * big_n)).exp() * (power + big_n.powf(-c));
        let y_next = (-(t + s + delay(n))).exp();
        if y_next > 0.5 {
            continue;
        }
        let bound = ProductBound::from_tail(log_partial, lo, hi, y_next, n - x);
        if bound.width() <= tol || bound.upper < tol * 0.5 {
            return bound;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_delay_matches_brute_force() {
        for (t, a) in [(0.0, 1.0), (1.0, 0.5), (0.3, 2.0), (0.0, 0.35)] {
            let brute: f64 = (1..20_000).map(|n| 1.0 - (-(t + a * n as f64)).exp()).product();
            let b = constant_delay_product(t, a, 1e-12);
            assert!(b.lower <= brute + 1e-15 && brute <= b.upper + 1e-15, "{t} {a}");
            assert!(b.width() <= 1e-12);
        }
    }

    #[test]
    fn c_over_x_encloses_long_partial_products() {
        // Independent oracle: direct partial product to 10^7 sites plus the
        // crude tail bound sum y_n <= y_N N / (c - 1).
        let (t, x, c) = (1.0, 10u64, 2.0);
        let mut s = 0.0;
        let mut logp = 0.0;
        let mut last_y = 0.0;
        let n_max = 10_000_000u64;
        for n in (x + 1)..=n_max {
            s += c / (n - 1) as f64;
            last_y = (-(t + s)).exp();
            logp += (-last_y).ln_1p();
        }
        let oracle_hi = logp.exp();
        let tail = last_y * n_max as f64 / (c - 1.0);
        let oracle_lo = (logp - tail - tail * tail).exp();
        let b = c_over_x_product(t, x, c, 1e-10);
        assert!(b.lower > 0.0);
        assert!(b.lower <= oracle_hi && b.upper >= oracle_lo);
        assert!(b.width() < 1e-9);
    }

    #[test]
    fn subcritical_is_zero() {
        assert_eq!(c_over_x_product(1.0, 10, 1.0, 1e-10), ProductBound::ZERO);
        assert_eq!(c_over_x_product(5.0, 3, 0.5, 1e-10).upper, 0.0);
    }
}
