//! Probability that the first fire is already the infinite one, and the
//! law of the first maximum, for zero burn time and a constant delay `a`.

use serde::{Deserialize, Serialize};

use crate::analytics::product::constant_delay_product;
use crate::analytics::quadrature::integrate;
use crate::analytics::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaBounds {
    pub a: f64,
    /// `e^a - 1`.
    pub mu: f64,
    pub lower: f64,
    pub upper: f64,
    pub approx: f64,
}

fn check_delay(a: f64) -> Result<(), AnalyticsError> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(AnalyticsError::Domain(format!("delay must be positive and finite, got {a}")))
    }
}

pub fn p_kappa1_bounds(a: f64) -> Result<KappaBounds, AnalyticsError> {
    check_delay(a)?;
    let mu = a.exp_m1();
    Ok(KappaBounds {
        a,
        mu,
        lower: 1.0 - 1.0 / (2.0 * mu),
        upper: -mu * (-1.0 / mu).exp_m1(),
        approx: 1.0 - ((-a).exp() + (-2.0 * a).exp()) / 2.0 - (-3.0 * a).exp() / 6.0,
    })
}

/// Number of factors of `prod_{x>=1} (1 - v e^{-a x})` needed so that the
/// dropped tail changes the product by at most `eps` for every `v <= 1`.
fn cutoff(a: f64, eps: f64) -> u64 {
    let ratio = (-a).exp();
    let mut n = 1u64;
    while (-(a * (n + 1) as f64)).exp() / (1.0 - ratio) > eps {
        n += 1;
    }
    n
}

fn truncated_product(v: f64, a: f64, terms: u64) -> f64 {
    (1..=terms).map(|x| 1.0 - v * (-(a * x as f64)).exp()).product()
}

/// `P(kappa = 1) = int_0^1 prod_{x>=1} (1 - v e^{-a x}) dv`, accurate to `tol`.
pub fn p_kappa1_quadrature(a: f64, tol: f64) -> Result<f64, AnalyticsError> {
    check_delay(a)?;
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(AnalyticsError::Domain(format!("tolerance must lie in (0, 1e-3], got {tol}")));
    }
    // Truncation error <= 1 - (1 - tail) <= tail <= tol / 4 pointwise.
    let terms = cutoff(a, tol / 4.0);
    let r = integrate(|v| truncated_product(v, a, terms), 0.0, 1.0, tol / 4.0, 1e-8);
    Ok(r.value)
}

/// `P(m_1 = k | nu_1)`: the first fire burns exactly sites `0..=k`.
///
/// Defined for every `k >= 0`; `k = 0` is the event that site 1 is still
/// empty when the fire arrives.
pub fn m1_pmf(nu1: f64, a: f64, k: u64) -> f64 {
    let head = (-nu1 - a * (k + 1) as f64).exp();
    let body: f64 = (1..=k).map(|x| 1.0 - (-nu1 - a * x as f64).exp()).product();
    head * body
}

/// `P(m_1 = infinity | nu_1)`.
pub fn m1_infinite_mass(nu1: f64, a: f64, tol: f64) -> f64 {
    constant_delay_product(nu1, a, tol).value()
}

/// `P(m_1 = k)` with `nu_1 ~ Exp(1)` integrated out.
pub fn m1_marginal_pmf(a: f64, k: u64, tol: f64) -> Result<f64, AnalyticsError> {
    check_delay(a)?;
    // Substituting v = e^{-nu} turns E[.] into an integral over (0, 1).
    let f = |v: f64| {
        let body: f64 = (1..=k).map(|x| 1.0 - v * (-(a * x as f64)).exp()).product();
        v * (-(a * (k + 1) as f64)).exp() * body
    };
    Ok(integrate(f, 0.0, 1.0, tol, 1e-10).value)
}
