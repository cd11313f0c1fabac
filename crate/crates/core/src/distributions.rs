//! Laws for burn times and spread delays.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{Purpose, RngPolicy};

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("parameter `{name}` must be finite and nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("probability must lie in [0, 1], got {0}")]
    Probability(f64),
    #[error("uniform bounds out of order: lo = {lo}, hi = {hi}")]
    Bounds { lo: f64, hi: f64 },
    #[error("exponential rate must be positive, got {0}")]
    Rate(f64),
}

/// A nonnegative one-dimensional law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistSpec {
    Zero,
    Constant { value: f64 },
    Exponential { rate: f64 },
    /// `value` with probability `p`, else 0.
    ScaledBernoulli { value: f64, p: f64 },
    Uniform { lo: f64, hi: f64 },
}

fn nonneg(name: &'static str, value: f64) -> Result<(), SpecError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(SpecError::Negative { name, value })
    }
}

impl DistSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        match *self {
            DistSpec::Zero => Ok(()),
            DistSpec::Constant { value } => nonneg("value", value),
            DistSpec::Exponential { rate } => {
                if rate.is_finite() && rate > 0.0 {
                    Ok(())
                } else {
                    Err(SpecError::Rate(rate))
                }
            }
            DistSpec::ScaledBernoulli { value, p } => {
                nonneg("value", value)?;
                if (0.0..=1.0).contains(&p) {
                    Ok(())
                } else {
                    Err(SpecError::Probability(p))
                }
            }
            DistSpec::Uniform { lo, hi } => {
                nonneg("lo", lo)?;
                nonneg("hi", hi)?;
                if lo <= hi {
                    Ok(())
                } else {
                    Err(SpecError::Bounds { lo, hi })
                }
            }
        }
    }

    /// True when every sample is exactly zero.
    pub fn is_zero(&self) -> bool {
        match *self {
            DistSpec::Zero => true,
            DistSpec::Constant { value } => value == 0.0,
            DistSpec::ScaledBernoulli { value, p } => value == 0.0 || p == 0.0,
            DistSpec::Uniform { lo, hi } => hi == 0.0 && lo == 0.0,
            DistSpec::Exponential { .. } => false,
        }
    }

    /// The constant value when the law is a point mass.
    pub fn as_constant(&self) -> Option<f64> {
        match *self {
            DistSpec::Zero => Some(0.0),
            DistSpec::Constant { value } => Some(value),
            DistSpec::Uniform { lo, hi } if lo == hi => Some(lo),
            DistSpec::ScaledBernoulli { value, p: 1.0 } => Some(value),
            _ if self.is_zero() => Some(0.0),
            _ => None,
        }
    }

    /// Inverse-CDF transform of a uniform on (0, 1).
    #[inline]
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            DistSpec::Zero => 0.0,
            DistSpec::Constant { value } => value,
            DistSpec::Exponential { rate } => -u.ln() / rate,
            DistSpec::ScaledBernoulli { value, p } => {
                if u < p {
                    value
                } else {
                    0.0
                }
            }
            DistSpec::Uniform { lo, hi } => lo + (hi - lo) * u,
        }
    }

    pub fn sample(&self, site: u64, purpose: Purpose, occurrence: u64, policy: &RngPolicy) -> f64 {
        match self.as_constant() {
            Some(c) => c,
            None => self.quantile(policy.uniform(site, purpose, occurrence)),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistSpec::Zero => 0.0,
            DistSpec::Constant { value } => value,
            DistSpec::Exponential { rate } => 1.0 / rate,
            DistSpec::ScaledBernoulli { value, p } => value * p,
            DistSpec::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// `E exp(-X)`, the Laplace transform at 1.
    pub fn laplace_at_one(&self) -> f64 {
        match *self {
            DistSpec::Zero => 1.0,
            DistSpec::Constant { value } => (-value).exp(),
            DistSpec::Exponential { rate } => rate / (rate + 1.0),
            DistSpec::ScaledBernoulli { value, p } => p * (-value).exp() + (1.0 - p),
            DistSpec::Uniform { lo, hi } => {
                if hi == lo {
                    (-lo).exp()
                } else {
                    ((-lo).exp() - (-hi).exp()) / (hi - lo)
                }
            }
        }
    }

    /// CDF, used by goodness-of-fit tests.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            DistSpec::Uniform { lo, hi } => {
                if x < lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            DistSpec::ScaledBernoulli { value, p } => {
                if x < 0.0 {
                    0.0
                } else if x < value {
                    1.0 - p
                } else {
                    1.0
                }
            }
            DistSpec::Zero => f64::from(u8::from(x >= 0.0)),
            DistSpec::Constant { value } => f64::from(u8::from(x >= value)),
        }
    }
}

/// Site-dependent spread-delay families whose mean decays like `c / x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SiteFamily {
    /// `c / x` exactly at site `x >= 1`, and `c` at the origin.
    DeterministicCOverX { c: f64 },
    /// Uniform on `[0, 2c/x]` clamped at `cap(x) = min(2c/x, delta / sqrt(2x))`.
    BoundedCOverX { c: f64, delta: f64 },
}

impl SiteFamily {
    fn validate(&self) -> Result<(), SpecError> {
        match *self {
            SiteFamily::DeterministicCOverX { c } => nonneg("c", c),
            SiteFamily::BoundedCOverX { c, delta } => {
                nonneg("c", c)?;
                nonneg("delta", delta)
            }
        }
    }

    /// Upper end of the uncapped uniform at `site`.
    fn spread(c: f64, site: u64) -> f64 {
        if site == 0 {
            2.0 * c
        } else {
            2.0 * c / site as f64
        }
    }

    /// Support cap of the bounded family (`+inf` at the origin).
    pub fn cap(&self, site: u64) -> f64 {
        match *self {
            SiteFamily::DeterministicCOverX { c } => {
                if site == 0 {
                    c
                } else {
                    c / site as f64
                }
            }
            SiteFamily::BoundedCOverX { c, delta } => {
                let b = Self::spread(c, site);
                if site == 0 {
                    b
                } else {
                    b.min(delta / (2.0 * site as f64).sqrt())
                }
            }
        }
    }
}

/// Law of the spread delay, possibly depending on the site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DeltaSpec {
    Homogeneous { law: DistSpec },
    PerSite { law: SiteFamily },
}

impl From<DistSpec> for DeltaSpec {
    fn from(law: DistSpec) -> Self {
        DeltaSpec::Homogeneous { law }
    }
}

impl DeltaSpec {
    pub fn constant(a: f64) -> Self {
        DistSpec::Constant { value: a }.into()
    }

    pub fn c_over_x(c: f64) -> Self {
        DeltaSpec::PerSite { law: SiteFamily::DeterministicCOverX { c } }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        match self {
            DeltaSpec::Homogeneous { law } => law.validate(),
            DeltaSpec::PerSite { law } => law.validate(),
        }
    }

    /// The constant value when the law is homogeneous and degenerate.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            DeltaSpec::Homogeneous { law } => law.as_constant(),
            DeltaSpec::PerSite { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// True when the delay at every site is a known number.
    pub fn is_deterministic(&self) -> bool {
        match self {
            DeltaSpec::Homogeneous { law } => law.as_constant().is_some(),
            DeltaSpec::PerSite { law } => matches!(law, SiteFamily::DeterministicCOverX { .. }),
        }
    }

    pub fn sample(&self, site: u64, occurrence: u64, policy: &RngPolicy) -> f64 {
        match self {
            DeltaSpec::Homogeneous { law } => law.sample(site, Purpose::Delta, occurrence, policy),
            DeltaSpec::PerSite { law } => match *law {
                SiteFamily::DeterministicCOverX { .. } => law.cap(site),
                SiteFamily::BoundedCOverX { c, .. } => {
                    let u = policy.uniform(site, Purpose::Delta, occurrence);
                    (u * SiteFamily::spread(c, site)).min(law.cap(site))
                }
            },
        }
    }

    /// Closed-form mean of the delay at `site`.
    pub fn mean(&self, site: u64) -> f64 {
        match self {
            DeltaSpec::Homogeneous { law } => law.mean(),
            DeltaSpec::PerSite { law } => match *law {
                SiteFamily::DeterministicCOverX { .. } => law.cap(site),
                SiteFamily::BoundedCOverX { c, .. } => {
                    let b = SiteFamily::spread(c, site);
                    let h = law.cap(site);
                    if b == 0.0 {
                        0.0
                    } else {
                        // E min(U b, h) for U uniform on (0, 1) and h <= b.
                        h - h * h / (2.0 * b)
                    }
                }
            },
        }
    }
}
