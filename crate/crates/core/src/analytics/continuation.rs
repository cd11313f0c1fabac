use crate::analytics::product::{c_over_x_product, constant_delay_product, ProductBound};
use crate::analytics::AnalyticsError;
use crate::distributions::{DeltaSpec, SiteFamily};

/// Probability `q_x` that a zero-burn-time fire igniting site `x` at time
/// `t` on fresh territory never stops.
pub fn continuation_product(t: f64, x: u64, spec: &DeltaSpec, tol: f64) -> Result<ProductBound, AnalyticsError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(AnalyticsError::Domain(format!("time must be finite and nonnegative, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(AnalyticsError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    match spec {
        DeltaSpec::PerSite { law: SiteFamily::DeterministicCOverX { c } } => Ok(c_over_x_product(t, x, *c, tol)),
        DeltaSpec::PerSite { .. } => Err(AnalyticsError::Unsupported("random per-site delays".into())),
        DeltaSpec::Homogeneous { .. } => match spec.as_constant() {
            Some(a) if a > 0.0 => Ok(constant_delay_product(t, a, tol)),
            Some(_) => Ok(ProductBound::ZERO),
            None => Err(AnalyticsError::Unsupported("random homogeneous delays".into())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistSpec;

    #[test]
    fn constant_is_site_independent() {
        let spec = DeltaSpec::constant(1.0);
        let a = continuation_product(0.5, 0, &spec, 1e-12).unwrap();
        let b = continuation_product(0.5, 40, &spec, 1e-12).unwrap();
        assert_eq!(a, b);
        assert!(a.lower > 0.0);
    }

    #[test]
    fn dichotomy_in_c() {
        assert_eq!(continuation_product(3.0, 10, &DeltaSpec::c_over_x(1.0), 1e-10).unwrap().upper, 0.0);
        assert!(continuation_product(1.0, 10, &DeltaSpec::c_over_x(2.0), 1e-10).unwrap().lower > 0.0);
    }

    #[test]
    fn random_specs_are_unsupported() {
        let spec: DeltaSpec = DistSpec::Exponential { rate: 1.0 }.into();
        assert!(matches!(continuation_product(1.0, 0, &spec, 1e-9), Err(AnalyticsError::Unsupported(_))));
        let zero: DeltaSpec = DistSpec::Zero.into();
        assert_eq!(continuation_product(1.0, 0, &zero, 1e-9).unwrap(), ProductBound::ZERO);
    }

    #[test]
    fn monotone_in_t_and_c() {
        let mut prev = 0.0;
        for t in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let v = continuation_product(t, 10, &DeltaSpec::c_over_x(2.0), 1e-11).unwrap().value();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0.0;
        for c in [1.5, 2.0, 3.0, 5.0] {
            let v = continuation_product(1.0, 10, &DeltaSpec::c_over_x(c), 1e-11).unwrap().value();
            assert!(v >= prev);
            prev = v;
        }
    }
}
