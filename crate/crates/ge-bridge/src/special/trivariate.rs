//! Orthant probability for three consecutive samples of a stationary process.

use super::bivariate::cdf_raw;
use super::normal::pdf;
use super::quad::integrate;
use super::Correlation;
use crate::error::{domain, Result};

/// P(Z0 < t0, Z1 < t1, Z2 < t2) under the stationary correlation structure
/// corr(Z0,Z1) = corr(Z1,Z2) = rho1, corr(Z0,Z2) = rho2.
///
/// Conditional on the middle variable Z1 = z, the outer pair is bivariate
/// normal with means rho1*z, variances 1 - rho1^2, and partial correlation
/// (rho2 - rho1^2)/(1 - rho1^2); the result is a single 1-D integral of an
/// analytic integrand, evaluated adaptively to 1e-10 absolute over
/// z in [-8, min(t1, 8)].
pub fn trivariate_orthant(
    thresholds: (f64, f64, f64),
    rho1: Correlation,
    rho2: Correlation,
) -> Result<f64> {
    let (t0, t1, t2) = thresholds;
    if !t0.is_finite() || !t1.is_finite() || !t2.is_finite() {
        return domain(format!(
            "trivariate_orthant: non-finite threshold ({t0}, {t1}, {t2})"
        ));
    }
    let r1 = rho1.get();
    let r2 = rho2.get();
    // leading principal minors of [[1,r1,r2],[r1,1,r1],[r2,r1,1]]
    let m2 = 1.0 - r1 * r1;
    let m3 = (1.0 - r2) * (1.0 + r2 - 2.0 * r1 * r1);
    if m2 <= 0.0 || m3 <= 0.0 {
        return domain(format!(
            "trivariate_orthant: correlation matrix (rho1={r1}, rho2={r2}) not positive definite"
        ));
    }
    let rc = (r2 - r1 * r1) / m2;
    if rc.abs() >= 1.0 - 1e-12 {
        return domain(format!(
            "trivariate_orthant: partial correlation {rc} numerically singular"
        ));
    }
    let hi = t1.min(8.0);
    if hi <= -8.0 {
        // mass below Phi(-8) ~ 6e-16, under the quadrature tolerance
        return Ok(0.0);
    }
    let sc = m2.sqrt();
    let val = integrate(
        |z| pdf(z) * cdf_raw((t0 - r1 * z) / sc, (t2 - r1 * z) / sc, rc),
        -8.0,
        hi,
        1e-10,
    );
    Ok(val.clamp(0.0, 1.0))
}
