//! Bivariate normal CDF assembled from Owen's T-function.

use super::normal::cdf;
use super::owens::owens_t_raw;
use super::Correlation;
use crate::error::{domain, Result};

/// Equal-threshold bivariate CDF Phi2(s, s; rho) for 0 <= rho < 1, through
/// the Owen identity Phi2(s,s;rho) = Phi(s) - 2 T(s, a) with
/// a = sqrt((1-rho)/(1+rho)). This form stays accurate as rho -> 1 where
/// direct differencing of Phi values cancels catastrophically.
pub fn bivariate_orthant_cdf(s: f64, rho: Correlation) -> Result<f64> {
    if !s.is_finite() {
        return domain(format!("bivariate_orthant_cdf: non-finite threshold {s}"));
    }
    let r = rho.get();
    if r < 0.0 {
        return domain(format!(
            "bivariate_orthant_cdf: rho = {r} negative; only rho in [0, 1) supported"
        ));
    }
    if r >= 1.0 - 1e-12 {
        return domain(format!(
            "bivariate_orthant_cdf: rho = {r} too close to 1; use the analytic limit"
        ));
    }
    let a = ((1.0 - r) / (1.0 + r)).sqrt();
    Ok(cdf(s) - 2.0 * owens_t_raw(s, a))
}

/// General bivariate CDF P(X < x, Y < y) for correlation in (-1, 1), via the
/// classical three-term Owen decomposition.
pub fn bivariate_cdf(x: f64, y: f64, rho: Correlation) -> Result<f64> {
    if !x.is_finite() || !y.is_finite() {
        return domain(format!("bivariate_cdf: non-finite threshold ({x}, {y})"));
    }
    let r = rho.get();
    if r.abs() >= 1.0 - 1e-12 {
        return domain(format!(
            "bivariate_cdf: |rho| = {} too close to 1; use the analytic limit",
            r.abs()
        ));
    }
    Ok(cdf_raw(x, y, r))
}

/// Unchecked general bivariate CDF; caller guarantees |r| < 1.
pub(crate) fn cdf_raw(x: f64, y: f64, r: f64) -> f64 {
    if r == 0.0 {
        return cdf(x) * cdf(y);
    }
    if x == 0.0 && y == 0.0 {
        return 0.25 + r.asin() / (2.0 * std::f64::consts::PI);
    }
    let denom = ((1.0 - r) * (1.0 + r)).sqrt();
    let term = |h: f64, k: f64| -> f64 {
        if h == 0.0 {
            // T(0, +-inf) limit of the second term
            return 0.25 - if k > 0.0 { 0.25 } else { -0.25 };
        }
        0.5 * cdf(h) - owens_t_raw(h, (k / h - r) / denom)
    };
    let mut val = term(x, y) + term(y, x);
    if x * y < 0.0 || (x * y == 0.0 && x + y < 0.0) {
        val -= 0.5;
    }
    val.clamp(0.0, 1.0)
}
