//! Scalar special functions: normal pdf/cdf/quantile, Owen's T-function, and
//! the bivariate/trivariate orthant probabilities built on top of them.
//!
//! Everything here is a pure function of its inputs (bit-identical outputs on
//! repeated calls) and safe to call from any thread.

mod bivariate;
mod normal;
mod owens;
pub(crate) mod quad;
mod trivariate;

pub use bivariate::{bivariate_cdf, bivariate_orthant_cdf};
pub use normal::{inverse_normal_cdf, normal_cdf, normal_pdf};
pub use owens::owens_t;
pub use trivariate::trivariate_orthant;

pub(crate) use normal::{cdf as normal_cdf_raw, pdf as normal_pdf_raw, quantile};
pub(crate) use owens::owens_t_raw;

use crate::error::{domain, Result};

/// A correlation coefficient, checked to lie in [-1, 1].
///
/// The closed interval is admitted so that kernel evaluations that round to
/// exactly 1 can still be represented; every probability operation taking a
/// `Correlation` rejects values within 1e-12 of +-1 itself.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Correlation(f64);

impl Correlation {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || !(-1.0..=1.0).contains(&rho) {
            return domain(format!("correlation {rho} outside [-1, 1]"));
        }
        Ok(Self(rho))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Correlation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}
