//! Stationary covariance kernels and their slot-lag correlations.
//!
//! The link-layer bridge consumes a single number, the one-step correlation
//! rho = K(D)/K(0), so the kernel family is a closed enum: anything not
//! listed here can be plugged in by handing its own rho to
//! [`crate::bridge::ge_params_from_rho`] directly.

use crate::error::{domain, Result};
use crate::special::Correlation;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// K(tau) = sigma^2 exp(-tau^2 / T_c^2); infinitely smooth sample paths.
    #[serde(rename = "sqexp")]
    SquaredExponential,
    /// K(tau) = sigma^2 exp(-|tau| / T_c); cusped at the origin, the latent
    /// process is first-order Markov (discrete-time OU).
    #[serde(rename = "exp")]
    Exponential,
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelFamily::SquaredExponential => "sqexp",
            KernelFamily::Exponential => "exp",
        })
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sqexp" | "sq-exp" | "squared-exponential" => Ok(KernelFamily::SquaredExponential),
            "exp" | "exponential" | "ou" => Ok(KernelFamily::Exponential),
            other => domain(format!(
                "unknown kernel family '{other}' (expected sqexp or exp)"
            )),
        }
    }
}

/// A stationary covariance kernel: family plus marginal variance `sigma2`
/// and correlation length `t_c`, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec {
    family: KernelFamily,
    sigma2: f64,
    t_c: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, sigma2: f64, t_c: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return domain(format!("kernel variance sigma2 = {sigma2} must be > 0"));
        }
        if !t_c.is_finite() || t_c <= 0.0 {
            return domain(format!("correlation length t_c = {t_c} must be > 0"));
        }
        Ok(Self {
            family,
            sigma2,
            t_c,
        })
    }

    pub fn squared_exponential(sigma2: f64, t_c: f64) -> Result<Self> {
        Self::new(KernelFamily::SquaredExponential, sigma2, t_c)
    }

    pub fn exponential(sigma2: f64, t_c: f64) -> Result<Self> {
        Self::new(KernelFamily::Exponential, sigma2, t_c)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn t_c(&self) -> f64 {
        self.t_c
    }
}

/// K(tau).
pub fn evaluate(k: &KernelSpec, tau: f64) -> f64 {
    let u = tau / k.t_c;
    match k.family {
        KernelFamily::SquaredExponential => k.sigma2 * (-u * u).exp(),
        KernelFamily::Exponential => k.sigma2 * (-u.abs()).exp(),
    }
}

/// One-step correlation rho = K(d)/K(0); the only kernel-dependent input to
/// the GE bridge. Note the value can round to exactly 1 for t_c >> d; the
/// bridge rejects that downstream.
pub fn one_step_correlation(k: &KernelSpec, d: f64) -> Result<Correlation> {
    lag_k_correlation(k, d, 1)
}

/// Lag-k correlation rho_k = K(k d)/K(0). For the exponential kernel,
/// rho_k = rho_1^k exactly.
pub fn lag_k_correlation(k: &KernelSpec, d: f64, lag: u32) -> Result<Correlation> {
    if !d.is_finite() || d <= 0.0 {
        return domain(format!("slot spacing d = {d} must be > 0"));
    }
    if lag < 1 {
        return domain("lag must be >= 1".to_string());
    }
    let u = f64::from(lag) * d / k.t_c;
    let rho = match k.family {
        KernelFamily::SquaredExponential => (-u * u).exp(),
        KernelFamily::Exponential => (-u).exp(),
    };
    Correlation::new(rho)
}

/// The first-order-Markov defect rho_2 - rho_1^2 of the sampled chain: zero
/// iff the lag correlations satisfy the semigroup property, negative for the
/// squared-exponential kernel (about -2 d^2/t_c^2 for t_c >> d).
pub fn markov_defect(k: &KernelSpec, d: f64) -> Result<f64> {
    let r1 = lag_k_correlation(k, d, 1)?.get();
    let r2 = lag_k_correlation(k, d, 2)?.get();
    Ok(r2 - r1 * r1)
}
