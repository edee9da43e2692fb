//! Closed-form Gilbert-Elliott parameters for a thresholded stationary
//! Gaussian process.
//!
//! With slot marginals X_n ~ N(0, sigma^2), normalized threshold
//! s = S/sigma, and one-step correlation rho, the slot indicator
//! B_n = 1{X_n >= S} is approximated by a 2-state chain whose transition
//! probabilities come from the Gaussian crossing probability
//!
//! ```text
//! N = P(B_n = 1, B_{n+1} = 0) = Phi(s) - Phi_2(s, s; rho) = 2 T(s, a),
//! a = sqrt((1 - rho) / (1 + rho)),
//! ```
//!
//! where T is Owen's T-function. Everything else is bookkeeping:
//! p01 = N/q, p10 = N/(1-q) with q = Phi(s), and the mean first-order
//! persistence time D (q^2 + (1-q)^2) / N.

use crate::error::{domain, Result};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::special::{self, Correlation};
use serde::Serialize;

/// Slot spacing `d` (> 0) and normalized threshold `s_norm` = S/sigma
/// (finite; |s_norm| <= 8 keeps both orthant masses well above underflow).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkConfig {
    d: f64,
    s_norm: f64,
}

impl LinkConfig {
    pub fn new(d: f64, s_norm: f64) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 {
            return domain(format!("slot spacing d = {d} must be > 0"));
        }
        if !s_norm.is_finite() || s_norm.abs() > 8.0 {
            return domain(format!(
                "normalized threshold s = {s_norm} must be finite with |s| <= 8"
            ));
        }
        Ok(Self { d, s_norm })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn s_norm(&self) -> f64 {
        self.s_norm
    }
}

/// The derived chain. Probabilities are per slot; `dwell0`, `dwell1` and
/// `persistence` are in time units (multiples of `d`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeParams {
    /// P(good -> bad), i.e. out of the below-threshold state.
    pub p01: f64,
    /// P(bad -> good).
    pub p10: f64,
    /// Stationary probability of state 0 (below threshold), = Phi(s).
    pub pi0: f64,
    /// Stationary probability of state 1, = 1 - Phi(s).
    pub pi1: f64,
    /// Mean sojourn time in state 0: d / p01.
    pub dwell0: f64,
    /// Mean sojourn time in state 1: d / p10.
    pub dwell1: f64,
    /// Mean time the chain keeps its current (stationary) state:
    /// d (pi0^2 + pi1^2) / N.
    pub persistence: f64,
    /// Marginal below-threshold probability Phi(s); equals pi0.
    pub q: f64,
    /// Per-slot crossing probability N = P(B_n = 1, B_{n+1} = 0).
    pub n_cross: f64,
}

/// Core map rho -> GE parameters. Rejects rho < 0 (not produced by the
/// supported kernels, and the thresholded chain would not be a sensible
/// burst model) and rho within 1e-12 of 1, where N underflows the
/// closed form's conditioning; callers in that regime hold a frozen
/// channel and should use the asymptotics instead.
pub fn ge_params_from_rho(rho: Correlation, cfg: &LinkConfig) -> Result<GeParams> {
    let r = rho.get();
    if r < 0.0 {
        return domain(format!("one-step correlation rho = {r} must be >= 0"));
    }
    if r >= 1.0 - 1e-12 {
        return domain(format!(
            "rho = {r} is a frozen channel; use the asymptotics instead"
        ));
    }
    let s = cfg.s_norm;
    let q = special::normal_cdf_raw(s);
    let qc = special::normal_cdf_raw(-s);
    let a = ((1.0 - r) / (1.0 + r)).sqrt();
    let n = 2.0 * special::owens_t_raw(s, a);
    // |s| <= 8 and rho < 1 - 1e-12 keep all three strictly inside (0, 1)
    debug_assert!(n > 0.0 && q > 0.0 && qc > 0.0);
    Ok(GeParams {
        p01: n / q,
        p10: n / qc,
        pi0: q,
        pi1: qc,
        dwell0: cfg.d / (n / q),
        dwell1: cfg.d / (n / qc),
        persistence: cfg.d * (q * q + qc * qc) / n,
        q,
        n_cross: n,
    })
}

/// GE parameters straight from a kernel: rho = K(d)/K(0).
pub fn ge_params(kernel: &KernelSpec, cfg: &LinkConfig) -> Result<GeParams> {
    let rho = crate::kernels::one_step_correlation(kernel, cfg.d)?;
    ge_params_from_rho(rho, cfg)
}

/// Median threshold (s = 0) persistence in closed form:
/// 2 d / (1 - (2/pi) arcsin rho). Exercises the arcsine reduction of the
/// crossing probability, so it is a useful cross-check against
/// [`ge_params_from_rho`], which routes through Owen's T.
pub fn persistence_symmetric(rho: Correlation, d: f64) -> Result<f64> {
    let r = rho.get();
    if !d.is_finite() || d <= 0.0 {
        return domain(format!("slot spacing d = {d} must be > 0"));
    }
    if r < 0.0 {
        return domain(format!("one-step correlation rho = {r} must be >= 0"));
    }
    if r >= 1.0 - 1e-12 {
        return domain(format!(
            "rho = {r} is a frozen channel; use the asymptotics instead"
        ));
    }
    Ok(2.0 * d / (1.0 - std::f64::consts::FRAC_2_PI * libm::asin(r)))
}

/// Leading-order crossing probability as rho -> 1:
/// N ~ phi(s) sqrt((1 - rho) / pi).
pub fn asymptotic_crossing(rho: Correlation, s_norm: f64) -> Result<f64> {
    if !s_norm.is_finite() {
        return domain("threshold must be finite".to_string());
    }
    let r = rho.get();
    if r < 0.0 {
        return domain(format!("one-step correlation rho = {r} must be >= 0"));
    }
    Ok(special::normal_pdf_raw(s_norm) * ((1.0 - r) / std::f64::consts::PI).sqrt())
}

/// Threshold-dependent coefficient in the slow-fading persistence laws:
/// c(s) = sqrt(pi) (Phi(s)^2 + Phi(-s)^2) / phi(s). c(0) = pi/sqrt(2).
pub fn asymptotic_persistence_coefficient(s_norm: f64) -> Result<f64> {
    if !s_norm.is_finite() || s_norm.abs() > 8.0 {
        return domain(format!(
            "normalized threshold s = {s_norm} must be finite with |s| <= 8"
        ));
    }
    let q = special::normal_cdf_raw(s_norm);
    let qc = special::normal_cdf_raw(-s_norm);
    Ok(std::f64::consts::PI.sqrt() * (q * q + qc * qc) / special::normal_pdf_raw(s_norm))
}

/// Slow-fading (t_c >> d) persistence law: c(s) t_c for the squared
/// exponential kernel, c(s) sqrt(d t_c) for the exponential kernel. The
/// slot spacing survives only in the exponential case, through the cusp.
pub fn asymptotic_persistence(kernel: &KernelSpec, cfg: &LinkConfig) -> Result<f64> {
    let c = asymptotic_persistence_coefficient(cfg.s_norm)?;
    Ok(match kernel.family() {
        KernelFamily::SquaredExponential => c * kernel.t_c(),
        KernelFamily::Exponential => c * (cfg.d * kernel.t_c()).sqrt(),
    })
}
