//! Exact Gilbert-Elliott link parameters from thresholded Gaussian fading.
//!
//! A slotted link is "bad" whenever a stationary Gaussian process sits
//! above a threshold. This crate maps the process's covariance kernel to
//! the two-state chain that best matches the slot-to-slot behaviour, in
//! closed form via Owen's T-function, and then turns the usual modelling
//! question around: instead of fitting a Gilbert-Elliott chain to packet
//! traces, it predicts the chain from physics and quantifies exactly how
//! non-Markov the resulting binary process is.
//!
//! The pieces:
//!
//! * [`kernels`]: squared-exponential and exponential covariance kernels
//!   and their slot-lag correlations.
//! * [`bridge`]: the closed-form map rho -> (p01, p10, dwell and
//!   persistence times), plus slow-fading asymptotics.
//! * [`sim`]: exact trace simulation (AR(1) or dense Cholesky) with a
//!   counter-based RNG, and transition/persistence estimators.
//! * [`diagnostics`]: Markov-gap and run-length fidelity metrics, exact
//!   and empirical.
//! * [`special`]: the underlying normal, Owen's T, and orthant routines.
//!
//! With the default `parallel` feature, replicates fan out over rayon;
//! disable it for a dependency-light sequential build with identical
//! output.

// coefficient tables ship with every published digit
#![allow(clippy::excessive_precision)]

pub mod bridge;
pub mod diagnostics;
mod error;
pub mod kernels;
pub mod parallel;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
