//! Monte Carlo validation: exact sampling of the latent Gaussian path,
//! thresholding, and transition/persistence estimation.
//!
//! Replicates are drawn with a counter-based generator, so a given
//! (seed, rep) pair yields the same trace whether replicates run
//! sequentially, in parallel, or out of order.

mod io;
mod rng;
mod sampler;

pub use io::{read_traces_binary, read_traces_text, write_traces_binary, write_traces_text};

use crate::bridge::LinkConfig;
use crate::error::{domain, Result};
use crate::kernels::KernelSpec;
use crate::parallel;
use sampler::PathSampler;
use serde::Serialize;

pub const DEFAULT_N_SLOTS: usize = 1200;
pub const DEFAULT_N_REPS: usize = 250;
/// Default protocol seed. Chosen so the counter stream it keys has
/// unremarkable short-lag statistics; every replicate shares the same
/// (rep, slot) variates across configs, so a seed whose stream draws an
/// atypical lag-1 correlation would tilt all estimates in lockstep.
pub const DEFAULT_SEED: u64 = 555555;

/// Everything needed to reproduce an experiment: kernel, link geometry,
/// grid dimensions, and the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimPlan {
    kernel: KernelSpec,
    cfg: LinkConfig,
    n_slots: usize,
    n_reps: usize,
    seed: u64,
}

impl SimPlan {
    /// Plan with the default grid of 1200 slots x 250 replicates.
    pub fn new(kernel: KernelSpec, cfg: LinkConfig, seed: u64) -> Self {
        Self {
            kernel,
            cfg,
            n_slots: DEFAULT_N_SLOTS,
            n_reps: DEFAULT_N_REPS,
            seed,
        }
    }

    /// Override the grid. At least 2 slots (one transition) and 1 replicate.
    pub fn with_dims(mut self, n_slots: usize, n_reps: usize) -> Result<Self> {
        if n_slots < 2 {
            return domain(format!("n_slots = {n_slots} must be >= 2"));
        }
        if n_reps < 1 {
            return domain("n_reps must be >= 1".to_string());
        }
        self.n_slots = n_slots;
        self.n_reps = n_reps;
        Ok(self)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn cfg(&self) -> &LinkConfig {
        &self.cfg
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn n_reps(&self) -> usize {
        self.n_reps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Absolute threshold S = s_norm * sigma.
    fn s_abs(&self) -> f64 {
        self.cfg.s_norm() * self.kernel.sigma2().sqrt()
    }
}

/// A thresholded replicate: one byte per slot, 1 above threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTrace {
    bits: Vec<u8>,
    seed: u64,
    rep: u32,
}

impl BinaryTrace {
    /// Wrap raw bits with no sampling provenance (seed and rep read 0).
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self {
            bits,
            seed: 0,
            rep: 0,
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rep(&self) -> u32 {
        self.rep
    }
}

/// One latent path replicate, exact to the kernel's finite-dimensional law.
/// Builds the sampler from scratch each call; for many replicates of one
/// plan use [`simulate`], which factors the covariance once.
pub fn sample_gaussian_path(plan: &SimPlan, rep: u32) -> Result<Vec<f64>> {
    let s = PathSampler::new(&plan.kernel, plan.cfg.d(), plan.n_slots)?;
    Ok(s.path(plan.seed, u64::from(rep)))
}

/// Slot indicator B_n = 1{X_n >= s_abs}. Boundary slots count as 1, though
/// for a continuous marginal the boundary has probability zero.
pub fn threshold(path: &[f64], s_abs: f64) -> BinaryTrace {
    BinaryTrace::from_bits(path.iter().map(|&x| u8::from(x >= s_abs)).collect())
}

fn one_rep(plan: &SimPlan, sampler: &PathSampler, s_abs: f64, rep: usize) -> BinaryTrace {
    let path = sampler.path(plan.seed, rep as u64);
    let mut t = threshold(&path, s_abs);
    t.seed = plan.seed;
    t.rep = rep as u32;
    t
}

/// All replicates of the plan, in replicate order.
pub fn simulate(plan: &SimPlan) -> Result<Vec<BinaryTrace>> {
    let sampler = PathSampler::new(&plan.kernel, plan.cfg.d(), plan.n_slots)?;
    let s_abs = plan.s_abs();
    Ok(parallel::map_indexed(plan.n_reps, |rep| {
        one_rep(plan, &sampler, s_abs, rep)
    }))
}

/// Same result as [`simulate`] on the calling thread, bit for bit; exists so
/// benchmarks can compare the two paths within one build.
pub fn simulate_sequential(plan: &SimPlan) -> Result<Vec<BinaryTrace>> {
    let sampler = PathSampler::new(&plan.kernel, plan.cfg.d(), plan.n_slots)?;
    let s_abs = plan.s_abs();
    Ok(parallel::map_indexed_seq(plan.n_reps, |rep| {
        one_rep(plan, &sampler, s_abs, rep)
    }))
}

/// Per-replicate Jeffreys transition estimates, averaged across replicates.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionEstimate {
    /// Mean over replicates of the per-replicate posterior-mean estimate
    /// (n01 + 1/2) / (n0 + 1).
    pub p01_hat: f64,
    pub p10_hat: f64,
    /// 95% half-widths, 1.96 x the standard error of the mean across
    /// replicates (0 for a single replicate).
    pub p01_ci95: f64,
    pub p10_ci95: f64,
    /// Pooled transition counts over all replicates: counts[i][j] is the
    /// number of observed i -> j steps.
    pub counts: [[u64; 2]; 2],
    /// Replicates where some origin state was never visited; their
    /// estimate for that row sits at the Jeffreys prior mean 1/2.
    pub degenerate_reps: usize,
    pub n_reps: usize,
}

fn rep_counts(bits: &[u8]) -> [[u64; 2]; 2] {
    let mut c = [[0u64; 2]; 2];
    for w in bits.windows(2) {
        c[w[0] as usize][w[1] as usize] += 1;
    }
    c
}

fn jeffreys(n_out: u64, n_tot: u64) -> f64 {
    (n_out as f64 + 0.5) / (n_tot as f64 + 1.0)
}

pub fn estimate_transitions(traces: &[BinaryTrace]) -> Result<TransitionEstimate> {
    if traces.is_empty() {
        return domain("no traces to estimate from".to_string());
    }
    if let Some(t) = traces.iter().find(|t| t.len() < 2) {
        return domain(format!("trace of length {} has no transitions", t.len()));
    }
    let mut counts = [[0u64; 2]; 2];
    let mut p01s = Vec::with_capacity(traces.len());
    let mut p10s = Vec::with_capacity(traces.len());
    let mut degenerate = 0usize;
    for t in traces {
        let c = rep_counts(&t.bits);
        for i in 0..2 {
            for j in 0..2 {
                counts[i][j] += c[i][j];
            }
        }
        let n0 = c[0][0] + c[0][1];
        let n1 = c[1][0] + c[1][1];
        if n0 == 0 || n1 == 0 {
            degenerate += 1;
        }
        p01s.push(jeffreys(c[0][1], n0));
        p10s.push(jeffreys(c[1][0], n1));
    }
    let (p01_hat, p01_ci95) = mean_ci(&p01s);
    let (p10_hat, p10_ci95) = mean_ci(&p10s);
    Ok(TransitionEstimate {
        p01_hat,
        p10_hat,
        p01_ci95,
        p10_ci95,
        counts,
        degenerate_reps: degenerate,
        n_reps: traces.len(),
    })
}

/// Mean and 1.96 x standard error of the mean.
fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

/// Per-replicate persistence estimate, averaged across replicates.
#[derive(Debug, Clone, Serialize)]
pub struct PersistenceEstimate {
    pub mean: f64,
    /// 95% half-width across replicates.
    pub ci95: f64,
    pub degenerate_reps: usize,
    pub n_reps: usize,
}

/// Estimate the mean persistence time d (pi0/p01 + pi1/p10) per replicate,
/// with occupancy over all slots and Jeffreys transition rates.
pub fn empirical_persistence(traces: &[BinaryTrace], d: f64) -> Result<PersistenceEstimate> {
    if !d.is_finite() || d <= 0.0 {
        return domain(format!("slot spacing d = {d} must be > 0"));
    }
    if traces.is_empty() {
        return domain("no traces to estimate from".to_string());
    }
    let mut vals = Vec::with_capacity(traces.len());
    let mut degenerate = 0usize;
    for t in traces {
        if t.len() < 2 {
            return domain(format!("trace of length {} has no transitions", t.len()));
        }
        let c = rep_counts(&t.bits);
        let n0 = c[0][0] + c[0][1];
        let n1 = c[1][0] + c[1][1];
        if n0 == 0 || n1 == 0 {
            degenerate += 1;
        }
        let ones = t.bits.iter().map(|&b| u64::from(b)).sum::<u64>() as f64;
        let pi1 = ones / t.len() as f64;
        let pi0 = 1.0 - pi1;
        let p01 = jeffreys(c[0][1], n0);
        let p10 = jeffreys(c[1][0], n1);
        vals.push(d * (pi0 / p01 + pi1 / p10));
    }
    let (mean, ci95) = mean_ci(&vals);
    Ok(PersistenceEstimate {
        mean,
        ci95,
        degenerate_reps: degenerate,
        n_reps: traces.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;

    fn plan(tc: f64, s: f64) -> SimPlan {
        let k = KernelSpec::exponential(1.0, tc).unwrap();
        let cfg = LinkConfig::new(1.0, s).unwrap();
        SimPlan::new(k, cfg, 12345)
    }

    #[test]
    fn plan_validation() {
        let p = plan(4.0, 0.0);
        assert_eq!(p.n_slots(), 1200);
        assert_eq!(p.n_reps(), 250);
        assert!(p.with_dims(1, 10).is_err());
        assert!(p.with_dims(10, 0).is_err());
        let p = p.with_dims(64, 3).unwrap();
        assert_eq!((p.n_slots(), p.n_reps()), (64, 3));
    }

    #[test]
    fn threshold_boundary_and_provenance() {
        let t = threshold(&[-1.0, 0.0, 0.5, -0.2], 0.0);
        assert_eq!(t.bits(), &[0, 1, 1, 0]);
        assert_eq!((t.seed(), t.rep()), (0, 0));

        let p = plan(4.0, 0.0).with_dims(16, 2).unwrap();
        let traces = simulate(&p).unwrap();
        assert_eq!(traces[1].seed(), 12345);
        assert_eq!(traces[1].rep(), 1);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let p = plan(4.0, 0.5).with_dims(96, 8).unwrap();
        assert_eq!(simulate(&p).unwrap(), simulate_sequential(&p).unwrap());
        let k = KernelSpec::squared_exponential(1.0, 4.0).unwrap();
        let p = SimPlan::new(k, LinkConfig::new(1.0, 0.5).unwrap(), 7)
            .with_dims(64, 6)
            .unwrap();
        assert_eq!(simulate(&p).unwrap(), simulate_sequential(&p).unwrap());
    }

    #[test]
    fn transition_estimates_on_known_traces() {
        // period-2 trace: every 0 goes to 1 and vice versa
        let t = vec![BinaryTrace::from_bits([0, 1].repeat(50))];
        let e = estimate_transitions(&t).unwrap();
        // 50 zeros each followed by 1; 49 completed 1->0 steps
        assert!((e.p01_hat - 50.5 / 51.0).abs() < 1e-15);
        assert!((e.p10_hat - 49.5 / 50.0).abs() < 1e-15);
        assert_eq!(e.counts, [[0, 50], [49, 0]]);
        assert_eq!(e.degenerate_reps, 0);
        assert_eq!(e.p01_ci95, 0.0);

        // all-zeros trace: state 1 never visited, prior takes over
        let t = vec![BinaryTrace::from_bits(vec![0; 100])];
        let e = estimate_transitions(&t).unwrap();
        assert_eq!(e.degenerate_reps, 1);
        assert_eq!(e.p10_hat, 0.5);
        assert!((e.p01_hat - 0.5 / 100.0).abs() < 1e-15);

        assert!(estimate_transitions(&[]).is_err());
        assert!(estimate_transitions(&[BinaryTrace::from_bits(vec![1])]).is_err());
    }

    #[test]
    fn persistence_identity_on_alternating_trace() {
        // alternating trace: pi0 = pi1 = 1/2, both rates near 1,
        // persistence near d
        let t = vec![BinaryTrace::from_bits([0, 1].repeat(500))];
        let e = empirical_persistence(&t, 2.0).unwrap();
        assert!((e.mean - 2.0).abs() < 0.01);
        assert!(empirical_persistence(&t, 0.0).is_err());
    }

    #[test]
    fn estimates_track_closed_form() {
        // moderate correlation, quick plan; 3 sigma tolerance
        let p = plan(4.0, 0.0).with_dims(800, 60).unwrap();
        let traces = simulate(&p).unwrap();
        let e = estimate_transitions(&traces).unwrap();
        let g = crate::bridge::ge_params(p.kernel(), p.cfg()).unwrap();
        assert!(
            (e.p01_hat - g.p01).abs() < 1.6 * e.p01_ci95,
            "{} vs {} +- {}",
            e.p01_hat,
            g.p01,
            e.p01_ci95
        );
        assert!(
            (e.p10_hat - g.p10).abs() < 1.6 * e.p10_ci95,
            "{} vs {} +- {}",
            e.p10_hat,
            g.p10,
            e.p10_ci95
        );
        assert_eq!(e.degenerate_reps, 0);

        let pe = empirical_persistence(&traces, 1.0).unwrap();
        assert!(
            (pe.mean - g.persistence).abs() < 2.5 * pe.ci95.max(0.05),
            "{} vs {}",
            pe.mean,
            g.persistence
        );
    }
}
