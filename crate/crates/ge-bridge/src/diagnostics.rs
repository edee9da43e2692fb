//! How wrong is the first-order chain? Markov-gap and run-length
//! diagnostics, both in closed form and from simulated traces.
//!
//! The Markov gap at context (i, j) is
//!
//! ```text
//! gap(i,j) = | P(B_2 = 1 | B_1 = j, B_0 = i) - P(B_2 = 1 | B_1 = j) |,
//! ```
//!
//! zero for every context iff the binary process is first-order Markov.
//! The exact version needs nothing beyond trivariate orthant mass in
//! (rho_1, rho_2); the empirical version counts pooled triples. Run-length
//! diagnostics compare the observed sojourn distribution in state 1 against
//! the geometric law implied by the chain and against a two-phase
//! (entry/dwell) refinement fitted from the same triple counts.

use crate::bridge::{self, LinkConfig};
use crate::error::{domain, Error, Result};
use crate::kernels::{self, KernelSpec};
use crate::sim::{self, BinaryTrace, SimPlan};
use crate::special;
use serde::Serialize;

/// Per-context gaps, indexed gap[i][j] for context (B_0 = i, B_1 = j).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MarkovGaps {
    pub gap: [[f64; 2]; 2],
}

impl MarkovGaps {
    pub fn max(&self) -> f64 {
        self.gap.iter().flatten().fold(0.0f64, |acc, &g| acc.max(g))
    }
}

/// Exact Markov gaps for a thresholded kernel, via inclusion-exclusion on
/// the orthant masses of (X_0, X_1, X_2).
pub fn markov_gap_exact(kernel: &KernelSpec, cfg: &LinkConfig) -> Result<MarkovGaps> {
    let rho1 = kernels::one_step_correlation(kernel, cfg.d())?;
    let rho2 = kernels::lag_k_correlation(kernel, cfg.d(), 2)?;
    let s = cfg.s_norm();
    let ge = bridge::ge_params(kernel, cfg)?;

    let q = ge.q;
    let b1 = special::bivariate_orthant_cdf(s, rho1)?;
    let b2 = special::bivariate_orthant_cdf(s, rho2)?;
    let f3 = special::trivariate_orthant((s, s, s), rho1, rho2)?;

    // triple masses p_ijk = P(B_0 = i, B_1 = j, B_2 = k)
    let p001 = b1 - f3;
    let p011 = q - b1 - b2 + f3;
    let p101 = q - 2.0 * b1 + f3;
    let p111 = 1.0 - 3.0 * q + 2.0 * b1 + b2 - f3;

    // context masses p_ij. = P(B_0 = i, B_1 = j)
    let p00 = b1;
    let p01 = q - b1;
    let p10 = q - b1;
    let p11 = 1.0 - 2.0 * q + b1;
    for (name, m) in [("00", p00), ("01", p01), ("10", p10), ("11", p11)] {
        if m <= 1e-300 {
            return domain(format!(
                "context {name} has vanishing probability; channel nearly frozen"
            ));
        }
    }

    // one-step predictions
    let up0 = ge.p01; // P(B_2 = 1 | B_1 = 0)
    let up1 = 1.0 - ge.p10; // P(B_2 = 1 | B_1 = 1)

    Ok(MarkovGaps {
        gap: [
            [(p001 / p00 - up0).abs(), (p011 / p01 - up1).abs()],
            [(p101 / p10 - up0).abs(), (p111 / p11 - up1).abs()],
        ],
    })
}

/// Empirical gaps from pooled triple counts.
#[derive(Debug, Clone, Serialize)]
pub struct GapEstimate {
    pub gaps: MarkovGaps,
    /// Pooled triple counts per context: context_counts[i][j] is the number
    /// of observed (B_t = i, B_{t+1} = j) pairs with a successor slot.
    pub context_counts: [[u64; 2]; 2],
}

impl GapEstimate {
    /// True when some context has fewer than 100 pooled observations, in
    /// which case its gap estimate is mostly prior.
    pub fn underpowered(&self) -> bool {
        self.context_counts.iter().flatten().any(|&c| c < 100)
    }
}

pub(crate) struct TripleCounts {
    /// n[i][j][k]: pooled count of (B_t, B_{t+1}, B_{t+2}) = (i, j, k).
    pub n: [[[u64; 2]; 2]; 2],
}

pub(crate) fn count_triples(traces: &[BinaryTrace]) -> TripleCounts {
    let mut n = [[[0u64; 2]; 2]; 2];
    for t in traces {
        for w in t.bits().windows(3) {
            n[w[0] as usize][w[1] as usize][w[2] as usize] += 1;
        }
    }
    TripleCounts { n }
}

fn jeffreys(n_hit: u64, n_tot: u64) -> f64 {
    (n_hit as f64 + 0.5) / (n_tot as f64 + 1.0)
}

/// Markov gaps from traces: triple-conditioned continuation probabilities
/// (Jeffreys) minus pair-conditioned ones, all pooled over replicates.
pub fn markov_gap_empirical(traces: &[BinaryTrace]) -> Result<GapEstimate> {
    if traces.is_empty() {
        return domain("no traces to estimate from".to_string());
    }
    let trip = count_triples(traces);
    let mut pair = [[0u64; 2]; 2];
    for t in traces {
        for w in t.bits().windows(2) {
            pair[w[0] as usize][w[1] as usize] += 1;
        }
    }
    let up = [
        jeffreys(pair[0][1], pair[0][0] + pair[0][1]),
        jeffreys(pair[1][1], pair[1][0] + pair[1][1]),
    ];
    let mut gap = [[0.0f64; 2]; 2];
    let mut counts = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let tot = trip.n[i][j][0] + trip.n[i][j][1];
            counts[i][j] = tot;
            gap[i][j] = (jeffreys(trip.n[i][j][1], tot) - up[j]).abs();
        }
    }
    Ok(GapEstimate {
        gaps: MarkovGaps { gap },
        context_counts: counts,
    })
}

/// Completed sojourns of `state`: maximal runs not touching either end of
/// the trace (boundary runs are censored and dropped).
pub fn extract_runs(trace: &BinaryTrace, state: u8) -> Vec<usize> {
    let bits = trace.bits();
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &b) in bits.iter().enumerate() {
        match (b == state, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if s > 0 {
                    runs.push(i - s);
                }
                start = None;
            }
            _ => {}
        }
    }
    // a run still open at the end is censored; and a run that began at
    // slot 0 was already excluded above
    runs
}

/// Run-length distribution truncated at `k_max`, with the excess in
/// `tail_mass`. `pmf[k-1]` is the probability of a run of exactly k slots.
#[derive(Debug, Clone, Serialize)]
pub struct RunLengthDist {
    pub pmf: Vec<f64>,
    pub state: u8,
    pub tail_mass: f64,
}

impl RunLengthDist {
    pub fn from_runs(runs: &[usize], k_max: usize, state: u8) -> Result<Self> {
        if k_max < 1 {
            return domain("k_max must be >= 1".to_string());
        }
        if runs.is_empty() {
            return domain(format!(
                "no completed runs of state {state}; traces too short or threshold too extreme"
            ));
        }
        let mut pmf = vec![0.0; k_max];
        let mut tail = 0.0;
        let w = 1.0 / runs.len() as f64;
        for &r in runs {
            debug_assert!(r >= 1);
            if r <= k_max {
                pmf[r - 1] += w;
            } else {
                tail += w;
            }
        }
        Ok(Self {
            pmf,
            state,
            tail_mass: tail,
        })
    }

    pub fn k_max(&self) -> usize {
        self.pmf.len()
    }

    pub fn mean(&self) -> f64 {
        // tail bucket contributes at least k_max + 1 per run; good enough
        // for sanity checks, not used in the TV metrics
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum::<f64>()
            + self.tail_mass * (self.k_max() + 1) as f64
    }
}

/// Geometric sojourn law of the first-order chain: staying probability
/// 1 - p per slot, pmf(k) = (1-p)^(k-1) p, tail (1-p)^k_max.
pub fn ge_runlength_pmf(p: f64, k_max: usize, state: u8) -> Result<RunLengthDist> {
    if !(p > 0.0 && p <= 1.0) {
        return domain(format!("exit probability p = {p} must be in (0, 1]"));
    }
    if k_max < 1 {
        return domain("k_max must be >= 1".to_string());
    }
    let mut pmf = Vec::with_capacity(k_max);
    let mut survive = 1.0;
    for _ in 0..k_max {
        pmf.push(survive * p);
        survive *= 1.0 - p;
    }
    Ok(RunLengthDist {
        pmf,
        state,
        tail_mass: survive,
    })
}

/// Two-phase sojourn law distinguishing the entry slot from later dwell:
/// continue past the first slot w.p. `a`, then past each later slot w.p.
/// `b`. pmf(1) = 1-a, pmf(k>=2) = a b^(k-2) (1-b), tail a b^(k_max - 1).
/// With a = b it collapses to the geometric law above.
pub fn second_order_runlength_pmf(
    a: f64,
    b: f64,
    k_max: usize,
    state: u8,
) -> Result<RunLengthDist> {
    if !(0.0..=1.0).contains(&a) {
        return domain(format!("entry continuation a = {a} must be in [0, 1]"));
    }
    if !(0.0..1.0).contains(&b) {
        return domain(format!("dwell continuation b = {b} must be in [0, 1)"));
    }
    if k_max < 1 {
        return domain("k_max must be >= 1".to_string());
    }
    let mut pmf = Vec::with_capacity(k_max);
    pmf.push(1.0 - a);
    let mut mass = a; // probability of reaching length >= k for k = 2
    for _ in 1..k_max {
        pmf.push(mass * (1.0 - b));
        mass *= b;
    }
    Ok(RunLengthDist {
        pmf,
        state,
        tail_mass: mass,
    })
}

/// Total variation distance between two truncated run-length laws with the
/// same support (k_max and state must match), counting the tail bucket as
/// one more cell.
pub fn tv_distance(p: &RunLengthDist, q: &RunLengthDist) -> Result<f64> {
    if p.pmf.len() != q.pmf.len() {
        return Err(Error::SupportMismatch {
            left: p.pmf.len(),
            right: q.pmf.len(),
        });
    }
    if p.state != q.state {
        return domain(format!(
            "run-length laws describe different states ({} vs {})",
            p.state, q.state
        ));
    }
    let body: f64 = p.pmf.iter().zip(&q.pmf).map(|(a, b)| (a - b).abs()).sum();
    Ok(0.5 * (body + (p.tail_mass - q.tail_mass).abs()))
}

/// Estimation conventions baked into a [`FidelityReport`], echoed so the
/// numbers can be reproduced without reading the source.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Conventions {
    pub estimator: &'static str,
    pub run_censoring: &'static str,
    pub k_max_rule: &'static str,
}

const CONVENTIONS: Conventions = Conventions {
    estimator: "jeffreys (n+1/2)/(n+1), pooled over replicates",
    run_censoring: "runs touching either trace boundary dropped",
    k_max_rule: "min(ceil(10/p10_closed), n_slots)",
};

/// One configuration's full fidelity diagnostics: empirical and exact
/// Markov gaps, run-length TV distances against the geometric and
/// two-phase laws, and the persistence-time error of the closed form.
#[derive(Debug, Clone, Serialize)]
pub struct FidelityReport {
    pub kernel: KernelSpec,
    pub tc_over_d: f64,
    pub s_norm: f64,
    pub seed: u64,
    pub n_slots: usize,
    pub n_reps: usize,

    pub max_markov_gap: f64,
    pub markov_gaps: MarkovGaps,
    pub exact_max_gap: f64,
    pub exact_gaps: MarkovGaps,
    pub gap_context_counts: [[u64; 2]; 2],
    pub low_count_contexts: bool,

    pub k_max: usize,
    pub n_runs: usize,
    pub dtv_ge: f64,
    pub dtv_second: f64,

    pub persistence_mc: f64,
    pub persistence_closed: f64,
    pub persistence_rel_err_pct: f64,
    pub degenerate_reps: usize,

    pub conventions: Conventions,
}

/// The three run-length laws behind a report's TV distances, plus the
/// fitted two-phase continuation probabilities.
#[derive(Debug, Clone, Serialize)]
pub struct RunLengthCurves {
    pub empirical: RunLengthDist,
    pub geometric: RunLengthDist,
    pub two_phase: RunLengthDist,
    pub entry_continuation: f64,
    pub dwell_continuation: f64,
}

/// Simulate the plan and assemble the full report. Pooled estimators
/// throughout: transition rates and occupancy from all replicates jointly,
/// which keeps the small-sample Jeffreys bias independent of how the slot
/// budget is split across replicates.
pub fn build_report(plan: &SimPlan) -> Result<FidelityReport> {
    build_report_with_curves(plan).map(|(report, _)| report)
}

/// [`build_report`] plus the run-length laws themselves, for callers that
/// want to plot the distributions rather than just their TV distances.
pub fn build_report_with_curves(plan: &SimPlan) -> Result<(FidelityReport, RunLengthCurves)> {
    let kernel = *plan.kernel();
    let cfg = *plan.cfg();
    let closed = bridge::ge_params(&kernel, &cfg)?;
    let exact = markov_gap_exact(&kernel, &cfg)?;

    let traces = sim::simulate(plan)?;
    let est = sim::estimate_transitions(&traces)?;
    let gaps = markov_gap_empirical(&traces)?;

    // pooled rates and occupancy
    let n0 = est.counts[0][0] + est.counts[0][1];
    let n1 = est.counts[1][0] + est.counts[1][1];
    let p01 = jeffreys(est.counts[0][1], n0);
    let p10 = jeffreys(est.counts[1][0], n1);
    let slots = (plan.n_slots() * plan.n_reps()) as f64;
    let ones: u64 = traces
        .iter()
        .map(|t| t.bits().iter().map(|&b| u64::from(b)).sum::<u64>())
        .sum();
    let pi1 = ones as f64 / slots;
    let pi0 = 1.0 - pi1;
    let persistence_mc = cfg.d() * (pi0 / p01 + pi1 / p10);
    let rel_err_pct = 100.0 * (persistence_mc - closed.persistence).abs() / closed.persistence;

    // run-length laws in state 1
    let k_max = ((10.0 / closed.p10).ceil() as usize).clamp(1, plan.n_slots());
    let mut runs = Vec::new();
    for t in &traces {
        runs.extend(extract_runs(t, 1));
    }
    let emp = RunLengthDist::from_runs(&runs, k_max, 1)?;
    let geom = ge_runlength_pmf(closed.p10, k_max, 1)?;
    let trip = count_triples(&traces);
    let a = jeffreys(trip.n[0][1][1], trip.n[0][1][0] + trip.n[0][1][1]);
    let b = jeffreys(trip.n[1][1][1], trip.n[1][1][0] + trip.n[1][1][1]);
    let second = second_order_runlength_pmf(a, b, k_max, 1)?;

    let report = FidelityReport {
        kernel,
        tc_over_d: kernel.t_c() / cfg.d(),
        s_norm: cfg.s_norm(),
        seed: plan.seed(),
        n_slots: plan.n_slots(),
        n_reps: plan.n_reps(),
        max_markov_gap: gaps.gaps.max(),
        markov_gaps: gaps.gaps,
        exact_max_gap: exact.max(),
        exact_gaps: exact,
        gap_context_counts: gaps.context_counts,
        low_count_contexts: gaps.underpowered(),
        k_max,
        n_runs: runs.len(),
        dtv_ge: tv_distance(&emp, &geom)?,
        dtv_second: tv_distance(&emp, &second)?,
        persistence_mc,
        persistence_closed: closed.persistence,
        persistence_rel_err_pct: rel_err_pct,
        degenerate_reps: est.degenerate_reps,
        conventions: CONVENTIONS,
    };
    let curves = RunLengthCurves {
        empirical: emp,
        geometric: geom,
        two_phase: second,
        entry_continuation: a,
        dwell_continuation: b,
    };
    Ok((report, curves))
}
