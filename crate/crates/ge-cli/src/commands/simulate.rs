//! Run the Monte Carlo plan, optionally persist the traces, and summarize
//! the transition estimates against the closed form.

use crate::config::Params;
use crate::output::{to_json, Csv, Format};
use ge_bridge::bridge::{ge_params, LinkConfig};
use ge_bridge::kernels::KernelSpec;
use ge_bridge::sim::{
    empirical_persistence, estimate_transitions, simulate, write_traces_binary, write_traces_text,
    SimPlan,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Text,
    Binary,
}

impl std::str::FromStr for TraceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(TraceFormat::Text),
            "binary" => Ok(TraceFormat::Binary),
            other => Err(format!(
                "unknown trace format '{other}' (expected text or binary)"
            )),
        }
    }
}

#[derive(Serialize)]
struct SimulateOut {
    seed: u64,
    kernel: KernelSpec,
    d: f64,
    s_norm: f64,
    n_slots: usize,
    n_reps: usize,
    p01_hat: f64,
    p01_ci95: f64,
    p10_hat: f64,
    p10_ci95: f64,
    p01_closed: f64,
    p10_closed: f64,
    counts: [[u64; 2]; 2],
    degenerate_reps: usize,
    persistence_mc: f64,
    persistence_mc_ci95: f64,
    persistence_closed: f64,
    traces_written: Option<PathBuf>,
}

pub fn run(
    p: &Params,
    format: Format,
    traces_path: Option<&Path>,
    trace_format: TraceFormat,
) -> Result<String, String> {
    let kernel = p.kernel_spec()?;
    let cfg = LinkConfig::new(p.d, p.s).map_err(|e| e.to_string())?;
    let plan = SimPlan::new(kernel, cfg, p.seed)
        .with_dims(p.slots, p.reps)
        .map_err(|e| e.to_string())?;

    let traces = simulate(&plan).map_err(|e| e.to_string())?;
    if let Some(path) = traces_path {
        let mut buf = Vec::new();
        match trace_format {
            TraceFormat::Text => write_traces_text(&mut buf, &traces),
            TraceFormat::Binary => write_traces_binary(&mut buf, &traces),
        }
        .map_err(|e| e.to_string())?;
        std::fs::write(path, &buf).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }

    let est = estimate_transitions(&traces).map_err(|e| e.to_string())?;
    let pers = empirical_persistence(&traces, p.d).map_err(|e| e.to_string())?;
    let closed = ge_params(&kernel, &cfg).map_err(|e| e.to_string())?;

    let out = SimulateOut {
        seed: p.seed,
        kernel,
        d: p.d,
        s_norm: p.s,
        n_slots: p.slots,
        n_reps: p.reps,
        p01_hat: est.p01_hat,
        p01_ci95: est.p01_ci95,
        p10_hat: est.p10_hat,
        p10_ci95: est.p10_ci95,
        p01_closed: closed.p01,
        p10_closed: closed.p10,
        counts: est.counts,
        degenerate_reps: est.degenerate_reps,
        persistence_mc: pers.mean,
        persistence_mc_ci95: pers.ci95,
        persistence_closed: closed.persistence,
        traces_written: traces_path.map(Path::to_path_buf),
    };

    match format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut csv = Csv::new(
                &[format!("seed={}", out.seed)],
                &[
                    "kernel",
                    "tc",
                    "sigma2",
                    "d",
                    "s_norm",
                    "n_slots",
                    "n_reps",
                    "p01_hat",
                    "p01_ci95",
                    "p10_hat",
                    "p10_ci95",
                    "p01_closed",
                    "p10_closed",
                    "n00",
                    "n01",
                    "n10",
                    "n11",
                    "degenerate_reps",
                    "persistence_mc",
                    "persistence_mc_ci95",
                    "persistence_closed",
                ],
            );
            csv.row(&[
                kernel.family().to_string(),
                kernel.t_c().to_string(),
                kernel.sigma2().to_string(),
                out.d.to_string(),
                out.s_norm.to_string(),
                out.n_slots.to_string(),
                out.n_reps.to_string(),
                out.p01_hat.to_string(),
                out.p01_ci95.to_string(),
                out.p10_hat.to_string(),
                out.p10_ci95.to_string(),
                out.p01_closed.to_string(),
                out.p10_closed.to_string(),
                out.counts[0][0].to_string(),
                out.counts[0][1].to_string(),
                out.counts[1][0].to_string(),
                out.counts[1][1].to_string(),
                out.degenerate_reps.to_string(),
                out.persistence_mc.to_string(),
                out.persistence_mc_ci95.to_string(),
                out.persistence_closed.to_string(),
            ]);
            Ok(csv.finish())
        }
    }
}
