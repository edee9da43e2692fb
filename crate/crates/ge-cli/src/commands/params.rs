//! Closed-form GE parameters for one configuration, no simulation.

use crate::config::Params;
use crate::output::{cell, to_json, Csv, Format};
use ge_bridge::bridge::{asymptotic_persistence, ge_params_from_rho, LinkConfig};
use ge_bridge::kernels::{markov_defect, one_step_correlation, KernelSpec};
use ge_bridge::special::Correlation;
use serde::Serialize;

#[derive(Serialize)]
struct ParamsOut {
    kernel: Option<KernelSpec>,
    rho: f64,
    d: f64,
    s_norm: f64,
    p01: f64,
    p10: f64,
    pi0: f64,
    pi1: f64,
    dwell0: f64,
    dwell1: f64,
    persistence: f64,
    q: f64,
    n_cross: f64,
    markov_defect: Option<f64>,
    asymptotic_persistence: Option<f64>,
}

pub fn run(p: &Params, format: Format) -> Result<String, String> {
    let cfg = LinkConfig::new(p.d, p.s).map_err(|e| e.to_string())?;

    // --rho bypasses the kernel entirely; otherwise rho comes from K(d)/K(0)
    let (kernel, rho) = match p.rho {
        Some(r) => {
            if p.kernel.is_some() || p.tc.is_some() {
                return Err("--rho replaces the kernel; drop --kernel/--tc".into());
            }
            (None, Correlation::new(r).map_err(|e| e.to_string())?)
        }
        None => {
            let k = p.kernel_spec()?;
            let r = one_step_correlation(&k, p.d).map_err(|e| e.to_string())?;
            (Some(k), r)
        }
    };

    let ge = ge_params_from_rho(rho, &cfg).map_err(|e| e.to_string())?;
    let (defect, asym) = match &kernel {
        Some(k) => (
            Some(markov_defect(k, p.d).map_err(|e| e.to_string())?),
            Some(asymptotic_persistence(k, &cfg).map_err(|e| e.to_string())?),
        ),
        None => (None, None),
    };

    let out = ParamsOut {
        kernel,
        rho: rho.get(),
        d: p.d,
        s_norm: p.s,
        p01: ge.p01,
        p10: ge.p10,
        pi0: ge.pi0,
        pi1: ge.pi1,
        dwell0: ge.dwell0,
        dwell1: ge.dwell1,
        persistence: ge.persistence,
        q: ge.q,
        n_cross: ge.n_cross,
        markov_defect: defect,
        asymptotic_persistence: asym,
    };

    match format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut csv = Csv::new(
                &[],
                &[
                    "kernel",
                    "tc",
                    "sigma2",
                    "d",
                    "s_norm",
                    "rho",
                    "p01",
                    "p10",
                    "pi0",
                    "pi1",
                    "dwell0",
                    "dwell1",
                    "persistence",
                    "q",
                    "n_cross",
                    "markov_defect",
                    "asymptotic_persistence",
                ],
            );
            csv.row(&[
                out.kernel
                    .map(|k| k.family().to_string())
                    .unwrap_or_default(),
                cell(out.kernel.map(|k| k.t_c())),
                cell(out.kernel.map(|k| k.sigma2())),
                out.d.to_string(),
                out.s_norm.to_string(),
                out.rho.to_string(),
                out.p01.to_string(),
                out.p10.to_string(),
                out.pi0.to_string(),
                out.pi1.to_string(),
                out.dwell0.to_string(),
                out.dwell1.to_string(),
                out.persistence.to_string(),
                out.q.to_string(),
                out.n_cross.to_string(),
                cell(out.markov_defect),
                cell(out.asymptotic_persistence),
            ]);
            Ok(csv.finish())
        }
    }
}
