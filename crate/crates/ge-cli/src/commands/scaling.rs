//! Persistence growth across coherence times: exact closed form against
//! the long-coherence asymptote, with optional Monte Carlo confirmation
//! and least-squares fits over the upper half of the grid.

use crate::config::Params;
use crate::output::{cell, to_json, Csv, Format};
use ge_bridge::bridge::{asymptotic_persistence, ge_params, LinkConfig};
use ge_bridge::parallel;
use ge_bridge::sim::{empirical_persistence, simulate, SimPlan};
use serde::Serialize;

#[derive(Serialize)]
struct Row {
    tc: f64,
    rho: f64,
    exact: Option<f64>,
    asymptote: f64,
    mc_mean: Option<f64>,
    mc_lo: Option<f64>,
    mc_hi: Option<f64>,
    status: String,
}

#[derive(Serialize)]
struct Fit {
    linear_slope: f64,
    loglog_exponent: f64,
    points_used: usize,
}

#[derive(Serialize)]
struct ScalingOut {
    kernel: String,
    sigma2: f64,
    d: f64,
    s_norm: f64,
    seed: Option<u64>,
    n_slots: Option<usize>,
    n_reps: Option<usize>,
    rows: Vec<Row>,
    fit: Option<Fit>,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

pub fn run(
    p: &Params,
    tc_min: f64,
    tc_max: f64,
    points: usize,
    mc: bool,
    format: Format,
) -> Result<String, String> {
    if points < 2 {
        return Err("scaling needs at least 2 grid points".into());
    }
    if tc_min.is_nan() || tc_max.is_nan() || tc_min <= 0.0 || tc_max <= tc_min {
        return Err("need 0 < tc-min < tc-max".into());
    }
    let family = p.kernel.ok_or("scaling requires --kernel")?;
    let cfg = LinkConfig::new(p.d, p.s).map_err(|e| e.to_string())?;

    let tcs: Vec<f64> = (0..points)
        .map(|i| tc_min + (tc_max - tc_min) * i as f64 / (points - 1) as f64)
        .collect();

    let rows: Vec<Row> = parallel::map_indexed(tcs.len(), |i| {
        let tc = tcs[i];
        let kernel = match ge_bridge::kernels::KernelSpec::new(family, p.sigma2, tc) {
            Ok(k) => k,
            Err(e) => {
                return Row {
                    tc,
                    rho: f64::NAN,
                    exact: None,
                    asymptote: f64::NAN,
                    mc_mean: None,
                    mc_lo: None,
                    mc_hi: None,
                    status: format!("error: {e}"),
                }
            }
        };
        let rho = ge_bridge::kernels::one_step_correlation(&kernel, p.d)
            .map(|c| c.get())
            .unwrap_or(f64::NAN);
        let asymptote = asymptotic_persistence(&kernel, &cfg).unwrap_or(f64::NAN);
        let exact = match ge_params(&kernel, &cfg) {
            Ok(g) => Some(g.persistence),
            Err(_) => None,
        };
        let mut status = if exact.is_some() { "ok" } else { "frozen" }.to_string();
        let (mut mc_mean, mut mc_lo, mut mc_hi) = (None, None, None);
        if mc && exact.is_some() {
            let run = SimPlan::new(kernel, cfg, p.seed)
                .with_dims(p.slots, p.reps)
                .and_then(|plan| {
                    let traces = simulate(&plan)?;
                    empirical_persistence(&traces, p.d)
                });
            match run {
                Ok(est) => {
                    mc_mean = Some(est.mean);
                    mc_lo = Some(est.mean - est.ci95);
                    mc_hi = Some(est.mean + est.ci95);
                    if est.degenerate_reps > 0 {
                        status = format!("ok ({} degenerate reps)", est.degenerate_reps);
                    }
                }
                Err(e) => status = format!("mc error: {e}"),
            }
        }
        Row {
            tc,
            rho,
            exact,
            asymptote,
            mc_mean,
            mc_lo,
            mc_hi,
            status,
        }
    });

    // Fit over the upper half of the rows that have an exact value; the
    // asymptotic regime is reached from above, not at the small-tc end.
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.exact.map(|e| (r.tc, e)))
        .collect();
    let fit = if usable.len() >= 2 {
        let mut top = &usable[usable.len() / 2..];
        if top.len() < 2 {
            top = &usable;
        }
        let xs: Vec<f64> = top.iter().map(|(t, _)| *t).collect();
        let ys: Vec<f64> = top.iter().map(|(_, e)| *e).collect();
        let lxs: Vec<f64> = xs.iter().map(|t| t.ln()).collect();
        let lys: Vec<f64> = ys.iter().map(|e| e.ln()).collect();
        Some(Fit {
            linear_slope: slope(&xs, &ys),
            loglog_exponent: slope(&lxs, &lys),
            points_used: top.len(),
        })
    } else {
        None
    };

    match format {
        Format::Json => to_json(&ScalingOut {
            kernel: family.to_string(),
            sigma2: p.sigma2,
            d: p.d,
            s_norm: p.s,
            seed: mc.then_some(p.seed),
            n_slots: mc.then_some(p.slots),
            n_reps: mc.then_some(p.reps),
            rows,
            fit,
        }),
        Format::Csv => {
            let mut comments = vec![format!(
                "kernel={} sigma2={} d={} s={}",
                family, p.sigma2, p.d, p.s
            )];
            if mc {
                comments.push(format!("seed={}", p.seed));
            }
            if let Some(f) = &fit {
                comments.push(format!(
                    "linear_slope={} loglog_exponent={} points_used={}",
                    f.linear_slope, f.loglog_exponent, f.points_used
                ));
            }
            let mut csv = Csv::new(
                &comments,
                &[
                    "tc",
                    "rho",
                    "exact",
                    "asymptote",
                    "mc_mean",
                    "mc_lo",
                    "mc_hi",
                    "status",
                ],
            );
            for r in &rows {
                csv.row(&[
                    r.tc.to_string(),
                    r.rho.to_string(),
                    cell(r.exact),
                    r.asymptote.to_string(),
                    cell(r.mc_mean),
                    cell(r.mc_lo),
                    cell(r.mc_hi),
                    r.status.clone(),
                ]);
            }
            Ok(csv.finish())
        }
    }
}
