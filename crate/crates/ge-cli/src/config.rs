//! Flat key=value config files mirroring the command-line flags. Flags win
//! over file entries, file entries win over defaults.

use crate::output::Format;
use ge_bridge::kernels::{KernelFamily, KernelSpec};
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

const KEYS: &[&str] = &[
    "kernel", "tc", "sigma2", "d", "s", "rho", "seed", "slots", "reps", "jobs", "format",
];

pub fn load(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(format!(
                "config line {}: unknown key '{key}' (known: {})",
                lineno + 1,
                KEYS.join(", ")
            ));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn parse<T: FromStr>(map: &HashMap<String, String>, key: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|e| format!("config key '{key}': {e}")),
    }
}

/// Fully resolved scalar parameters shared by every subcommand. Defaults
/// are the reference setup: unit variance, median threshold, unit spacing.
#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub kernel: Option<KernelFamily>,
    pub tc: Option<f64>,
    pub sigma2: f64,
    pub d: f64,
    pub s: f64,
    pub rho: Option<f64>,
    pub seed: u64,
    pub slots: usize,
    pub reps: usize,
    pub jobs: usize,
    pub format: Option<Format>,
}

pub struct Overrides {
    pub config: Option<std::path::PathBuf>,
    pub kernel: Option<String>,
    pub tc: Option<f64>,
    pub sigma2: Option<f64>,
    pub d: Option<f64>,
    pub s: Option<f64>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
    pub slots: Option<usize>,
    pub reps: Option<usize>,
    pub jobs: Option<usize>,
    pub format: Option<Format>,
}

pub fn resolve(o: &Overrides) -> Result<Params, String> {
    let file = match &o.config {
        Some(p) => load(p)?,
        None => HashMap::new(),
    };
    let kernel = match o.kernel.clone().or_else(|| file.get("kernel").cloned()) {
        Some(name) => Some(KernelFamily::from_str(&name).map_err(|e| e.to_string())?),
        None => None,
    };
    Ok(Params {
        kernel,
        tc: o.tc.or(parse(&file, "tc")?),
        sigma2: o.sigma2.or(parse(&file, "sigma2")?).unwrap_or(1.0),
        d: o.d.or(parse(&file, "d")?).unwrap_or(1.0),
        s: o.s.or(parse(&file, "s")?).unwrap_or(0.0),
        rho: o.rho.or(parse(&file, "rho")?),
        seed: o
            .seed
            .or(parse(&file, "seed")?)
            .unwrap_or(ge_bridge::sim::DEFAULT_SEED),
        slots: o.slots.or(parse(&file, "slots")?).unwrap_or(1200),
        reps: o.reps.or(parse(&file, "reps")?).unwrap_or(250),
        jobs: o.jobs.or(parse(&file, "jobs")?).unwrap_or(0),
        format: o.format.or(parse(&file, "format")?),
    })
}

impl Params {
    /// The kernel spec, requiring both family and t_c.
    pub fn kernel_spec(&self) -> Result<KernelSpec, String> {
        let family = self
            .kernel
            .ok_or("missing kernel family (--kernel sqexp|exp)")?;
        let tc = self.tc.ok_or("missing correlation length (--tc)")?;
        KernelSpec::new(family, self.sigma2, tc).map_err(|e| e.to_string())
    }
}
