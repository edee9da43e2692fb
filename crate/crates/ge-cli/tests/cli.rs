//! End-to-end checks of the gebridge binary: worked examples, output
//! contracts (schemas, stable headers, determinism), and exit codes.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gebridge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn gebridge")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "gebridge {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout_of(&full)).expect("valid json")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gebridge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

// A validator for the subset of JSON Schema the shipped schemas use:
// type (string or list), properties, required, items, enum.
fn check(schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    if let Some(allowed) = schema.get("enum") {
        let ok = allowed.as_array().unwrap().contains(v);
        if !ok {
            return Err(format!("{path}: {v} not in enum {allowed}"));
        }
    }
    if let Some(ty) = schema.get("type") {
        let names: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().map(|t| t.as_str().unwrap()).collect(),
            _ => return Err(format!("{path}: malformed type keyword")),
        };
        let ok = names.iter().any(|name| match *name {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "number" => v.is_number(),
            "integer" => v.is_i64() || v.is_u64(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: {v} is none of {names:?}"));
        }
    }
    if let (Some(req), Some(obj)) = (schema.get("required"), v.as_object()) {
        for name in req.as_array().unwrap() {
            let name = name.as_str().unwrap();
            if !obj.contains_key(name) {
                return Err(format!("{path}: missing required field '{name}'"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (schema.get("properties"), v.as_object()) {
        for (key, sub) in props.as_object().unwrap() {
            if let Some(child) = obj.get(key) {
                check(sub, child, &format!("{path}.{key}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, child) in arr.iter().enumerate() {
            check(items, child, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn assert_schema(name: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    if let Err(e) = check(&schema, v, "$") {
        panic!("{name} violation: {e}");
    }
}

#[test]
fn params_worked_examples() {
    // sqexp, t_c = d: rho = e^-1 and p01 = 1/2 - asin(e^-1)/pi
    let v = json_of(&[
        "params", "--kernel", "sqexp", "--tc", "1", "--d", "1", "--s", "0",
    ]);
    let want = 0.5 - (-1.0f64).exp().asin() / std::f64::consts::PI;
    assert!((v["p01"].as_f64().unwrap() - want).abs() < 1e-14);
    assert!((v["rho"].as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-15);

    // rho = 1/2 at the median threshold: persistence exactly 3 slots
    let v = json_of(&["params", "--rho", "0.5", "--s", "0", "--d", "1"]);
    assert_eq!(v["persistence"].as_f64().unwrap(), 3.0);
    assert!(v["kernel"].is_null());

    // independent slots: both transition rates 1/2
    let v = json_of(&["params", "--rho", "0", "--s", "0"]);
    assert_eq!(v["p01"].as_f64().unwrap(), 0.5);
    assert_eq!(v["p10"].as_f64().unwrap(), 0.5);
}

#[test]
fn rho_flag_excludes_kernel_flags() {
    let out = run(&["params", "--rho", "0.3", "--kernel", "exp", "--tc", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--rho"), "stderr: {err}");
}

#[test]
fn domain_errors_exit_2() {
    for args in [
        &["params", "--rho", "1.5", "--s", "0"][..],
        &["params", "--rho", "1", "--s", "0"][..], // frozen channel
        &["params", "--kernel", "exp", "--tc", "-3"][..],
        &["simulate", "--kernel", "exp", "--tc", "2", "--slots", "1"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "simulate", "--kernel", "exp", "--tc", "4", "--s", "0.5", "--reps", "20",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
    // and thread count must not change the result
    let mut a1 = args.to_vec();
    a1.extend(["--jobs", "1"]);
    let mut a2 = args.to_vec();
    a2.extend(["--jobs", "2"]);
    assert_eq!(stdout_of(&a1), stdout_of(&a2));
}

#[test]
fn config_file_feeds_defaults_and_flags_win() {
    let cfg = tmp("precedence.cfg");
    std::fs::write(&cfg, "kernel=exp\ntc=8\ns=0.5\nseed=77\nformat=json\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let v: Value =
        serde_json::from_str(&stdout_of(&["params", "--config", cfg, "--s", "1"])).unwrap();
    // file supplies kernel and tc, flag overrides s, file format=json held
    assert_eq!(v["kernel"]["t_c"].as_f64().unwrap(), 8.0);
    assert_eq!(v["s_norm"].as_f64().unwrap(), 1.0);

    let out = run(&["params", "--config", cfg, "--format", "csv", "--s", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("kernel,"));

    let bad = tmp("bad.cfg");
    std::fs::write(&bad, "coherence=8\n").unwrap();
    let out = run(&["params", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_headers_are_stable() {
    let header = |s: &str| s.lines().find(|l| !l.starts_with('#')).unwrap().to_string();
    assert_eq!(
        header(&stdout_of(&["params", "--rho", "0.5"])),
        "kernel,tc,sigma2,d,s_norm,rho,p01,p10,pi0,pi1,dwell0,dwell1,persistence,q,n_cross,markov_defect,asymptotic_persistence"
    );
    assert_eq!(
        header(&stdout_of(&[
            "simulate", "--kernel", "exp", "--tc", "2", "--reps", "4", "--slots", "64"
        ])),
        "kernel,tc,sigma2,d,s_norm,n_slots,n_reps,p01_hat,p01_ci95,p10_hat,p10_ci95,p01_closed,p10_closed,n00,n01,n10,n11,degenerate_reps,persistence_mc,persistence_mc_ci95,persistence_closed"
    );
    assert_eq!(
        header(&stdout_of(&[
            "validate-table", "--grid", "tc=2", "s=0", "kernel=exp", "--reps", "4", "--slots", "64"
        ])),
        "tc_over_d,s_over_sigma,kernel,max_gap,dtv_ge,dtv_second,err_pct,exact_max_gap,persistence_mc,persistence_closed,degenerate_reps,status"
    );
    assert_eq!(
        header(&stdout_of(&[
            "scaling", "--kernel", "exp", "--points", "2", "--no-mc"
        ])),
        "tc,rho,exact,asymptote,mc_mean,mc_lo,mc_hi,status"
    );
    assert_eq!(
        header(&stdout_of(&[
            "diagnose", "--kernel", "exp", "--tc", "2", "--reps", "8", "--slots", "200"
        ])),
        "tc_over_d,s_over_sigma,kernel,max_gap,gap_00,gap_01,gap_10,gap_11,exact_max_gap,exact_gap_00,exact_gap_01,exact_gap_10,exact_gap_11,k_max,n_runs,dtv_ge,dtv_second,entry_continuation,dwell_continuation,persistence_mc,persistence_closed,err_pct,degenerate_reps,low_count_contexts"
    );
}

#[test]
fn json_outputs_validate_against_shipped_schemas() {
    assert_schema(
        "params.schema.json",
        &json_of(&["params", "--kernel", "sqexp", "--tc", "2"]),
    );
    assert_schema("params.schema.json", &json_of(&["params", "--rho", "0.4"]));
    assert_schema(
        "simulate.schema.json",
        &json_of(&[
            "simulate", "--kernel", "exp", "--tc", "2", "--reps", "6", "--slots", "120",
        ]),
    );
    assert_schema(
        "validate-table.schema.json",
        &json_of(&[
            "validate-table",
            "--grid",
            "tc=2,5",
            "s=0,1",
            "kernel=exp",
            "--reps",
            "10",
            "--slots",
            "300",
        ]),
    );
    assert_schema(
        "scaling.schema.json",
        &json_of(&[
            "scaling", "--kernel", "exp", "--tc-min", "10", "--tc-max", "20", "--points", "3",
            "--reps", "5", "--slots", "200",
        ]),
    );
    assert_schema(
        "scaling.schema.json",
        &json_of(&["scaling", "--kernel", "sqexp", "--points", "2", "--no-mc"]),
    );
    assert_schema(
        "diagnose.schema.json",
        &json_of(&[
            "diagnose", "--kernel", "exp", "--tc", "2,5", "--reps", "10", "--slots", "300",
        ]),
    );
}

#[test]
fn grid_subsetting_and_row_order() {
    let v = json_of(&[
        "validate-table",
        "--grid",
        "tc=2",
        "s=0",
        "kernel=sqexp",
        "--reps",
        "10",
        "--slots",
        "200",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["kernel"].as_str().unwrap(), "sqexp");

    // default kernel order within a cell is sqexp then exp; tc then s ascend
    let v = json_of(&[
        "validate-table",
        "--grid",
        "tc=5,2",
        "s=1,0",
        "--reps",
        "4",
        "--slots",
        "80",
    ]);
    let rows = v["rows"].as_array().unwrap();
    let key: Vec<(f64, f64, String)> = rows
        .iter()
        .map(|r| {
            (
                r["tc_over_d"].as_f64().unwrap(),
                r["s_over_sigma"].as_f64().unwrap(),
                r["kernel"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    // grid axes keep the order given on the command line
    assert_eq!(key[0], (5.0, 1.0, "sqexp".into()));
    assert_eq!(key[1], (5.0, 1.0, "exp".into()));
    assert_eq!(key[2], (5.0, 0.0, "sqexp".into()));
    assert_eq!(key[7], (2.0, 0.0, "exp".into()));

    let out = run(&["validate-table", "--grid", "tc="]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["validate-table", "--grid", "mcs=7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_mode_flags_breaches_with_exit_3() {
    // deliberately underpowered run: persistence error well past 3%
    let out = run(&[
        "validate-table",
        "--grid",
        "tc=0.2",
        "s=0",
        "kernel=exp",
        "--reps",
        "5",
        "--slots",
        "100",
        "--strict",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // same run without --strict reports but exits clean
    let out = run(&[
        "validate-table",
        "--grid",
        "tc=0.2",
        "s=0",
        "kernel=exp",
        "--reps",
        "5",
        "--slots",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn traces_roundtrip_through_both_formats() {
    let txt = tmp("traces.txt");
    let bin_path = tmp("traces.bin");
    let base = [
        "simulate", "--kernel", "exp", "--tc", "3", "--s", "0.5", "--reps", "7", "--slots", "90",
    ];

    let mut a = base.to_vec();
    a.extend(["--traces", txt.to_str().unwrap()]);
    stdout_of(&a);
    let mut b = base.to_vec();
    b.extend([
        "--traces",
        bin_path.to_str().unwrap(),
        "--trace-format",
        "binary",
    ]);
    stdout_of(&b);

    let from_text = ge_bridge::sim::read_traces_text(std::io::BufReader::new(
        std::fs::File::open(&txt).unwrap(),
    ))
    .unwrap();
    let from_bin =
        ge_bridge::sim::read_traces_binary(std::fs::File::open(&bin_path).unwrap()).unwrap();
    assert_eq!(from_text.len(), 7);
    assert_eq!(from_bin.len(), 7);
    for (t, b) in from_text.iter().zip(&from_bin) {
        assert_eq!(t.len(), 90);
        assert_eq!(t.bits(), b.bits());
    }
}

#[test]
fn output_file_matches_stdout() {
    let path = tmp("params.csv");
    let on_stdout = stdout_of(&["params", "--rho", "0.25", "--s", "0.5"]);
    stdout_of(&[
        "params",
        "--rho",
        "0.25",
        "--s",
        "0.5",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), on_stdout);
}
