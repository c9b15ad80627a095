//! End-to-end checks of the binary: output files, flags, exit codes.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cavity-eo"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cavity-eo-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Parse a small CSV into one map per row.
fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let headers: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|line| {
            headers
                .iter()
                .zip(line.split(','))
                .map(|(h, v)| ((*h).to_owned(), v.to_owned()))
                .collect()
        })
        .collect()
}

fn get(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key} = {:?}", row[key]))
}

#[test]
fn help_and_presets_listing() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "coupling",
        "cooling",
        "pa",
        "parasitic",
        "bae",
        "compare",
        "sweep",
    ] {
        assert!(text.contains(sub), "--help must mention {sub}");
    }
    let out = run(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ilchenko"));
    assert!(text.contains("feasibility-baseline"));
}

#[test]
fn coupling_writes_csv_and_sidecar() {
    let dir = scratch("coupling");
    let out = run(&[
        "coupling",
        "--preset",
        "improved-device",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_csv(&dir.join("coupling.csv"));
    assert_eq!(rows.len(), 1);
    assert!(get(&rows[0], "g_rad_per_s") > 0.0);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("coupling.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["tool"], "cavity-eo");
    assert_eq!(meta["preset"], "improved-device");
    assert!(meta["generated_at_unix_s"].as_u64().unwrap() > 0);
}

#[test]
fn cooling_formula_and_solver_columns_match() {
    let dir = scratch("cooling");
    let out = run(&[
        "cooling",
        "--preset",
        "ilchenko",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_csv(&dir.join("cooling.csv"));
    let formula = get(&rows[0], "n_ss_formula");
    let lyap = get(&rows[0], "n_ss_lyapunov");
    assert!((formula / lyap - 1.0).abs() < 1e-9);
    assert_eq!(rows[0]["stable"], "true");
}

#[test]
fn bae_demo_holds_measured_quadrature_constant() {
    let dir = scratch("bae");
    let out = run(&[
        "bae",
        "--preset",
        "bae-demo",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_csv(&dir.join("bae.csv"));
    assert_eq!(rows.len(), 1001);
    let var0 = get(&rows[0], "var_X_b");
    let mut prev_y = f64::NEG_INFINITY;
    for row in &rows {
        assert!((get(row, "var_X_b") / var0 - 1.0).abs() < 1e-9);
        let vy = get(row, "var_Y_b");
        assert!(vy >= prev_y);
        prev_y = vy;
    }
    assert!(prev_y > get(&rows[0], "var_Y_b"));
}

#[test]
fn json_format_emits_objects() {
    let dir = scratch("jsonfmt");
    let out = run(&[
        "cooling",
        "--preset",
        "compare-cooling",
        "--format",
        "json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let data: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("cooling.json")).unwrap()).unwrap();
    assert!(data[0]["n_ss_lyapunov"].is_number());
    assert_eq!(data[0]["stable"], serde_json::json!(true));
}

#[test]
fn set_overrides_apply() {
    let dir = scratch("set");
    let out = run(&[
        "cooling",
        "--preset",
        "compare-cooling",
        "--set",
        "alpha_minus_sq=64",
        "--set",
        "microwave_bath_occupation=2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_csv(&dir.join("cooling.csv"));
    assert_eq!(get(&rows[0], "alpha_minus_sq"), 64.0);
    assert_eq!(get(&rows[0], "N_b"), 2.0);
}

#[test]
fn requested_outputs_restrict_columns() {
    let dir = scratch("outputs");
    let preset_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets/compare-cooling.json");
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(preset_path).unwrap()).unwrap();
    doc["outputs"] = serde_json::json!(["G", "n_ss_lyapunov"]);
    let custom = dir.join("custom.json");
    std::fs::write(&custom, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run(&["cooling", "--preset", custom.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("cooling.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "G,n_ss_lyapunov");

    doc["outputs"] = serde_json::json!(["no_such_observable"]);
    std::fs::write(&custom, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["cooling", "--preset", custom.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_failures_exit_2() {
    let dir = scratch("exit2");
    let cases: &[&[&str]] = &[
        &["cooling", "--out", "x"],
        &["cooling", "--preset", "does-not-exist", "--out", "x"],
        &[
            "cooling",
            "--preset",
            "compare-cooling",
            "--set",
            "bogus_field=1",
            "--out",
            "x",
        ],
        &[
            "cooling",
            "--preset",
            "compare-cooling",
            "--set",
            "optical_mode.gamma_rad_per_s=-2",
            "--out",
            "x",
        ],
        &["coupling", "--preset", "compare-cooling", "--out", "x"],
        &["cooling", "--preset", "pa-demo", "--out", "x"],
        &["sweep", "--preset", "compare-cooling", "--out", "x"],
        &[
            "sweep",
            "--preset",
            "compare-cooling",
            "--axis",
            "alpha_minus_sq=1:2:2",
            "--axis",
            "g_rad_per_s=1:2:2",
            "--axis",
            "theta_plus_rad=0:1:2",
            "--out",
            "x",
        ],
    ];
    for args in cases {
        let mut full: Vec<&str> = args.to_vec();
        let dirstr = dir.to_str().unwrap();
        for a in full.iter_mut() {
            if *a == "x" {
                *a = dirstr;
            }
        }
        let out = bin().args(&full).output().unwrap();
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn unstable_steady_state_exits_3() {
    let dir = scratch("exit3");
    let out = run(&[
        "parasitic",
        "--preset",
        "parasitic-floor-sweep",
        "--set",
        "alpha0_sq=1e8",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // The row is still written, with the instability flagged.
    let rows = read_csv(&dir.join("parasitic.csv"));
    assert_eq!(rows[0]["stable"], "false");
    assert_eq!(rows[0]["n_ss_lyapunov"], "");
}

#[test]
fn pa_above_threshold_is_data_not_an_error() {
    let dir = scratch("pa-above");
    let out = run(&[
        "pa",
        "--preset",
        "compare-pa",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_csv(&dir.join("pa.csv"));
    assert_eq!(rows[0]["stable"], "false");
    assert!(get(&rows[0], "C_plus") > 1.0);
}

#[test]
fn sweep_rows_in_grid_order_and_reproducible() {
    let dir1 = scratch("sweep1");
    let dir2 = scratch("sweep2");
    for (dir, jobs) in [(&dir1, "1"), (&dir2, "4")] {
        let out = run(&[
            "sweep",
            "--preset",
            "compare-cooling",
            "--axis",
            "alpha_minus_sq=1:100:7:log",
            "--jobs",
            jobs,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = std::fs::read(dir1.join("sweep.csv")).unwrap();
    let b = std::fs::read(dir2.join("sweep.csv")).unwrap();
    assert_eq!(a, b, "sweep output must not depend on the thread count");
    let rows = read_csv(&dir1.join("sweep.csv"));
    assert_eq!(rows.len(), 7);
    let mut prev = 0.0;
    for row in &rows {
        let v = get(row, "alpha_minus_sq");
        assert!(v > prev);
        prev = v;
    }
}
