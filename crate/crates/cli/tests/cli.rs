//! End-to-end tests of the stark-spectra binary: exit codes, output schema,
//! determinism, and the crosscheck report.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stark-spectra"))
}

fn run_mode(mode: &str, config_text: &str, dir: &Path, extra: &[&str]) -> (Output, String) {
    let config = dir.join("run.cfg");
    fs::write(&config, config_text).unwrap();
    let out_path = dir.join("out.csv");
    let output = bin()
        .arg(mode)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out_path)
        .args(extra)
        .output()
        .unwrap();
    (output, out_path.display().to_string())
}

const SWEEP_CFG: &str = "\
[model]
omega = 1.0
gamma = 0.2
delta = 0.7

[grid]
start = 0.0
stop = 1.0
count = 5

[spectrum]
k_levels = 6
n_trunc = 60
parity = +1
";

#[test]
fn sweep_writes_schema_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_mode("sweep", SWEEP_CFG, dir.path(), &[]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# schema: stark-spectra.csv/1");
    assert_eq!(
        lines.next().unwrap(),
        "g,level_index,energy,parity,photon_content,source"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5 * 6);
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 6);
        cols[0].parse::<f64>().unwrap();
        cols[1].parse::<usize>().unwrap();
        cols[2].parse::<f64>().unwrap();
        assert_eq!(cols[3], "1"); // positive-parity filter
        cols[4].parse::<f64>().unwrap();
        assert_eq!(cols[5], "exact-diag");
    }
    // LF endings only
    assert!(!text.contains('\r'));

    // byte-identical rerun, also across thread counts
    let first = fs::read(&path).unwrap();
    let (out2, _) = run_mode("sweep", SWEEP_CFG, dir.path(), &["--threads", "2"]);
    assert!(out2.status.success());
    assert_eq!(
        first,
        fs::read(&path).unwrap(),
        "primary output must be byte-identical"
    );

    // STARK_SPECTRA_THREADS fallback gives the same bytes
    let config = dir.path().join("run.cfg");
    let out3 = bin()
        .arg("sweep")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&path)
        .env("STARK_SPECTRA_THREADS", "3")
        .output()
        .unwrap();
    assert!(out3.status.success());
    assert_eq!(first, fs::read(&path).unwrap());

    // sidecar exists and records the resolved config
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{path}.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["schema"], "stark-spectra.meta/1");
    assert_eq!(meta["config"]["mode"], "sweep");
    assert_eq!(meta["config"]["spectrum"]["n_trunc"], 60);
    assert!(meta["wall_time_ms"].is_number());
    assert_eq!(
        meta["runtime"]["columns_converged"]
            .as_array()
            .unwrap()
            .len(),
        5
    );
}

#[test]
fn single_point_grid_gives_single_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[model]\ngamma = 0.2\ndelta = 0.7\n[grid]\nstart = 0.5\nstop = 0.5\ncount = 1\n[spectrum]\nk_levels = 4\nn_trunc = 50\n";
    let (out, path) = run_mode("sweep", cfg, dir.path(), &[]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2 + 4);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        "[model]\nomega = nope\n",
        "[model]\nmystery = 1\n",
        "[grid]\ncount = 0\n",
        "[model]\ngamma = 1.5\n", // gfunction needs subcritical
    ] {
        let (out, _) = run_mode("gfunction", bad, dir.path(), &[]);
        assert_eq!(out.status.code(), Some(2), "config `{bad}` should exit 2");
    }
}

#[test]
fn numerical_failure_exits_3() {
    // series capped at 8 terms in a regime that needs dozens
    let cfg = "[model]\ngamma = 0.89\ndelta = 0.7\ng = 1.2\n[gfunction]\nn_terms_max = 8\ne_lo = 0.0\ne_hi = 1.0\n";
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = run_mode("gfunction", cfg, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    // box too tight for the requested band levels
    let cfg = "[model]\ndelta = 0.7\n[slowmode]\nband = a\nq_half_width = 1.0\nn_points = 101\nk_levels = 8\n";
    let (out, _) = run_mode("slowmode", cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn io_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(&config, "[model]\ndelta = 0.7\n").unwrap();
    let out = bin()
        .args(["slowmode", "--config"])
        .arg(&config)
        .args(["--out", "/nonexistent-dir/out.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    let out = bin()
        .args(["sweep", "--config", "/no/such/config.cfg", "--out"])
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn gfunction_mode_reports_parity_resolved_roots() {
    // tiny coupling: roots sit on the parity-resolved baseline ladders
    let cfg =
        "[model]\ngamma = 0.35\ndelta = 0.4\ng = 1e-8\n[gfunction]\ne_lo = -1.0\ne_hi = 2.0\n";
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_mode("gfunction", cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&path).unwrap();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for line in text.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[5], "gfunction");
        let e: f64 = cols[2].parse().unwrap();
        match cols[3] {
            "1" => plus.push(e),
            "-1" => minus.push(e),
            other => panic!("unexpected parity {other}"),
        }
    }
    for (got, want) in plus.iter().zip([0.25, 0.4, 1.55]) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    for (got, want) in minus.iter().zip([-0.4, 0.9, 1.75]) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
}

#[test]
fn confluence_and_slowmode_row_sources() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[model]\ndelta = 0.05\ng = 0.3\n[confluence]\nn_max = 2\n";
    let (out, path) = run_mode("confluence", cfg, dir.path(), &[]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    for source in ["bic", "lbs", "threshold"] {
        assert!(
            text.lines().any(|l| l.ends_with(&format!(",{source}"))),
            "missing source {source} in confluence output"
        );
    }

    let cfg = "[model]\ngamma = 0.2\ndelta = 0.7\ng = 0.1\n[slowmode]\nq_half_width = 10.0\nn_points = 501\nk_levels = 3\nharmonic_count = 3\n";
    let (out, path) = run_mode("slowmode", cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&path).unwrap();
    for source in [
        "band-a-harmonic",
        "band-b-harmonic",
        "band-a-fd",
        "band-b-fd",
    ] {
        assert!(
            text.lines().any(|l| l.ends_with(&format!(",{source}"))),
            "missing {source}"
        );
    }
    // harmonic and finite-difference levels agree at small coupling
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{path}.meta.json")).unwrap()).unwrap();
    assert!(meta["runtime"]["double_well_onset"].as_f64().unwrap() > 0.0);
}

#[test]
fn crosscheck_reports_and_passes_default_tolerances() {
    let cfg = "\
[model]
gamma = 0.9
delta = 0.7
g = 0.5

[grid]
start = 0.4
stop = 1.0
count = 3

[spectrum]
k_levels = 60
n_trunc = 220

[gfunction]
e_lo = -2.0
e_hi = 1.5
";
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_mode("crosscheck", cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let diff_text = fs::read_to_string(format!("{path}.diff.csv")).unwrap();
    assert_eq!(
        diff_text.lines().next().unwrap(),
        "# schema: stark-spectra.diff/1"
    );
    assert_eq!(
        diff_text.lines().nth(1).unwrap(),
        "section,g,level,reference,candidate,abs_diff,rel_diff,flag"
    );
    assert!(diff_text.lines().any(|l| l.starts_with("gfunc-vs-ed,")));
    assert!(diff_text.lines().any(|l| l.starts_with("bic-vs-prebic,")));

    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{path}.meta.json")).unwrap()).unwrap();
    let gd = &meta["runtime"]["gfunc_vs_ed"];
    assert!(gd["entries"].as_u64().unwrap() >= 10);
    assert!(
        gd["max_abs_diff"].as_f64().unwrap() < 1e-7,
        "G roots vs exact-diag disagree: {gd}"
    );
    assert_eq!(gd["flagged"], 0);
    let bd = &meta["runtime"]["bic_vs_prebic"];
    assert_eq!(bd["flagged"], 0, "BIC/preBIC entries flagged: {bd}");

    // primary file carries both spectra, source-tagged
    let text = fs::read_to_string(&path).unwrap();
    for source in ["exact-diag", "gfunction", "bic", "prebic"] {
        assert!(
            text.lines().any(|l| l.ends_with(&format!(",{source}"))),
            "missing {source}"
        );
    }
}

#[test]
fn crosscheck_band_section_in_large_splitting_regime() {
    // the harmonic-band comparison has its validity window at large delta:
    // levels of band a ascend and band b descend with g, and both track the
    // numerical spectrum
    let cfg = "\
[model]
gamma = 0.2
delta = 4.0
g = 0.3

[grid]
start = 0.1
stop = 0.5
count = 3

[spectrum]
k_levels = 60
n_trunc = 120

[tolerances]
# the harmonic overlay tracks within the inter-level envelope, not exactly
band_vs_ed_rel = 0.2
";
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_mode("crosscheck", cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{path}.meta.json")).unwrap()).unwrap();
    let band = &meta["runtime"]["band_vs_ed"];
    assert!(
        band["entries"].as_u64().unwrap() > 0,
        "band section empty: {band}"
    );
    assert_eq!(band["flagged"], 0, "band overlay flagged: {band}");

    // ordering of the analytic overlay across the grid
    let text = fs::read_to_string(&path).unwrap();
    let levels_at = |source: &str, g_prefix: &str| -> Vec<f64> {
        text.lines()
            .filter(|l| l.starts_with(g_prefix) && l.ends_with(source))
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect()
    };
    let a_lo = levels_at(",band-a-harmonic", "1.0000000000000001e-1");
    let a_hi = levels_at(",band-a-harmonic", "5.0000000000000000e-1");
    let b_lo = levels_at(",band-b-harmonic", "1.0000000000000001e-1");
    let b_hi = levels_at(",band-b-harmonic", "5.0000000000000000e-1");
    assert!(!a_lo.is_empty() && a_lo.len() == a_hi.len() && b_lo.len() == b_hi.len());
    for (lo, hi) in a_lo.iter().zip(&a_hi) {
        assert!(hi > lo, "band a levels must ascend with g");
    }
    for (lo, hi) in b_lo.iter().zip(&b_hi) {
        assert!(hi < lo, "band b levels must descend with g");
    }
}
