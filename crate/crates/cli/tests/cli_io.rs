use std::path::{Path, PathBuf};
use std::process::Command;

use dualmarket::{load_config, parse_config, run_compare, run_scenario, run_sweep, Engine};
use dualmarket_core::HiringRegime;

fn scenario_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/fair_vs_blind.toml")
}

fn small(extra: &str) -> dualmarket::ScenarioConfig {
    parse_config(&format!("horizon = 20\n{extra}\n[params]\nn = 600\n"), "test").unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dualmarket"))
}

#[test]
fn shipped_scenario_round_trips() {
    let cfg = load_config(&scenario_path()).unwrap();
    assert_eq!(cfg.engine, Engine::Both);
    let again = parse_config(&cfg.dump(), "dump").unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.dump(), cfg.dump());
}

#[test]
fn ordering_violation_is_named() {
    let err = parse_config("[params]\np_ql = 0.95\n", "t").unwrap_err();
    assert!(err.errors.iter().any(|e| e.contains("p_ql") && e.contains("p_h")), "{err}");
}

#[test]
fn horizon_zero_rejected() {
    assert!(parse_config("horizon = 0\n", "t").is_err());
}

#[test]
fn both_engines_share_one_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("engine = \"both\"");
    let run = run_scenario(&cfg, dir.path()).unwrap();
    let text = std::fs::read_to_string(&run.timeseries).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("t,g_plm,"));
    assert!(header.contains(",g_mf,"));
    assert_eq!(text.lines().count(), 22);
    assert!(!text.lines().skip(1).any(|l| l.contains("e-") || l.contains("e+")));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["checksums"]["timeseries.csv"].is_string());
    assert!(summary["mean_field"]["steady_states"].is_array());
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = small("");
    let ra = run_scenario(&cfg, a.path()).unwrap();
    let rb = run_scenario(&cfg, b.path()).unwrap();
    assert_eq!(ra.timeseries_checksum(), rb.timeseries_checksum());
    assert_eq!(std::fs::read(&ra.timeseries).unwrap(), std::fs::read(&rb.timeseries).unwrap());
}

#[test]
fn json_lines_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("[output]\nformat = \"json-lines\"");
    let run = run_scenario(&cfg, dir.path()).unwrap();
    assert!(run.timeseries.ends_with("timeseries.jsonl"));
    let text = std::fs::read_to_string(&run.timeseries).unwrap();
    assert_eq!(text.lines().count(), 21);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["t"], 0);
}

#[test]
fn compare_arity_and_self_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("");
    let fair = HiringRegime::GroupFair { ell: 0.8 };
    let out = run_compare(&cfg, &[fair, fair], dir.path()).unwrap();
    assert_eq!(out.reports.len(), 1);
    assert_eq!(out.reports[0].gaps.max_abs(), 0.0);
    assert!(!out.reports[0].dominated);

    let three = [
        fair,
        HiringRegime::default_for("group_blind").unwrap(),
        HiringRegime::default_for("stat_disc").unwrap(),
    ];
    let out = run_compare(&cfg, &three, dir.path()).unwrap();
    assert_eq!(out.reports.len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let out = run_compare(&cfg, &three[1..], dir.path()).unwrap();
    assert_eq!(out.warnings.len(), 1);
    assert_eq!(out.reports.len(), 1);
}

#[test]
fn sweep_index_and_parallel_determinism() {
    let cfg = small("[sweep]\naxes = [{ path = \"params.beta_rep\", values = [0, 0.5, 1] }]");
    let one = tempfile::tempdir().unwrap();
    let many = tempfile::tempdir().unwrap();
    let a = run_sweep(&cfg, one.path(), Some(1)).unwrap();
    let b = run_sweep(&cfg, many.path(), Some(8)).unwrap();
    assert_eq!(a.cells.len(), 3);
    assert_eq!(a.failed(), 0);
    let index = std::fs::read_to_string(&a.index).unwrap();
    assert_eq!(index.lines().count(), 4);
    assert_eq!(index, std::fs::read_to_string(&b.index).unwrap());
    assert!(std::fs::read_to_string(&a.aggregate).unwrap().starts_with("cell,params.beta_rep,t,variable,value"));
}

#[test]
fn sweep_records_cell_failures() {
    let cfg = small("[sweep]\naxes = [{ path = \"params.m\", values = [0.5, 1.5] }]");
    let dir = tempfile::tempdir().unwrap();
    let out = run_sweep(&cfg, dir.path(), None).unwrap();
    assert_eq!(out.failed(), 1);
    let index = std::fs::read_to_string(&out.index).unwrap();
    assert!(index.contains("failed"));
}

#[test]
fn parity_time_grows_with_window() {
    let cfg = parse_config(
        "horizon = 100\nengine = \"mean_field\"\n[sweep]\naxes = [{ path = \"params.tau\", values = [1, 5, 20] }]\n",
        "t",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_sweep(&cfg, dir.path(), Some(2)).unwrap();
    let times: Vec<usize> = out
        .cells
        .iter()
        .map(|c| c.outcome.as_ref().unwrap().summary.equilibrium.parity_time.unwrap())
        .collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]), "{times:?}");
}

#[test]
fn binary_exit_codes_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("s.toml");
    std::fs::write(&cfg_path, "horizon = 5\n[params]\nn = 300\n").unwrap();

    let st = bin().args(["validate"]).arg(&cfg_path).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&st.stdout).contains("[params]"));

    let out = dir.path().join("env_out");
    let st = bin()
        .env("DUALMARKET_OUT_DIR", &out)
        .args(["--seed", "9", "simulate"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let resolved = std::fs::read_to_string(out.join("resolved.toml")).unwrap();
    assert!(resolved.contains("seed = 9"));

    let flag_out = dir.path().join("flag_out");
    let st = bin()
        .env("DUALMARKET_OUT_DIR", &out)
        .args(["--format", "json-lines", "--out-dir"])
        .arg(&flag_out)
        .arg("meanfield")
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(flag_out.join("timeseries.jsonl").exists());

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[params]\np_ql = 0.99\n").unwrap();
    assert_eq!(bin().arg("validate").arg(&bad).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));

    // An unwritable output location is a runtime failure.
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let st = bin().arg("--out-dir").arg(blocker.join("sub")).arg("simulate").arg(&cfg_path).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}
