//! End-to-end tests of the `heitler` binary: output schemas, pinned values,
//! determinism, exit codes, and the figure/replay manifest round trip.

use assert_cmd::Command;
use heitler_cli::config::{
    CommandKind, DetuningSpec, OptimizeSpec, RunConfig, SweepSpec,
};
use heitler::model::FlatParams;
use predicates::prelude::*;
use std::f64::consts::PI;
use std::fs;

fn heitler() -> Command {
    Command::cargo_bin("heitler").unwrap()
}

fn stdout_of(cmd: &mut Command) -> String {
    let out = cmd.assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

// --- single-command output schemas and pinned values ---------------------

#[test]
fn conditions_pins_both_branches_and_the_pole() {
    let out = stdout_of(heitler().args(["conditions", "--Gamma", "1"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "branch,F,phi");
    assert_eq!(lines.len(), 4);
    // 2 -/+ sqrt(2) at phase pi, pole at amplitude 2.
    assert!(lines[1].starts_with("minus,5.85786437627e-1,3.14159265359e0"));
    assert!(lines[2].starts_with("plus,3.41421356237e0,3.14159265359e0"));
    assert!(lines[3].starts_with("superbunching,2.00000000000e0,3.14159265359e0"));
}

#[test]
fn g2_uncorrected_quarter_on_both_engines() {
    for engine in ["analytic", "numeric"] {
        let out = stdout_of(heitler().args(["g2", "--Gamma", "1", "--engine", engine]));
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "engine,g2,flag");
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[0], engine);
        let v: f64 = fields[1].parse().unwrap();
        assert!(
            (v - 0.25).abs() < 2e-3,
            "{engine} g2 = {v}, expected about 0.25"
        );
        assert_eq!(fields[2], "ok");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "map", "--Gamma", "0.2", "--engine", "analytic", "--f-from", "0", "--f-to", "3",
        "--f-steps", "7", "--phi-from", "0", "--phi-to", "6.2832", "--phi-steps", "5",
    ];
    let first = stdout_of(heitler().args(args));
    let second = stdout_of(heitler().args(args));
    assert_eq!(first, second);
    assert!(!first.is_empty());
}

#[test]
fn map_schema_and_row_count() {
    let out = stdout_of(heitler().args([
        "map", "--Gamma", "0.2", "--engine", "analytic", "--f-from", "0", "--f-to", "2.5",
        "--f-steps", "6", "--phi-from", "0", "--phi-to", "6.2832", "--phi-steps", "4",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "F,phi,g2,flag");
    assert_eq!(lines.len(), 1 + 6 * 4);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 4);
        assert!(line.ends_with(",ok") || line.ends_with(",diverged"));
    }
}

#[test]
fn g2tau_analytic_law_is_pinned() {
    let out = stdout_of(heitler().args([
        "g2tau", "--Gamma", "0.2", "--engine", "analytic", "--tau-max", "1", "--tau-step", "0.5",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "tau,g2");
    assert_eq!(lines.len(), 4);
    // (1 - exp(-Gamma tau / 2))^2 at tau = 0.5, Gamma = 0.2.
    assert_eq!(lines[2], "5.00000000000e-1,2.37856903453e-3");
}

#[test]
fn out_file_matches_stdout_bytes() {
    let args = ["conditions", "--Gamma", "0.2"];
    let streamed = stdout_of(heitler().args(args));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conds.csv");
    heitler()
        .args(args)
        .arg("--out")
        .arg(&path)
        .assert()
        .success()
        .stdout(predicate::str::contains("wrote "));
    assert_eq!(fs::read_to_string(&path).unwrap(), streamed);
}

#[test]
fn optimize_reports_the_unbounded_pole() {
    let out = stdout_of(heitler().args(["optimize", "--Gamma", "0.2", "--kind", "max"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "kind,value,F,phi,evaluations");
    assert!(lines[1].starts_with("max,unbounded,2.00000000000e0,3.14159265359e0,"));
}

#[test]
fn optimize_dephased_minimum_matches_library_value() {
    let out = stdout_of(heitler().args([
        "optimize", "--Gamma", "0.2", "--gamma-phi", "0.2", "--kind", "min",
    ]));
    let fields: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[0], "min");
    let value: f64 = fields[1].parse().unwrap();
    let at_phi: f64 = fields[3].parse().unwrap();
    assert!((value - 0.0982).abs() < 3e-3, "minimum {value}");
    assert!((at_phi - PI).abs() < 1e-3, "phase {at_phi}");
}

#[test]
fn validate_emits_small_deviations_and_a_summary() {
    let assert = heitler().args(["validate", "--Gamma", "0.2"]).assert().success();
    let out = assert.get_output();
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "F,phi,analytic,numeric,rel_diff");
    assert_eq!(lines.len(), 1 + 20);
    for line in &lines[1..] {
        let rel: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(rel < 1e-3, "probe deviation {rel} in {line}");
    }
    assert!(stderr.contains("max relative deviation"));
}

#[test]
fn convergence_json_has_six_rows_and_a_flag() {
    let out = stdout_of(heitler().args([
        "convergence", "--Gamma", "0.2", "--g", "0.01", "--format", "json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 6);
    assert_eq!(doc["flagged"], serde_json::Value::Bool(false));
    assert!(doc["max_rel_diff"].as_f64().unwrap() < 5e-3);
}

#[test]
fn steady_json_is_valid_and_keyed_by_observable() {
    let out = stdout_of(heitler().args(["steady", "--Gamma", "1", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["observable"], "n_sigma");
    assert!(rows[0]["value"].as_f64().unwrap() > 0.0);
}

// --- exit codes ----------------------------------------------------------

#[test]
fn invalid_parameter_exits_2() {
    heitler()
        .args(["g2", "--Gamma", "-1"])
        .assert()
        .code(2)
        .stderr(predicate::str::contains("error:"));
}

#[test]
fn unknown_flag_exits_2() {
    heitler().args(["g2", "--frequency", "1"]).assert().code(2);
}

#[test]
fn analytic_outside_closed_forms_exits_4() {
    heitler()
        .args([
            "g2", "--engine", "analytic", "--gamma-phi", "0.2", "--delta-sigma", "0.5",
        ])
        .assert()
        .code(4)
        .stderr(predicate::str::contains("error:"));
}

#[test]
fn gn_has_no_analytic_engine_and_exits_4() {
    heitler()
        .args(["gn", "--engine", "analytic", "--order", "3"])
        .assert()
        .code(4);
}

#[test]
fn unconverged_single_point_exits_3() {
    heitler()
        .args(["g2", "--Gamma", "0.2", "--g", "0.5"])
        .assert()
        .code(3)
        .stderr(predicate::str::contains("did not converge"));
}

#[test]
fn missing_manifest_exits_1() {
    heitler()
        .args(["replay", "--manifest", "/nonexistent/m.json"])
        .assert()
        .code(1);
}

#[test]
fn negative_values_are_accepted_as_flag_arguments() {
    heitler()
        .args(["g2", "--delta-sigma", "-0.5", "--delta-a", "-0.5"])
        .assert()
        .success();
}

// --- figures and replay --------------------------------------------------

#[test]
fn fig1_set_replays_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    heitler()
        .args(["figures", "--kind", "fig1", "--out-dir"])
        .arg(&first)
        .assert()
        .success();

    let names = [
        "fig1a_map.csv", "fig1b_map.csv", "fig1c_map.csv",
        "fig1d_g2.csv", "fig1e_g3.csv", "fig1f_g4.csv",
    ];
    for name in names {
        assert!(first.join(name).is_file(), "missing {name}");
    }

    heitler()
        .args(["replay", "--manifest"])
        .arg(first.join("fig1_manifest.json"))
        .arg("--out-dir")
        .arg(&second)
        .assert()
        .success();
    for name in names {
        assert_eq!(
            fs::read_to_string(first.join(name)).unwrap(),
            fs::read_to_string(second.join(name)).unwrap(),
            "replay changed {name}"
        );
    }

    // Spot value: the uncorrected filtered correlation at matched linewidth
    // is 1/4 (first row of the survey at F = 0).
    let map = fs::read_to_string(first.join("fig1b_map.csv")).unwrap();
    let mut found = false;
    for line in map.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (fv, phi): (f64, f64) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        if fv == 0.0 && (phi - PI).abs() < 0.03 {
            let v: f64 = f[2].parse().unwrap();
            assert!((v - 0.25).abs() < 1e-9, "uncorrected value {v}");
            found = true;
            break;
        }
    }
    assert!(found, "no F = 0 row near phase pi in fig1b");
}

#[test]
fn fig3_set_runs_and_replays_in_place() {
    let dir = tempfile::tempdir().unwrap();
    heitler()
        .args(["figures", "--kind", "fig3", "--out-dir"])
        .arg(dir.path())
        .assert()
        .success();

    let names = [
        "fig3a_uncorrected.csv", "fig3a_corrected.csv",
        "fig3b_uncorrected.csv", "fig3b_corrected.csv",
        "fig3b_far_detuned.csv", "fig3b_far_detuned_law.csv",
        "fig3c_uncorrected.csv", "fig3c_corrected.csv",
        "fig3_reference.csv",
    ];
    for name in names {
        assert!(dir.path().join(name).is_file(), "missing {name}");
    }

    // The dephased uncorrected trace starts at the resonant dephased value.
    let c = fs::read_to_string(dir.path().join("fig3c_uncorrected.csv")).unwrap();
    let first_value: f64 = c.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((first_value - 0.727).abs() < 2e-3, "fig3c start {first_value}");

    // The corrected trace starts far below the uncorrected one.
    let r = fs::read_to_string(dir.path().join("fig3c_corrected.csv")).unwrap();
    let corr_value: f64 = r.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(corr_value < 0.06, "fig3c corrected start {corr_value}");

    // Replaying without --out-dir rewrites next to the manifest.
    let before = fs::read_to_string(dir.path().join("fig3_reference.csv")).unwrap();
    heitler()
        .args(["replay", "--manifest"])
        .arg(dir.path().join("fig3_manifest.json"))
        .assert()
        .success();
    let after = fs::read_to_string(dir.path().join("fig3_reference.csv")).unwrap();
    assert_eq!(before, after);
}

#[test]
fn detuning_sweep_manifest_replays_with_uncorrected_column() {
    let mut cfg = RunConfig::new(
        CommandKind::Optimize,
        FlatParams {
            gamma: 0.2,
            gamma_phi: 0.2,
            ..FlatParams::default()
        },
    );
    cfg.optimize = Some(OptimizeSpec {
        kind: "min".into(),
        coarse_f: Some(5),
        coarse_phi: Some(4),
        x_tol: Some(1e-3),
        ..OptimizeSpec::default()
    });
    cfg.detuning = Some(DetuningSpec {
        delta_sigma_from: -0.5,
        delta_sigma_to: 0.5,
        delta_sigma_steps: 2,
        delta_a_from: -0.5,
        delta_a_to: 0.5,
        delta_a_steps: 2,
        include_uncorrected: true,
    });
    cfg.out = Some("mini_min.csv".into());

    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("mini_manifest.json");
    fs::write(&manifest, serde_json::to_string_pretty(&[cfg]).unwrap()).unwrap();

    heitler()
        .args(["replay", "--manifest"])
        .arg(&manifest)
        .assert()
        .success();

    let out = fs::read_to_string(dir.path().join("mini_min.csv")).unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "delta_sigma,delta_a,kind,value,F,phi,evaluations,uncorrected"
    );
    assert_eq!(lines.len(), 1 + 4);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let optimized: f64 = fields[3].parse().unwrap();
        let uncorrected: f64 = fields[7].parse().unwrap();
        assert!(
            optimized < uncorrected,
            "optimized {optimized} should beat uncorrected {uncorrected}"
        );
    }
}

#[test]
fn manifest_entry_without_output_name_exits_2() {
    let cfg = RunConfig::new(CommandKind::Conditions, FlatParams::default());
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("bad_manifest.json");
    fs::write(&manifest, serde_json::to_string_pretty(&[cfg]).unwrap()).unwrap();
    heitler()
        .args(["replay", "--manifest"])
        .arg(&manifest)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("no output filename"));
}

// --- figure builders (structural; the heavy set is not executed here) ----

#[test]
fn fig2_builder_shapes_without_running() {
    let configs = heitler_cli::figures::figure_configs("fig2").unwrap();
    assert_eq!(configs.len(), 6);
    let names: Vec<&str> = configs.iter().map(|c| c.out.as_deref().unwrap()).collect();
    assert_eq!(
        names,
        [
            "fig2a_map.csv", "fig2b_map.csv", "fig2c_map.csv", "fig2d_map.csv",
            "fig2e_max.csv", "fig2f_min.csv"
        ]
    );

    for (i, cfg) in configs.iter().enumerate().take(4) {
        assert_eq!(cfg.command, CommandKind::Map);
        let expect_engine = if i < 2 { "analytic" } else { "numeric" };
        assert_eq!(cfg.engine.as_deref(), Some(expect_engine));
        let expect_dephasing = if i < 2 { 0.0 } else { 0.2 };
        assert_eq!(cfg.params.gamma_phi, expect_dephasing);
        assert_eq!(cfg.params.delta_sigma, 0.5);
        assert_eq!(cfg.params.delta_a, if i % 2 == 0 { 0.5 } else { 0.0 });
        assert!(cfg.sweep.is_none(), "maps use the standard survey grid");
    }

    for (cfg, kind, uncorrected) in
        [(&configs[4], "max", false), (&configs[5], "min", true)]
    {
        assert_eq!(cfg.command, CommandKind::Optimize);
        let opt = cfg.optimize.as_ref().unwrap();
        assert_eq!(opt.kind, kind);
        assert_eq!(opt.coarse_f, Some(13));
        let det = cfg.detuning.as_ref().unwrap();
        assert_eq!(det.delta_sigma_steps, 15);
        assert_eq!(det.delta_a_steps, 15);
        assert_eq!(det.include_uncorrected, uncorrected);
    }
}

#[test]
fn unknown_figure_kind_is_rejected() {
    assert!(heitler_cli::figures::figure_configs("fig9").is_err());
    heitler()
        .args(["figures", "--kind", "fig9", "--out-dir", "/tmp"])
        .assert()
        .code(2);
}

#[test]
fn manifest_serialization_round_trips_identically() {
    for kind in ["fig1", "fig2"] {
        let configs = heitler_cli::figures::figure_configs(kind).unwrap();
        let json = serde_json::to_string_pretty(&configs).unwrap();
        let back: Vec<RunConfig> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, configs, "round trip changed {kind}");
        let again = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(again, json, "re-serialization changed {kind}");
    }
}

#[test]
fn sweep_defaults_match_the_library_survey_grid() {
    let spec = SweepSpec::default();
    let grid = heitler::SweepGrid::<f64>::default_grid(
        FlatParams::default().to_system::<f64>().unwrap(),
    )
    .unwrap();
    assert_eq!(spec.f_values().unwrap(), grid.f_values);
    assert_eq!(spec.phi_values().unwrap(), grid.phi_values);
}
