//! The `exchkit` binary: exit codes, report contents and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn exchkit(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_exchkit"));
    cmd.args(args).env_remove("EXCHKIT_SEED").env_remove("EXCHKIT_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn tv_bound_reports_exact_fractions() {
    let out = exchkit(&["tv-bound", "--N", "10", "--k", "3"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["exact_gap_bound"], "14/25");
    assert_eq!(r["results"]["coarse_bound"], "3/5");
    assert_eq!(r["pass"], true);
    assert_eq!(r["tool"], "exchkit");
    assert_eq!(r["config"]["N"], 10);
}

#[test]
fn json_and_csv_carry_the_same_values() {
    let j = json(&exchkit(&["tv-bound", "--urn", "a,a,b", "--k", "2"], &[]));
    let csv = exchkit(&["tv-bound", "--urn", "a,a,b", "--k", "2", "--format", "csv"], &[]);
    let text = String::from_utf8(csv.stdout).unwrap();
    for (key, value) in j["results"].as_object().unwrap() {
        let v = match value {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        assert!(text.contains(&format!("result,{key},{v},")), "{key} missing from csv");
    }
    assert_eq!(j["results"]["tv_distance"], "4/9");
}

#[test]
fn decomposition_command_passes() {
    let out = exchkit(&["verify-decomposition", "--urn", "a,a,b", "--k", "2"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["coefficient_sum"], "1/1");
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "reconstruction_exact" && c["pass"] == true));
}

#[test]
fn exact_law_lists_the_support() {
    let r = json(&exchkit(&["exact-law", "--urn", "a,a,b", "--k", "2"], &[]));
    assert_eq!(r["results"]["law.(a,a)"], "1/3");
    assert!(r["results"].get("law.(b,b)").is_none());
    let r = json(&exchkit(&["exact-law", "--urn", "a,a,b", "--k", "2", "--with-replacement"], &[]));
    assert_eq!(r["results"]["law.(b,b)"], "1/9");
}

#[test]
fn invalid_configurations_exit_with_two() {
    assert_eq!(exchkit(&[], &[]).status.code(), Some(2));
    assert_eq!(exchkit(&["tv-bound", "--k", "2"], &[]).status.code(), Some(2));
    assert_eq!(exchkit(&["exact-law", "--urn", "a,b", "--k", "3"], &[]).status.code(), Some(2));
    assert_eq!(exchkit(&["sufficiency", "--spec", "/nonexistent.json"], &[]).status.code(), Some(2));
    let spec = data("spec.json");
    let spec = spec.to_str().unwrap();
    assert_eq!(exchkit(&["resample-test", "--spec", spec], &[]).status.code(), Some(2), "seed is required");
    assert_eq!(exchkit(&["resample-test", "--spec", spec, "--seed", "1", "--reps", "0"], &[]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"command\": \"tv-bound\", \"typo\": 1}").unwrap();
    assert_eq!(exchkit(&["--config", bad.to_str().unwrap()], &[]).status.code(), Some(2));
    std::fs::write(&bad, "").unwrap();
    assert_eq!(exchkit(&["--config", bad.to_str().unwrap()], &[]).status.code(), Some(2));
    assert_eq!(exchkit(&["tv-bound", "--N", "3", "--k", "2"], &[("EXCHKIT_THREADS", "zero")]).status.code(), Some(2));
}

#[test]
fn enumeration_guard_exits_with_three() {
    let urn: Vec<String> = (0..60).map(|i| format!("p{i}")).collect();
    let out = exchkit(&["exact-law", "--urn", &urn.join(","), "--k", "4"], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn failing_invariant_is_recorded_and_exits_with_one() {
    let out = exchkit(&["sufficiency", "--spec", data("skewed_spec.json").to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["pass"], false);
    assert_eq!(r["checks"][0]["name"], "multi_exchangeable");
}

#[test]
fn config_files_flags_and_environment_compose() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let cfg = data("resample.json");
    let cfg = cfg.to_str().unwrap();
    let run = |out: &Path, extra: &[&str], envs: &[(&str, &str)]| {
        let mut args = vec!["--config", cfg, "--reps", "500", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        exchkit(&args, envs).status.code()
    };
    assert_eq!(run(&a, &[], &[]), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(report["seed"], 20240601);
    assert_eq!(report["reps"], 500);

    assert_eq!(run(&b, &[], &[("EXCHKIT_SEED", "99")]), Some(0));
    let env_seeded: serde_json::Value = serde_json::from_slice(&std::fs::read(&b).unwrap()).unwrap();
    assert_eq!(env_seeded["seed"], 99);

    assert_eq!(run(&b, &["--seed", "5"], &[("EXCHKIT_SEED", "99")]), Some(0));
    let flag_seeded: serde_json::Value = serde_json::from_slice(&std::fs::read(&b).unwrap()).unwrap();
    assert_eq!(flag_seeded["seed"], 5);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = data("resample.json");
    let mut reports = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}.json"));
        let code = exchkit(
            &["--config", cfg.to_str().unwrap(), "--reps", "3000", "--out", out.to_str().unwrap()],
            &[("EXCHKIT_THREADS", threads)],
        )
        .status
        .code();
        assert_eq!(code, Some(0));
        reports.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn convergence_command_reports_both_directions() {
    let out = exchkit(&["convergence", "--family", data("family.json").to_str().unwrap(), "--tol", "1e-2"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["results"]["vector_to_system"], "SUPPORTS_EQUIVALENCE");
    assert_eq!(r["results"]["system_to_vector"], "SUPPORTS_EQUIVALENCE");
    assert_eq!(r["results"]["grid.06.r"], "64/1");
    assert_eq!(r["results"]["grid.06.fdd_gap"], "1/128");
}
