//! Command-line behaviour: subcommands, flags, exit codes.

use std::process::Command;

fn hcm(args: &[&str], seed_env: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hcm"));
    cmd.args(args).env_remove("HCM_SEED");
    if let Some(seed) = seed_env {
        cmd.env("HCM_SEED", seed);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn list_shows_entries_and_identities() {
    let (code, out, _) = hcm(&["list"], None);
    assert_eq!(code, 0);
    for needle in ["sasakian_R3", "unit_tangent_surface(c=1)", "heisenberg_submersion", "2.16", "remarkable"] {
        assert!(out.contains(needle), "missing {needle}");
    }
}

#[test]
fn describe_reports_parameters_and_expectations() {
    let (code, out, _) = hcm(&["describe", "unit_tangent_surface(c=-1)"], None);
    assert_eq!(code, 0);
    assert!(out.contains("param c = -1"));
    assert!(out.contains("K-contact false"));
    let (code, _, err) = hcm(&["describe", "nosuch"], None);
    assert_eq!(code, 2);
    assert!(err.contains("nosuch"));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["verify"],
        &["verify", "nosuch"],
        &["verify", "sasakian_R3", "--format", "yaml"],
        &["verify", "sasakian_R3", "--order", "3"],
        &["verify", "sasakian_R3", "--step", "-1"],
        &["verify", "sasakian_R3", "--checks", "2.1,nope"],
        &["verify", "sasakian_R3", "--perturb", "0.5"],
        &["verify", "unit_tangent_surface(c=9)"],
        &["verify", "sasakian_R3", "--points", "0"],
        &["verify", "missing.toml"],
        &["convergence", "sasakian_R3", "--check", "2.16", "--steps", "1e-3"],
        &["frobnicate"],
    ];
    for args in cases {
        let (code, _, err) = hcm(args, None);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn exit_code_follows_the_checks() {
    assert_eq!(hcm(&["verify", "sasakian_R3", "--points", "5"], None).0, 0);
    assert_eq!(hcm(&["verify", "sasakian_R3", "--points", "5", "--perturb", "1e-2"], None).0, 1);
    assert_eq!(hcm(&["verify", "perturbed_hermitian", "--points", "5"], None).0, 1);
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let args = ["verify", "sasakian_R3", "--points", "4", "--checks", "2.1,2.2,2.16", "--format", "csv", "--out"];
    let mut args = args.to_vec();
    args.push(path.to_str().unwrap());
    let (code, out, _) = hcm(&args, None);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("id,applicable,samples,max_residual,mean_residual,tolerance,pass\n"));
}

#[test]
fn seed_comes_from_the_environment_unless_given() {
    let json = |args: &[&str], env| {
        let (code, out, _) = hcm(args, env);
        assert_eq!(code, 0);
        serde_json::from_str::<serde_json::Value>(&out).unwrap()["seed"].as_u64().unwrap()
    };
    let base = ["verify", "euclidean", "--points", "2", "--format", "json"];
    assert_eq!(json(&base, None), 42);
    assert_eq!(json(&base, Some("7")), 7);
    let mut explicit = base.to_vec();
    explicit.extend(["--seed", "9"]);
    assert_eq!(json(&explicit, Some("7")), 9);
}

#[test]
fn timing_is_opt_in() {
    let base = ["verify", "euclidean", "--points", "2", "--format", "json"];
    let (_, out, _) = hcm(&base, None);
    assert!(!out.contains("runtime_ms"));
    let mut timed = base.to_vec();
    timed.push("--timing");
    let (_, out, _) = hcm(&timed, None);
    assert!(out.contains("runtime_ms"));
}

#[test]
fn convergence_reports_second_order() {
    let (code, out, _) = hcm(
        &["convergence", "unit_tangent_surface(c=4)", "--check", "2.16", "--steps", "1e-3,5e-4,2.5e-4", "--points", "5", "--format", "json"],
        None,
    );
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for r in v["ratios"].as_array().unwrap() {
        let r = r.as_f64().unwrap();
        assert!((3.5..=4.5).contains(&r), "{r}");
    }
}
