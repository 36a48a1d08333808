use std::path::PathBuf;
use std::process::{Command, Output};

fn gcx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcx")).args(args).output().expect("run gcx")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gcx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn report(path: &PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_group_exits_zero() {
    let out = scratch("locus.json");
    let o = gcx(&["check", "locus", "--samples", "20", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("PASS locus"), "{stdout}");
    let r = report(&out);
    assert_eq!(r[0]["check"], "locus");
    assert_eq!(r[0]["params"]["samples"], 20);
}

#[test]
fn failing_check_exits_one() {
    let out = scratch("strict.json");
    let o = gcx(&["check", "algebra", "--samples", "30", "--tol", "1e-30", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(&out);
    let checks = r.as_array().unwrap();
    assert!(checks.iter().any(|c| c["pass"] == false));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(gcx(&["check", "everything"]).status.code(), Some(2));
    assert_eq!(gcx(&["check", "all", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(gcx(&["check", "quotient", "--m", "4", "--k", "2"]).status.code(), Some(2));
    assert_eq!(gcx(&["check", "all", "--input", "/nonexistent/config.json"]).status.code(), Some(2));
    let bad = scratch("bad-config.json");
    std::fs::write(&bad, r#"{"samples": 10, "colour": "blue"}"#).unwrap();
    assert_eq!(gcx(&["check", "all", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_file_overrides_flags() {
    let cfg = scratch("config.json");
    std::fs::write(&cfg, r#"{"seed": 7, "samples": 15, "quotients": [{"m": 3, "k": 1}]}"#).unwrap();
    let out = scratch("config-report.json");
    let o = gcx(&["check", "quotient", "--samples", "999", "--input", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    let checks = r.as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["check"], "quotient-m3-k1");
    assert_eq!(checks[0]["params"]["seed"], 7);
    assert_eq!(checks[0]["samples"], 15);
}

#[test]
fn single_quotient_from_flags() {
    let out = scratch("q52.json");
    let o = gcx(&["check", "quotient", "--m", "5", "--k", "-2", "--samples", "10", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&out)[0]["check"], "quotient-m5-k-2");
}

#[test]
fn seed_changes_samples_but_not_outcome() {
    let (a, b) = (scratch("seed1.json"), scratch("seed2.json"));
    assert_eq!(gcx(&["check", "bfield", "--samples", "10", "--seed", "1", "--output", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(gcx(&["check", "bfield", "--samples", "10", "--seed", "2", "--output", b.to_str().unwrap()]).status.code(), Some(0));
    assert_ne!(report(&a)[0]["worst_point"], report(&b)[0]["worst_point"]);
}

#[test]
fn normal_form_command() {
    let input = scratch("rho.json");
    // e^(i ω₀) with ω₀ = dx1∧dy1 + dx2∧dy2
    std::fs::write(
        &input,
        r#"{"dim": 4, "terms": [
            {"indices": [], "re": 1, "im": 0},
            {"indices": [1, 2], "re": 0, "im": 1},
            {"indices": [3, 4], "re": 0, "im": 1},
            {"indices": [1, 2, 3, 4], "re": -1, "im": 0}
        ]}"#,
    )
    .unwrap();
    let o = gcx(&["normal-form", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let nf: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(nf["type"], 0);
    assert_eq!(nf["nondegenerate"], true);

    std::fs::write(&input, r#"{"dim": 4, "terms": [{"indices": [1], "re": 1, "im": 0}, {"indices": [], "re": 1, "im": 0}]}"#).unwrap();
    let o = gcx(&["normal-form", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(&input, "not json").unwrap();
    assert_eq!(gcx(&["normal-form", "--input", input.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bracket_command() {
    let input = scratch("bracket.json");
    // [∂1, x1 ∂2] = ∂2
    std::fs::write(
        &input,
        r#"{
            "u": {"dim": 4, "vec": [{"op": "const", "re": 1}, {"op": "const", "re": 0}, {"op": "const", "re": 0}, {"op": "const", "re": 0}],
                  "cov": [{"op": "const", "re": 0}, {"op": "const", "re": 0}, {"op": "const", "re": 0}, {"op": "const", "re": 0}]},
            "v": {"dim": 4, "vec": [{"op": "const", "re": 0}, {"op": "coord", "index": 1}, {"op": "const", "re": 0}, {"op": "const", "re": 0}],
                  "cov": [{"op": "const", "re": 0}, {"op": "const", "re": 0}, {"op": "const", "re": 0}, {"op": "const", "re": 0}]},
            "point": [0.3, 0.1, 0.0, 0.0]
        }"#,
    )
    .unwrap();
    let o = gcx(&["bracket", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vec"][1][0], 1.0);
    assert_eq!(v["vec"][0][0], 0.0);
}

#[test]
fn quotient_report_records_b_discrepancy() {
    let out = scratch("q32.json");
    let o = gcx(&["check", "quotient", "--m", "3", "--k", "2", "--samples", "10", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    let notes: Vec<String> = r[0]["notes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap().to_string()).collect();
    assert!(notes.iter().any(|n| n.contains("differs from B by 2 dlog r ^ d theta2")), "{notes:?}");
}

#[test]
fn seed_falls_back_to_environment() {
    let out = scratch("env-seed.json");
    let o = Command::new(env!("CARGO_BIN_EXE_gcx"))
        .args(["check", "locus", "--samples", "5", "--output", out.to_str().unwrap()])
        .env("GCX_SEED", "1234")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&out)[0]["params"]["seed"], 1234);
}
