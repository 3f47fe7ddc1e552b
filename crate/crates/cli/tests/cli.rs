use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel)
}

fn local(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(rel)
}

fn conifold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conifold")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn compositions_default_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let rp = dir.path().join("r.json");
    let o = conifold(&["verify-compositions", "--report", rp.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = report(&rp);
    let pairs: usize = r["parameters"]["pairs"].as_str().unwrap().parse().unwrap();
    assert!(pairs >= 4000);
    assert_eq!(r["summary"]["fail"], 0);
    assert!(r["summary"]["reported-discrepancy"].as_u64().unwrap() > 0);
    assert!(r["records"].as_array().unwrap().iter().any(|c| c["status"] == "reported-discrepancy"));
}

#[test]
fn compositions_units_only_and_localized() {
    let o = conifold(&["verify-compositions", "--max-a", "0"]);
    assert_eq!(code(&o), 0);
    let o = conifold(&["verify-compositions", "--max-a", "1", "--max-i", "1", "--localized"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("localized/"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&conifold(&["verify-compositions", "--max-a", "many"])), 2);
    assert_eq!(code(&conifold(&["verify-hms", "--max-slope", "0"])), 2);
    assert_eq!(code(&conifold(&["no-such-command"])), 2);
    assert_eq!(code(&conifold(&["skyscraper", "--lambda", "0"])), 2);
    assert_eq!(code(&conifold(&["verify-hms", "--force-offset", "R.Q"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_conifold")).arg("wallcross").env("CONIFOLD_WORKERS", "none").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn hms_small_slopes() {
    let o = conifold(&["verify-hms", "--max-slope", "1"]);
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_conifold"))
        .args(["verify-hms", "--max-slope", "3"])
        .env("CONIFOLD_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn hms_corrupted_offsets_fail() {
    let o = conifold(&["verify-hms", "--max-slope", "2", "--standard-only", "--force-offset", "P.P=1"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn transfer_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let export = dir.path().join("a.json");
    let o = conifold(&["transfer", "--export", export.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("m3(")).collect();
    assert_eq!(lines.len(), 4);
    assert!(out.contains("PASS  dictionary"));
    let exported: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&export).unwrap()).unwrap();
    assert_eq!(exported["objects"], serde_json::json!(["S0", "S1"]));
}

#[test]
fn transfer_fixture_and_bad_input() {
    let f = fixture("vanishing_cycle_dga.json");
    let o = conifold(&["transfer", f.to_str().unwrap(), "--max-arity", "3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(!stdout(&o).contains("vanishing/"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"objects\": [").unwrap();
    assert_eq!(code(&conifold(&["transfer", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&conifold(&["transfer", "/nonexistent/dga.json"])), 2);
}

#[test]
fn dimer_golden_outputs() {
    let f = fixture("conifold_dimer.json");
    for (emit, golden) in [("quiver", "golden/conifold_quiver.json"), ("ainfinity", "golden/conifold_ainfinity.json")] {
        let o = conifold(&["dimer", f.to_str().unwrap(), "--emit", emit]);
        assert_eq!(code(&o), 0);
        let got: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let want: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(local(golden)).unwrap()).unwrap();
        assert_eq!(got, want, "{emit}");
    }
}

#[test]
fn dimer_bad_bipartition() {
    let o = conifold(&["dimer", local("inputs/bad_bipartition.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("black"));
}

#[test]
fn paths_labels() {
    let o = conifold(&["paths", fixture("paths/gamma1.json").to_str().unwrap(), fixture("paths/sigma1.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("O_{X⁰}(1)"));
    assert!(out.contains("O_E(-1)"));
    let o = conifold(&["paths", local("inputs/touching_path.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn wallcross_and_skyscraper() {
    assert_eq!(code(&conifold(&["wallcross"])), 0);
    let o = conifold(&["skyscraper", "--lambda", "1/2", "--max-index", "2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("  1 | α·T^1/2 | α^2·T"));
    assert!(out.contains("  -1 | -α·T^1/2 | -α^2·T"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = conifold(&["verify-hms", "--max-slope", "2", "--report", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}
