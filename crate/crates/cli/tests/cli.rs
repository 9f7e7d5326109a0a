use std::path::Path;
use std::process::{Command, Output};

use monogamy_core::io::state_to_json;
use monogamy_core::monogamy::build_example_state;
use serde_json::Value;

fn monogamy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogamy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .parse()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn measures_on_example_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "ex.json", &state_to_json(&build_example_state()));
    let o = monogamy(&["measures", &file]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!((field(&text, "c_a_bc") - 1.0).abs() < 1e-6);
    assert!(field(&text, "c_ab").abs() < 1e-6);
    assert!((field(&text, "c_ac_assist") - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-4);
}

#[test]
fn measures_on_product_state() {
    let dir = tempfile::tempdir().unwrap();
    // |0⟩_A ⊗ |Φ⁺⟩_BC at d = 2
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let file = write(
        dir.path(),
        "prod.json",
        &format!(r#"{{"dims": [2, 2, 2], "amps": [[{h}, 0], [0, 0], [0, 0], [{h}, 0], [0, 0], [0, 0], [0, 0], [0, 0]]}}"#),
    );
    let o = monogamy(&["measures", "--format", "machine", &file]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["result"];
    assert!(r["c_a_bc"].as_f64().unwrap().abs() < 1e-9);
    assert!(r["c_ac_assist"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(r["product_form"], "AFactor");
    assert_eq!(v["config"]["seed"], 42);
}

#[test]
fn malformed_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.json", r#"{"dims": [2, 2, 2], "amps": [[1, 0], [0]]}"#);
    let o = monogamy(&["measures", &file]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("amps"), "{}", stderr(&o));

    let file = write(dir.path(), "junk.json", "not json");
    assert_eq!(monogamy(&["measures", &file]).status.code(), Some(2));
}

#[test]
fn wrong_dims_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "qq.json", r#"{"dims": [2, 2], "amps": [[1, 0], [0, 0], [0, 0], [0, 0]]}"#);
    assert_eq!(monogamy(&["measures", &file]).status.code(), Some(3));
    let file = write(dir.path(), "qqq.json", &state_to_json(&build_example_state()));
    assert_eq!(monogamy(&["bsa", &file]).status.code(), Some(3));
}

#[test]
fn missing_file_exits_4() {
    assert_eq!(monogamy(&["measures", "/nonexistent/state.json"]).status.code(), Some(4));
}

#[test]
fn example_passes() {
    let o = monogamy(&["example"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("result: PASS"));
}

#[test]
fn theorems_usage_and_small_runs() {
    assert_eq!(monogamy(&["theorems", "--which", "1", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(monogamy(&["theorems", "--which", "3"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump");
    for which in ["1", "2"] {
        let o = monogamy(&[
            "theorems", "--which", which, "--d", "3", "--samples", "6", "--restarts", "4",
            "--dump-dir", dump.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("failures: 0"));
    }
}

#[test]
fn scan_is_deterministic_and_includes_example() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = monogamy(&[
            "scan", "--d", "3", "--samples", "100", "--seed", "7", "--restarts", "4",
            "--include-example", "--workers", workers, "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", "1");
    let b = run("b.json", "3");
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["samples"], 100);
    let example = &v["injected"][0];
    assert_eq!(example["label"], "example");
    assert!((example["residual"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-4);
}

#[test]
fn scan_unwritable_out_exits_4() {
    let o = monogamy(&["scan", "--d", "2", "--samples", "3", "--out", "/nonexistent/dir/s.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bsa_werner() {
    let o = monogamy(&["bsa", "--werner", "0.75", "--restarts", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((field(&stdout(&o), "lambda") - 0.5).abs() < 1e-3);

    let o = monogamy(&["bsa", "--werner", "0.5", "--restarts", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((field(&stdout(&o), "lambda") - 1.0).abs() < 1e-9);

    assert_eq!(monogamy(&["bsa"]).status.code(), Some(2));
}
