use std::path::PathBuf;
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singbvp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_emits_kernel_json() {
    let o = run(&["solve", problem("simple.json").to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pieces = v["greens_function"]["pieces"].as_array().unwrap();
    assert_eq!(pieces.len(), 2);
    assert_eq!(pieces[0]["region"], "xi<=x");
    assert!(v["report"]["exceptional"]["cofinite"].is_array());
}

#[test]
fn eval_exact_writes_csv() {
    let o = run(&["eval", problem("simple.json").to_str().unwrap(), "--forcing", "1", "--grid", "2", "--mode", "exact"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "x,u\n0.5,-0.0833333333333333\n1,0\n");
}

#[test]
fn eval_to_file() {
    let dir = std::env::temp_dir().join(format!("singbvp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("u.csv");
    let o = run(&[
        "eval",
        problem("simple.json").to_str().unwrap(),
        "--forcing",
        "x",
        "--grid",
        "4",
        "--csv",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_reports_exact_pass() {
    let o = run(&["verify", problem("ivp-two-point.json").to_str().unwrap(), "--forcing", "x^2 + 1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["mode"], "exact");
}

#[test]
fn float_input_is_rejected() {
    let dir = std::env::temp_dir().join(format!("singbvp-cli-float-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad.json");
    std::fs::write(&p, r#"{"operator": {"coeffs": ["1", "1"]}, "interval": {"b": 0.5}}"#).unwrap();
    let o = run(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/2"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn kirchhoff_preset_runs() {
    let o = run(&["kirchhoff", "--grid", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "x,u");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("0.9,"));
}

#[test]
fn kirchhoff_rejects_beta_one() {
    let o = run(&["kirchhoff", "--beta", "1"]);
    assert_eq!(o.status.code(), Some(1));
}
