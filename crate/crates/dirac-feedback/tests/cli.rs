use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dirac_feedback::io::read_table;

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-feedback")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn tilde_pa_writes_a_commented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["tilde-pa", "--a", "0.25", "--t-max", "3", "--out", "p.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# invocation: dirac-feedback tilde-pa --a 0.25"), "{first}");
    assert!(first.contains("config_hash: "));
    let t = read_table(&dir.path().join("p.csv")).unwrap();
    let tcol = t.columns[0].clone();
    let i = tcol.iter().position(|&x| x == 1.5).unwrap();
    assert!((t.columns[1][i] - 0.4375).abs() < 1e-12);
}

#[test]
fn negative_amplitude_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["tilde-pa", "--a", "-1", "--t-max", "2"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().lines().nth(1).unwrap().starts_with('t'));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cli(&["pa", "--a", "abc"], dir.path())), 2);
    assert_eq!(code(&cli(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&cli(&["pa", "--a", "50", "--method", "bromwich", "--sigma", "0.1"], dir.path())), 3);
    let forced = cli(&["pa", "--a", "50", "--method", "bromwich", "--sigma", "0.1", "--force", "--t-max", "1"], dir.path());
    assert_eq!(code(&forced), 0);
    assert!(String::from_utf8_lossy(&forced.stderr).contains("warning"));

    let toml = cli(&["scenario", "--preset", "asymmetric_counterexample"], dir.path());
    let text = String::from_utf8(toml.stdout).unwrap().replace("decreasing_right = false", "decreasing_right = true");
    fs::write(dir.path().join("bad.toml"), text).unwrap();
    assert_eq!(code(&cli(&["simulate", "--scenario", "bad.toml", "--out", "bad"], dir.path())), 4);
}

#[test]
fn simulate_writes_traces_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["simulate", "--preset", "monotone_tent", "--out", "run"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run = dir.path().join("run");
    let renewal = read_table(&run.join("renewal_trace.csv")).unwrap();
    assert_eq!(renewal.header, ["t", "u_plus", "u_minus", "u_right", "u_left"]);
    assert!(run.join("pde_trace.csv").exists());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["audit_passed"], serde_json::Value::Bool(true));
}

#[test]
fn region_is_deterministic() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let args = ["region", "--preset", "fig71", "--seed", "3", "--n-samples", "40", "--out", "r"];
    for d in &dirs {
        assert_eq!(code(&cli(&args, d.path())), 0);
    }
    let one = fs::read(dirs[0].path().join("r/survey.csv")).unwrap();
    let two = fs::read(dirs[1].path().join("r/survey.csv")).unwrap();
    assert_eq!(one, two);
    let dir = &dirs[0];
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "a,beta,class,min_value,argmin_t,ratio");
    assert_eq!(text.lines().count(), 42);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_samples"], 40);
}

#[test]
fn empty_region_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["region", "--a-range", "2", "1", "--out", "e"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("e/survey.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn dde_bound_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["dde", "--A", "1", "--t-end", "3", "--out", "d.csv"], dir.path());
    assert_eq!(code(&o), 0);
    let t = read_table(&dir.path().join("d.csv")).unwrap();
    let y = t.column("y").unwrap();
    let bound = t.column("bound").unwrap();
    assert!(y.iter().zip(bound).all(|(y, b)| y.abs() <= *b));
}

#[test]
fn reproduce_delay_figures() {
    let dir = tempfile::tempdir().unwrap();
    for fig in ["B.1", "B.2", "4.2"] {
        let o = cli(&["reproduce", "--figure", fig, "--out", "figs"], dir.path());
        assert_eq!(code(&o), 0, "{fig}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let names: Vec<String> = fs::read_dir(dir.path().join("figs"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n == "fig4_2_left.csv"), "{names:?}");
    assert_eq!(code(&cli(&["reproduce", "--figure", "9.9"], dir.path())), 2);
}
