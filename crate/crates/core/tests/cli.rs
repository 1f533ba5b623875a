use std::process::{Command, Output};

fn llgpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llgpq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ci_gpq_on_grinder_json() {
    let o = llgpq(&[
        "--json", "ci", "--data", "builtin:grinder", "--t", "65.55", "--method", "gpq", "--seed", "42",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"]["seed"], 42);
    let row = &v["intervals"][0];
    assert_eq!(row["method"], "LSE-GPQ");
    assert!((row["lower"].as_f64().unwrap() - 0.315).abs() < 0.03);
    assert!((row["upper"].as_f64().unwrap() - 0.789).abs() < 0.03);
}

#[test]
fn ci_without_seed_reports_one() {
    let o = llgpq(&["ci", "--data", "builtin:grinder", "--t", "96.05", "--method", "wald"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed:"));
}

#[test]
fn gof_reactor_from_file() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/reactor.csv");
    let o = llgpq(&["--json", "gof", "--data", path, "--fit", "mle"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["gof"]["statistic"].as_f64().unwrap() - 0.090).abs() < 0.005);
    assert!((v["gof"]["p_value"].as_f64().unwrap() - 0.984).abs() < 0.02);
}

#[test]
fn fit_text_output() {
    let o = llgpq(&["fit", "--data", "builtin:grinder"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("LSE") && text.contains("MLE"));
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cells.toml");
    std::fs::write(
        &cfg,
        "[[scenario]]\nn = 10\nt = 1.0\nalpha = 2.0\nbeta = 1.0\nlevel = 0.9\n\
         censoring_prop = 0.2\nreplicates = 20\ngpq_draws = 200\nbootstrap_reps = 100\nseed = 7\n",
    )
    .unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = llgpq(&["simulate", "--scenarios", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn relgrid_csv() {
    let o = llgpq(&["relgrid", "--t", "1", "--alpha-range", "1:2", "--beta-range", "1:2", "--steps", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 9);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(llgpq(&["ci", "--data", "builtin:grinder"]).status.code(), Some(2));
    assert_eq!(llgpq(&["simulate", "--preset", "table9"]).status.code(), Some(2));
    assert_eq!(llgpq(&["relgrid", "--t", "1", "--alpha-range", "3:1"]).status.code(), Some(2));
    // data
    assert_eq!(llgpq(&["fit", "--data", "/nonexistent/file.csv"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "time\n1.0\nabc\n").unwrap();
    assert_eq!(llgpq(&["fit", "--data", bad.to_str().unwrap()]).status.code(), Some(3));
    // numerical: identical times leave a flat regression
    let flat = dir.path().join("flat.csv");
    std::fs::write(&flat, "5\n5\n5\n5\n").unwrap();
    assert_eq!(llgpq(&["gof", "--data", flat.to_str().unwrap(), "--fit", "lse"]).status.code(), Some(4));
}
