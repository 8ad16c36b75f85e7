use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schedscope"))
        .args(args)
        .output()
        .expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn infer_example_intervals() {
    let o = run(&["infer", path(&data("example_intervals.csv")), "--period", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("candidates=[1,3) [5,6) [7,8)"), "{out}");
    assert!(out.contains("initial_offset=1"));
}

#[test]
fn attack_example_deterministic() {
    let o = run(&[
        "attack",
        path(&data("example.toml")),
        "--ticks",
        "50",
        "--start",
        "0",
        "--lambda",
        "1",
        "--deterministic",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("intervals=5"));
    assert!(out.contains("inferred_offset=1"));
    assert!(out.contains("success=true"));
    assert!(out.contains("precision=1.000000"));
}

#[test]
fn attack_exports_intervals_for_offline_inference() {
    let dir = tempfile::tempdir().unwrap();
    let ivs = dir.path().join("ivs.csv");
    let o = run(&[
        "attack",
        path(&data("example.toml")),
        "--duration-multiples",
        "5",
        "--seed",
        "4",
        "--out",
        ivs.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let online = stdout(&o);
    let o = run(&["infer", ivs.to_str().unwrap(), "--period", "8", "--start", "0"]);
    assert!(o.status.success());
    let offline = stdout(&o);
    let line = offline.lines().find(|l| l.starts_with("initial_offset=")).unwrap();
    assert!(online.contains(line), "{online}\n{offline}");
}

#[test]
fn analyze_reports_capability() {
    let o = run(&["analyze", path(&data("example.toml"))]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("coverage=2/2 (1.000000)"));
    assert!(out.contains("recommended_lambda=2"));
    assert!(out.contains("lcm=40"));
    assert!(out.contains("schedulable=true"));
}

#[test]
fn simulate_writes_trace() {
    let o = run(&["simulate", path(&data("example.toml")), "--horizon", "20", "--deterministic"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("H,20\n"));
    assert!(out.contains("S,2,0,0,1\n"));
}

#[test]
fn generate_then_attack() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["generate", "--out", dir.path().to_str().unwrap(), "--count", "3", "--seed", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("manifest.json").exists());
    let ts = dir.path().join("taskset-0002.toml");
    let o = run(&["attack", ts.to_str().unwrap(), "--seed", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("success="));
}

#[test]
fn sweep_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = run(&[
            "sweep",
            "sporadic-mix",
            "--cells",
            "sporadic-0,sporadic-100",
            "--tasksets-per-cell",
            "3",
            "--duration-multiples",
            "1-2",
            "--seed",
            "5",
            "--threads",
            threads,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["summary.csv", "runs.csv", "plot_sporadic_mix.csv", "manifest.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn errors_exit_nonzero() {
    let o = run(&["infer", "/nonexistent/file", "--period", "8"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "0,1\nfoo\n").unwrap();
    let o = run(&["infer", bad.to_str().unwrap(), "--period", "8"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = run(&["sweep", "bogus", "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
}
