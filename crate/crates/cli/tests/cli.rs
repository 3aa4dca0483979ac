use std::path::Path;
use std::process::{Command, Output};

fn soqo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soqo"))
        .args(args)
        .env_remove("SOQO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const CONFIG: &str = r#"
name = "tiny"
policies = ["robd", "lai-gamma:1"]
statistic = "ratio_vs_lai"
runs = 30
master_seed = 1

[matrix]
dense = [[2.0, 0.5], [0.5, 0.4]]

[trace.mode]
kind = "mixed"

[trace.mode.base]
family = "lognormal_sym"
variance = 1.0

[trace.mode.adversary]
rule = "alternating_ray"
amplitude = 3.0
axis = "uniform"

[sweep]
adversarial_pcts = [0.0, 50.0, 100.0]
horizon = 20
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bounds_for_unit_min_eigenvalue() {
    let out = soqo(&["bounds", "eig:1,2"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((json["robd_cr"].as_f64().unwrap() - 1.618_034).abs() < 1e-6);
    assert_eq!(json["lai_cr_upper"].as_f64().unwrap(), 2.0);
    assert!(json["lai_cost_exact"].is_null());

    let full = soqo(&["bounds", "geom:0.5,4", "--gamma", "1", "--horizon", "50", "--variance", "1"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&full)).unwrap();
    assert!(json["lai_cost_exact"].as_f64().unwrap() > 0.0);
    assert!(json["framework_cr"].as_f64().unwrap() >= json["robd_cr"].as_f64().unwrap() - 1e-12);
}

#[test]
fn presets_are_listed() {
    for args in [&["list-presets"][..], &["preset", "list-presets"][..]] {
        let out = soqo(args);
        assert!(out.status.success());
        let text = stdout(&out);
        assert_eq!(text.lines().count(), 18);
        for r in ["0.3", "0.45", "0.5"] {
            assert!(text.contains(&format!("fig1-light-{r}\t")));
            assert!(text.contains(&format!("fig2-pareto-{r}\t")));
        }
    }
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), CONFIG);
    let mut csvs = Vec::new();
    for (k, workers) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = soqo(&["run", &config, "--seed", "42", "--workers", workers, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read(out_dir.join("tiny.csv")).unwrap();
        assert_eq!(csv, out.stdout);
        assert!(out_dir.join("tiny.svg").exists());
        csvs.push(csv);
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    assert!(text.starts_with("experiment,sweep,policy,mean,stderr,p95,n,seed\n"));
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",30,42")));

    let env = Command::new(env!("CARGO_BIN_EXE_soqo"))
        .args(["run", &config, "--out", dir.path().join("env").to_str().unwrap()])
        .env("SOQO_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(env.stdout, csvs[0]);
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write_config(dir.path(), &CONFIG.replace("runs = 30", "runz = 30"));
    let out = soqo(&["run", &broken]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("runz"));

    assert_eq!(soqo(&["run", "/nonexistent/exp.toml"]).status.code(), Some(2));
    assert_eq!(soqo(&["bounds", "eig:0,1"]).status.code(), Some(1));
    assert_eq!(soqo(&["bounds", "eig:1", "--gamma", "2"]).status.code(), Some(1));
    assert_eq!(soqo(&["preset", "fig9-x-0.3"]).status.code(), Some(1));
    assert_eq!(soqo(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(soqo(&["--help"]).status.code(), Some(0));
}

#[test]
fn offline_reports_cost_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    std::fs::write(&path, "t,coord,value\n0,0,0\n1,0,1\n2,0,-1\n3,0,2\n").unwrap();
    let out = soqo(&["offline", path.to_str().unwrap(), "--a", "eig:1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["horizon"], 3);
    assert!(json["cost"].as_f64().unwrap() > 0.0);
    assert!(json["kkt_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(soqo(&["offline", path.to_str().unwrap(), "--a", "eig:1,2"]).status.code(), Some(2));
}

#[test]
fn schedule_dump_lists_every_round() {
    let out = soqo(&["dump-schedule", "eig:1", "--T", "3", "--kind", "lai"]);
    assert!(out.status.success());
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines[0], "t,i,rho");
    assert_eq!(lines[2], "2,0,0.4");
    assert_eq!(lines[3], "3,0,0.5");
    let rho1: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!((rho1 - 0.384_615_4).abs() < 1e-7);

    let robd = soqo(&["dump-schedule", "dense:2,1;1,2", "--T", "2", "--kind", "robd"]);
    assert_eq!(stdout(&robd).lines().count(), 5);
    assert_eq!(soqo(&["dump-schedule", "eig:1", "--T", "3", "--kind", "ftm"]).status.code(), Some(1));
}
