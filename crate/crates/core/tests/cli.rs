use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use infer_align::io::{checksum, read_records_csv, read_records_json, CSV_HEADER};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_infer-align"));
    c.env("RUST_LOG", "warn");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_two_arm() {
    let inst = fixture("two_arm.json");
    let o = run(&["solve", "--instance", inst.to_str().unwrap(), "--beta", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["lambda"].as_f64().unwrap(), -0.5);
    let policy: Vec<f64> = serde_json::from_value(v["chi2_policy"].clone()).unwrap();
    assert_eq!(policy, vec![0.75, 0.25]);
    let e = std::f64::consts::E;
    let kl: Vec<f64> = serde_json::from_value(v["kl_policy"].clone()).unwrap();
    assert!((kl[0] - e / (e + 1.0)).abs() < 1e-15);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn config_problems_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"instance": "missing.json", "command": "sweep-n"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep-n"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("instance"));

    std::fs::copy(fixture("two_arm.json"), dir.path().join("i.json")).unwrap();
    std::fs::write(&cfg, r#"{"instance": "i.json", "command": "sweep-n", "betaa": [1]}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep-n"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("betaa"));

    std::fs::write(&cfg, r#"{"instance": "i.json", "command": "bon"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep-n"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["sweep-n"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_problems_exit_1() {
    let inst = fixture("two_arm.json");
    let o = run(&["solve", "--instance", inst.to_str().unwrap(), "--prompt", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["sweep-beta", "--instance", inst.to_str().unwrap(), "--n", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("sweep_n.json");
    let mut sums = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let o = run(&[
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
            "sweep-n",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let bytes = std::fs::read(&out).unwrap();
        let reported = String::from_utf8_lossy(&o.stderr);
        assert!(reported.contains(&format!("sha256 {}", checksum(&bytes))));
        sums.push(checksum(&bytes));
    }
    assert_eq!(sums[0], sums[1]);
}

#[test]
fn records_round_trip_through_files() {
    let inst = fixture("two_arm.json");
    let o = run(&["bon", "--instance", inst.to_str().unwrap(), "--n", "1,8", "--replicates", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let recs = read_records_csv(&text).unwrap();
    assert_eq!(recs.len(), 8);
    assert!(recs.iter().all(|r| r.beta.is_none()));

    let o = run(&["--format", "json", "itp", "--instance", inst.to_str().unwrap(), "--n", "4", "--beta", "0.5", "--replicates", "3"]);
    assert!(o.status.success());
    let recs = read_records_json(&stdout(&o)).unwrap();
    assert_eq!(recs.len(), 3);
    assert!(recs.iter().all(|r| r.beta == Some(0.5) && r.acceptance_step.is_some()));
}

#[test]
fn seed_flag_changes_and_fixes_output() {
    let inst = fixture("two_arm.json");
    let args = |seed: &'static str| {
        vec!["--seed", seed, "bon", "--instance", inst.to_str().unwrap(), "--n", "2", "--replicates", "20"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let a = bin().args(args("1")).output().unwrap().stdout;
    let b = bin().args(args("1")).output().unwrap().stdout;
    let c = bin().args(args("2")).output().unwrap().stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn concentration_uses_prescribed_sample_size() {
    let o = run(&["--config", config("concentration.json").to_str().unwrap(), "concentration"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["N"].as_u64(), Some(1121));
    assert!(v["fraction"].as_f64().unwrap() >= 0.9);
}

#[test]
fn verify_reports_and_sets_status() {
    let o = run(&["verify", "3", "9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);

    let o = run(&["verify", "6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL"));

    let o = run(&["verify", "11"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixtures_match_the_bundled_copies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["fixtures", "--dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for name in [
        "two_arm.json",
        "cinf_small_n.json",
        "cinf_large_n.json",
        "cone_part1.json",
        "cone_part2.json",
        "skyline.json",
        "manifest.json",
    ] {
        let fresh = std::fs::read(dir.path().join(name)).unwrap();
        let bundled = std::fs::read(fixture(name)).unwrap();
        assert_eq!(fresh, bundled, "{name}");
    }
}

#[test]
fn bundled_configs_parse() {
    for name in ["sweep_n.json", "sweep_n_exact.json", "sweep_beta.json", "concentration.json"] {
        infer_align::io::parse_config(&config(name)).unwrap();
    }
}
