use std::path::Path;
use std::process::{Command, Output};

fn trigmin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigmin")).args(args).output().expect("binary runs")
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let lines = data_lines(text);
    let idx = lines[0].split(',').position(|c| c == name).expect("column present");
    lines[1..].iter().map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn kernel_check_csv_meets_oracle() {
    let out = trigmin(&["kernel-check", "--n", "512", "--points", "400"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# trigmin kernel-check\n# schema_version=1\n"));
    assert!(text.contains("# n=512\n"));
    let header = data_lines(&text)[0];
    assert_eq!(header, "x,r_closed,r_sum,r1_closed,r1_sum,r2_closed,r2_sum,abs_error");
    let errs = column(&text, "abs_error");
    assert_eq!(errs.len(), 400);
    assert!(errs.iter().all(|&e| e <= 1e-10), "max {}", errs.iter().cloned().fold(0.0, f64::max));
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["simulate", "--n", "64", "--trials", "300", "--seed", "7"];
    let run = |path: &Path, threads: &str| {
        let mut args = common.to_vec();
        args.extend(["--threads", threads, "-o", path.to_str().unwrap()]);
        let out = trigmin(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(&a, "1");
    run(&b, "3");
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.contains("# seed=7\n"));
    assert_eq!(data_lines(&text)[0], "trial,m,n_m,argmin,count_in_window,certified_bound");
    assert_eq!(column(&text, "trial").len(), 300);
    assert!(text.contains("# summary.ks="));
}

#[test]
fn simulate_writes_survival_curve() {
    let dir = tempfile::tempdir().unwrap();
    let surv = dir.path().join("surv.csv");
    let out = trigmin(&["simulate", "--n", "32", "--trials", "100", "--survival", surv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&surv).unwrap();
    assert!(text.starts_with("# trigmin simulate --survival\n"));
    let emp = column(&text, "empirical");
    let reference = column(&text, "reference");
    assert_eq!(emp.len(), 101);
    assert_eq!((emp[0], reference[0]), (1.0, 1.0));
    assert!(emp.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn jsonl_output_has_header_and_records() {
    let out = trigmin(&["simulate", "--n", "32", "--trials", "20", "--format", "jsonl"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 22);
    assert_eq!(lines[0]["schema_version"], 1);
    assert_eq!(lines[0]["command"], "simulate");
    assert_eq!(lines[0]["config"]["n"], "32");
    assert_eq!(lines[1]["trial"], 0);
    assert!(lines[21]["summary"]["ks"].is_number());
}

#[test]
fn bench_reports_op_ratio() {
    let out = trigmin(&["bench", "--n", "512", "--sizes", "4096,8192"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let ratio = column(&text, "op_ratio");
    let points = column(&text, "points");
    for (r, big_n) in ratio.iter().zip(&points) {
        let expect = 2.0 * 512.0 * big_n / (big_n * big_n.log2());
        assert!((r - expect).abs() < 1e-9);
    }
}

#[test]
fn report_subcommands_emit_metrics() {
    for (cmd, metric) in [
        ("intensity", "rel_err"),
        ("poisson", "dispersion"),
        ("perturb", "law_ks"),
        ("separation", "fraction"),
        ("realcase", "zone_min_0"),
    ] {
        let mut args = vec![cmd, "--n", "64", "--trials", "120"];
        if cmd == "realcase" {
            args.extend(["--model", "real"]);
        }
        let out = trigmin(&args);
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(metric), "{cmd} output lacks {metric}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\nn=32\ntrials=50\nseed=3\nformat=jsonl\n").unwrap();
    let out = trigmin(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert!(out.status.success());
    let head: serde_json::Value = serde_json::from_str(String::from_utf8(out.stdout).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(head["config"]["seed"], "4");
    assert_eq!(head["config"]["trials"], "50");
}

#[test]
fn exit_codes() {
    assert_eq!(trigmin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(trigmin(&["simulate", "--trials", "x"]).status.code(), Some(2));
    assert_eq!(trigmin(&["simulate", "--set", "bogus=1"]).status.code(), Some(3));
    assert_eq!(trigmin(&["simulate", "--model", "cramer", "--delta", "2"]).status.code(), Some(3));
    assert_eq!(trigmin(&["simulate", "--n", "4", "--eps-net", "0.9"]).status.code(), Some(3));
    assert_eq!(
        trigmin(&["kernel-check", "--n", "8", "-o", "/nonexistent-dir/out.csv"]).status.code(),
        Some(4)
    );
    // Thresholds: met, unmet, and not produced.
    assert_eq!(trigmin(&["kernel-check", "--n", "64", "--set", "max.max_abs_error=1e-9"]).status.code(), Some(0));
    assert_eq!(trigmin(&["kernel-check", "--n", "64", "--set", "max.max_abs_error=0"]).status.code(), Some(1));
    assert_eq!(trigmin(&["kernel-check", "--n", "64", "--set", "min.speedup=10"]).status.code(), Some(1));
    assert_eq!(trigmin(&["--help"]).status.code(), Some(0));
}
