//! End-to-end tests of the `rrt` binary: output schemas, determinism across
//! thread counts, option precedence and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::tempdir;

fn rrt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rrt"))
}

fn run(args: &[&str]) -> Output {
    rrt().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn joint_table_totals_720() {
    let out = run(&["joint-table", "--n", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tpl,hpl,count"));
    let total: u64 = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 720);
}

#[test]
fn enumerate_small_law() {
    let out = run(&["enumerate", "--n", "3", "--functional", "tpl"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "value,numerator,denominator\n2,1,2\n3,1,2\n");

    let sum = run(&["enumerate", "--n", "4", "--functional", "tpl+hpl"]);
    assert!(sum.status.success());
    assert!(stdout(&sum).lines().count() > 2);
}

#[test]
fn simulate_is_deterministic_across_runs_and_threads() {
    let a = run(&["simulate", "--n", "200", "--reps", "50", "--seed", "7"]);
    let b = run(&["simulate", "--n", "200", "--reps", "50", "--seed", "7"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let header = stdout(&a);
    assert!(header.starts_with("n,tpl,hpl,wiener,comparisons\n"));
    assert_eq!(header.lines().count(), 51);

    let one = run(&[
        "simulate",
        "--n",
        "200",
        "--reps",
        "50",
        "--seed",
        "7",
        "--threads",
        "1",
    ]);
    let four = run(&[
        "simulate",
        "--n",
        "200",
        "--reps",
        "50",
        "--seed",
        "7",
        "--threads",
        "4",
    ]);
    assert_eq!(one.stdout, a.stdout);
    assert_eq!(four.stdout, a.stdout);

    let other_seed = run(&["simulate", "--n", "200", "--reps", "50", "--seed", "8"]);
    assert_ne!(other_seed.stdout, a.stdout);
}

#[test]
fn limits_modes_and_determinism() {
    let base = &[
        "limits",
        "--mode",
        "unconditional",
        "--reps",
        "20",
        "--seed",
        "3",
        "--weight-cut",
        "12",
        "--mass-floor",
        "1e-3",
    ];
    let a = run(base);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(stdout(&a).starts_with("replication,y,z,w,y_plus_z\n"));
    let mut threaded: Vec<&str> = base.to_vec();
    threaded.extend(["--threads", "3"]);
    let b = run(&threaded);
    assert_eq!(a.stdout, b.stdout);

    let cond = run(&[
        "limits",
        "--mode",
        "conditional",
        "--tree",
        r#"["()","(1)","(2)","(1,1)"]"#,
        "--reps",
        "10",
        "--seed",
        "3",
        "--weight-cut",
        "10",
        "--mass-floor",
        "1e-3",
    ]);
    assert!(
        cond.status.success(),
        "{}",
        String::from_utf8_lossy(&cond.stderr)
    );
    assert_eq!(stdout(&cond).lines().count(), 11);

    let missing_tree = run(&["limits", "--mode", "conditional", "--reps", "5"]);
    assert_eq!(missing_tree.status.code(), Some(1));
}

#[test]
fn limits_from_input_file() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("inputs.csv");
    std::fs::write(&input, "t\n0.83\n0.04\n0.81\n0.22\n").unwrap();
    let out = run(&[
        "limits",
        "--mode",
        "from-input",
        "--input",
        input.to_str().unwrap(),
        "--reps",
        "8",
        "--seed",
        "1",
        "--weight-cut",
        "10",
        "--mass-floor",
        "1e-3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).lines().count(), 9);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempdir().unwrap();
    let config: PathBuf = dir.path().join("lab.conf");
    std::fs::write(&config, "n=3\nfunctional=tpl\n# comment\n").unwrap();

    let from_config = run(&["enumerate", "--config", config.to_str().unwrap()]);
    assert!(from_config.status.success());
    assert_eq!(stdout(&from_config).lines().count(), 3); // header + two atoms

    let overridden = run(&[
        "enumerate",
        "--config",
        config.to_str().unwrap(),
        "--n",
        "2",
    ]);
    assert!(overridden.status.success());
    assert_eq!(stdout(&overridden), "value,numerator,denominator\n1,1,1\n");
}

#[test]
fn fixed_point_diagnostics_run() {
    let out = run(&[
        "fixed-point",
        "--reps",
        "400",
        "--seed",
        "5",
        "--weight-cut",
        "12",
        "--mass-floor",
        "1e-3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("KS(y, recursion rhs)"));
    assert!(text.contains("KS(y, y + z)"));
}

#[test]
fn verify_fast_passes_and_writes_json() {
    let dir = tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--level",
        "fast",
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = stdout(&out);
    assert!(text.contains("[PASS] exact-means"));
    assert!(text.contains("[SKIP] fixed-point"));
    assert!(text.contains("summary:"));
    assert!(text.contains("0 failed"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(report.as_array().unwrap().len() >= 13);
}

#[test]
fn usage_errors_exit_2_and_bad_values_exit_1() {
    let unknown_flag = run(&["simulate", "--frobnicate"]);
    assert_eq!(unknown_flag.status.code(), Some(2));

    let unknown_subcommand = run(&["transmogrify"]);
    assert_eq!(unknown_subcommand.status.code(), Some(2));

    let bad_functional = run(&["enumerate", "--n", "4", "--functional", "zagreb"]);
    assert_eq!(bad_functional.status.code(), Some(1));

    let out_of_range = run(&["enumerate", "--n", "42"]);
    assert_eq!(out_of_range.status.code(), Some(1));
}

#[test]
fn output_files_are_written() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("dist.csv");
    let out = run(&[
        "enumerate",
        "--n",
        "5",
        "--functional",
        "wiener",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("value,numerator,denominator\n"));
    // weights over 4! = 24 encodings
    let denom_sum: f64 = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut parts = l.split(',');
            let _v = parts.next().unwrap();
            let num: f64 = parts.next().unwrap().parse().unwrap();
            let den: f64 = parts.next().unwrap().parse().unwrap();
            num / den
        })
        .sum();
    assert!((denom_sum - 1.0).abs() < 1e-12);
}
