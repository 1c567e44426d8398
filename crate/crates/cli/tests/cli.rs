use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BH_DATA: &str = "0.0001\n0.0004\n0.0019\n0.0095\n0.0201\n0.0278\n0.0298\n0.0344\n0.0459\n0.3240\n0.4262\n0.5719\n0.6528\n0.7590\n1.000\n";

fn critconst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critconst"))
        .args(args)
        .env_remove("CRITCONST_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = critconst(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit() || c == '-'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

/// `F(c)` and `F(ξ)` from the comment line of an optimize CSV.
fn objectives(csv: &str) -> (f64, f64) {
    let line = csv.lines().find(|l| l.starts_with("# F(c)=")).unwrap();
    let mut it = line.trim_start_matches("# ").split(' ').map(|kv| kv.split('=').nth(1).unwrap());
    (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
}

fn rejections(csv: &str) -> usize {
    let line = csv.lines().find(|l| l.starts_with("# rejections:")).unwrap();
    line.rsplit(' ').next().unwrap().parse().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn matrix_single_hypothesis() {
    let out = stdout_of(&["matrix", "--rate", "kfwer-sd", "--n", "1", "--k", "1"]);
    assert_eq!(data_rows(&out), vec![vec![1.0]]);
}

#[test]
fn matrix_holm_antidiagonal() {
    let rows = data_rows(&stdout_of(&["matrix", "--rate", "kfwer-sd", "--n", "10", "--k", "1"]));
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let expected = if i + j == 9 { (i + 1) as f64 } else { 0.0 };
            assert_eq!(x, expected, "entry ({}, {})", i + 1, j + 1);
        }
    }
}

#[test]
fn matrix_row_32_support() {
    let out = stdout_of(&["matrix", "--rate", "fdp-su", "--n", "50", "--gamma", "0.05"]);
    assert!(out.starts_with("# spec:"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 50);
    let support: Vec<usize> = rows[31].iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(j, _)| j + 1).collect();
    assert_eq!(support, (19..=50).collect::<Vec<_>>());
}

#[test]
fn matrix_json_round_trips() {
    let out = stdout_of(&["matrix", "--rate", "fdp-sd", "--n", "6", "--gamma", "0.2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["spec"]["n"], 6);
    assert_eq!(doc["entries"].as_array().unwrap().len(), 6);
}

#[test]
fn optimize_table_values() {
    let sd = stdout_of(&["optimize", "--rate", "fdp-sd", "--family", "bh", "--n", "10", "--gamma", "0.05"]);
    let (fc, fx) = objectives(&sd);
    assert!((fc - 7.33).abs() < 0.005 && (fx - 10.0).abs() < 0.005, "{fc} {fx}");

    let su = stdout_of(&["optimize", "--rate", "fdp-su", "--family", "rs", "--n", "10", "--gamma", "0.05"]);
    let (fc, fx) = objectives(&su);
    assert!((fc - 8.76).abs() < 0.005 && (fx - 8.76).abs() < 0.005, "{fc} {fx}");
}

#[test]
fn optimize_repeats_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "optimize", "--rate", "fdp-su", "--family", "bh", "--n", "40", "--gamma", "0.1", "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let first = stdout_of(&args);
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 1);
}

#[test]
fn optimize_with_weights_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = "0\n".repeat(9);
    w.push_str("1\n");
    let path = write(dir.path(), "w.txt", &w);
    let out = stdout_of(&["optimize", "--rate", "kfwer-sd", "--k", "1", "--n", "10", "--weights", &path]);
    let xi: Vec<f64> = data_rows(&out).iter().map(|r| r[2]).collect();
    // Only the all-null row counts, and it sees just ξ_1.
    assert!((xi[0] - 0.1).abs() < 1e-12);
}

#[test]
fn constants_by() {
    let rows = data_rows(&stdout_of(&["constants", "--family", "by", "--n", "3"]));
    let got: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    for (g, e) in got.iter().zip([2.0 / 11.0, 4.0 / 11.0, 6.0 / 11.0]) {
        assert!((g - e).abs() < 1e-15);
    }
}

#[test]
fn constants_modified_dominate_rescaled() {
    let base = ["constants", "--family", "bh", "--n", "20", "--rate", "fdp-sd", "--gamma", "0.1"];
    let rescaled = data_rows(&stdout_of(&base));
    let mut args = base.to_vec();
    args.push("--modified");
    let modified = data_rows(&stdout_of(&args));
    for (c, x) in rescaled.iter().zip(&modified) {
        assert!(x[1] >= c[1] - 1e-12);
    }
}

#[test]
fn verify_rescaled_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    stdout_of(&[
        "constants", "--family", "rs", "--n", "25", "--gamma", "0.05", "--rate", "fdp-su", "-o",
        out.to_str().unwrap(),
    ]);
    let report = stdout_of(&["verify", "--rate", "fdp-su", "--gamma", "0.05", "--input", out.to_str().unwrap()]);
    assert!(report.starts_with("# max bound 1.000000, feasible"), "{report}");

    let raw = stdout_of(&["verify", "--rate", "fdp-su", "--n", "25", "--gamma", "0.05", "--family", "bh"]);
    assert!(raw.contains("infeasible"), "{raw}");
}

#[test]
fn adjust_bh_data() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bh.txt", BH_DATA);
    let out = stdout_of(&[
        "adjust", "--rate", "fdp-su", "--family", "bh", "--gamma", "0.05", "--alpha", "0.5", "--input", &input,
    ]);
    assert_eq!(rejections(&out), 9);
    let by = stdout_of(&["adjust", "--rate", "fdp-su", "--family", "by", "--alpha", "0.05", "--input", &input]);
    assert_eq!(rejections(&by), 3);
}

#[test]
fn adjust_json_lists_every_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bh.txt", BH_DATA);
    let out = stdout_of(&[
        "adjust", "--rate", "fdp-sd", "--family", "rs", "--gamma", "0.1", "--alpha", "0.5", "--modified",
        "--format", "json", "--input", &input,
    ]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let hyps = doc["hypotheses"].as_array().unwrap();
    assert_eq!(hyps.len(), 15);
    let flagged = hyps.iter().filter(|h| h["rejected"] == true).count();
    assert_eq!(flagged as u64, doc["rejections"].as_u64().unwrap());
}

#[test]
fn malformed_input_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.txt", "0.1\n0.2\nnope\n");
    let out = critconst(&["adjust", "--rate", "fdp-su", "--gamma", "0.05", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let input = write(dir.path(), "range.txt", "0.1\n1.5\n");
    let out = critconst(&["adjust", "--rate", "fdp-su", "--gamma", "0.05", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(critconst(&["matrix", "--rate", "fdp-su", "--n", "5"]).status.code(), Some(2));
    assert_eq!(critconst(&["matrix", "--rate", "nope", "--n", "5"]).status.code(), Some(2));
    assert_eq!(critconst(&["matrix", "--rate", "kfwer-su", "--n", "5", "--k", "9"]).status.code(), Some(2));
    assert_eq!(critconst(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn infeasible_floor_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let floor = write(dir.path(), "c.txt", "0.5\n0.5\n0.5\n");
    let out = critconst(&["optimize", "--rate", "kfwer-sd", "--k", "1", "--input", &floor]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    let out = critconst(&["optimize", "--rate", "fdp-sd", "--n", "30", "--gamma", "0.1", "--max-pivots", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--n", "10", "--d", "3", "--reps", "20000", "--seed", "42"];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second);
    assert!(first.starts_with("n,trueCount,d,procedure,avgPower,tailFDP,fdr,se_power"));
    // 5 true counts, 10 procedures.
    assert_eq!(first.lines().count(), 1 + 5 * 10);
}

#[test]
fn simulate_ignores_thread_count() {
    let base = ["simulate", "--n", "12", "--d", "1,3", "--true-counts", "3,9", "--reps", "500", "--seed", "7"];
    let mut one = base.to_vec();
    one.extend(["--threads", "1"]);
    let mut four = base.to_vec();
    four.extend(["--threads", "4"]);
    assert_eq!(stdout_of(&one), stdout_of(&four));
}

#[test]
fn simulate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    stdout_of(&[
        "simulate", "--n", "5", "--d", "2", "--true-counts", "2", "--reps", "3", "--trace", trace.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(trace).unwrap();
    assert!(text.starts_with("trueCount,d,rep,procedure,rejections,falseRejections"));
    assert_eq!(text.lines().count(), 1 + 3 * 10);
}
