use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn skydist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skydist")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name).to_string_lossy().into_owned()
}

const HEADER: &str = "alg,param,words,bits,messages,rounds,recovered,k,coord_ms,site_ms,verified";

#[test]
fn run_prints_one_verified_row_per_algorithm() {
    let out =
        skydist(&["run", "--data", "indi", "--n", "5000", "--s", "10", "--alg", "naive,optimal,tradeoff", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("naive,-,"));
    assert!(lines[3].starts_with("tradeoff,r=3,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn output_is_deterministic_per_seed() {
    let args = ["run", "--data", "anti", "--n", "3000", "--s", "6", "--alg", "all", "--rho", "40", "--seed", "9"];
    let (a, b) = (skydist(&args), skydist(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 8);
}

#[test]
fn sorted_needs_sorted_partition() {
    let out = skydist(&["run", "--n", "200", "--alg", "sorted"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sorted"));
    let out = skydist(&["run", "--n", "200", "--alg", "sorted", "--partition", "sorted"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_and_parameter_errors_exit_with_one() {
    for args in [
        vec!["run", "--bogus"],
        vec!["run", "--alg", "quicksort"],
        vec!["run", "--data", "uniform"],
        vec!["run", "--alg", "tradeoff", "--r", "2", "--n", "100"],
        vec!["run", "--alg", "prune", "--rounds", "5", "--n", "100"],
        vec!["run", "--s", "0", "--n", "100"],
        vec!["sweep", "--param", "rho", "--values", "10", "--alg", "naive", "--n", "100"],
        vec!["run", "--csv", "/nonexistent/file.csv", "--x-col", "a", "--y-col", "b"],
    ] {
        let out = skydist(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    let out = skydist(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sweep"));
}

#[test]
fn sweep_over_rounds_adds_bound_column() {
    let out = skydist(&["sweep", "--param", "r", "--values", "3,5,7", "--alg", "tradeoff", "--n", "4000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), format!("{HEADER},bound"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn out_file_and_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("rows.csv");
    let transcripts = dir.path().join("transcripts");
    let out = skydist(&[
        "run",
        "--n",
        "1000",
        "--s",
        "4",
        "--alg",
        "naive,prune",
        "--rho",
        "20",
        "--repeat",
        "2",
        "--out",
        table.to_str().unwrap(),
        "--transcripts",
        transcripts.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rows = fs::read_to_string(&table).unwrap();
    assert!(rows.starts_with(&format!("{HEADER},words_max,rounds_max")));
    let mut names: Vec<String> =
        fs::read_dir(&transcripts).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["naive.csv", "prune-rho_20_r_8.csv"]);
    let naive = fs::read_to_string(transcripts.join("naive.csv")).unwrap();
    assert!(naive.starts_with("round,direction,site,payload_words\n"));
}

#[test]
fn csv_input_with_negation_and_dedupe() {
    let path = fixture("airline.csv");
    let base = [
        "run",
        "--csv",
        &path,
        "--x-col",
        "FARE",
        "--y-col",
        "FARE_PER_MILE",
        "--negate-x",
        "--negate-y",
        "--s",
        "3",
        "--alg",
        "naive,optimal",
    ];
    let rejected = skydist(&base);
    assert_eq!(rejected.status.code(), Some(1));
    let mut args = base.to_vec();
    args.push("--dedupe");
    let out = skydist(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn timings_flag_fills_time_columns() {
    let out = skydist(&["run", "--n", "20000", "--alg", "fds", "--timings"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let coord_ms: f64 = row[8].parse().unwrap();
    let site_ms: f64 = row[9].parse().unwrap();
    assert!(coord_ms + site_ms > 0.0);
}
