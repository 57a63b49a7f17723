use std::collections::HashSet;
use std::process::{Command, Output};

use serde_json::Value;

fn fdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdist")).env_remove("FD_EFFORT").args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    let o = fdist(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).expect("valid JSON")
}

fn collect_numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.extend(n.as_f64()),
        Value::Array(a) => a.iter().for_each(|x| collect_numbers(x, out)),
        Value::Object(m) => m.values().for_each(|x| collect_numbers(x, out)),
        _ => {}
    }
}

const HOMNORM: [&str; 12] =
    ["homnorm", "--source", "Z6", "--target", "S3", "--bijection", "0,1,2,3,4,5", "--levels", "1,2", "--effort", "low", "--seed"];

#[test]
fn json_reports_carry_schema_and_are_deterministic() {
    let args: Vec<&str> = HOMNORM.iter().copied().chain(["7"]).collect();
    let a = fdist(&args);
    let b = fdist(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert!((v["norm_t"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-4);
}

#[test]
fn every_text_number_appears_in_json() {
    for args in [
        vec!["norm", "--group", "Z6", "--fourier-coeffs", "0,1,1,0,1,-1"],
        HOMNORM.iter().copied().chain(["3"]).collect(),
        vec!["irreps", "--group", "S3"],
        vec!["reproduce-paper", "--effort", "low"],
    ] {
        let mut numbers = Vec::new();
        collect_numbers(&json(&args), &mut numbers);
        let known: HashSet<u64> = numbers.iter().map(|x| x.to_bits()).collect();
        let text_args: Vec<&str> = ["--format", "text"].into_iter().chain(args.iter().copied()).collect();
        let text = stdout(&fdist(&text_args));
        let values = text.lines().filter_map(|l| l.split_once(" = ").map_or(Some(l), |(_, v)| Some(v)));
        let tokens = values.flat_map(|v| v.split(|c: char| c.is_whitespace() || "[],()".contains(c)));
        for x in tokens.filter_map(|t| t.parse::<f64>().ok()) {
            assert!(known.contains(&x.to_bits()), "{x} from {args:?} missing in JSON");
        }
    }
}

#[test]
fn exit_codes_classify_failures() {
    assert_eq!(fdist(&["irreps", "--group", "W3"]).status.code(), Some(2));
    assert_eq!(fdist(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(fdist(&["homnorm", "--source", "Z4", "--target", "Z2xZ2", "--bijection", "0,1,1,2"]).status.code(), Some(2));
    assert_eq!(fdist(&["irreps", "--group", "Z30"]).status.code(), Some(3));
    assert_eq!(fdist(&["verify-lemmas", "--lemma", "invmult", "--dim", "9"]).status.code(), Some(3));
    assert_eq!(fdist(&["norm", "--group", "Z2", "--fourier-coeffs", "inf,1"]).status.code(), Some(4));
}

#[test]
fn scan_csv_has_fixed_columns() {
    let o = fdist(&["--format", "csv", "scan", "--source", "Z4", "--target", "Z2xZ2", "--level", "1", "--effort", "low"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bijection,norm_T,norm_Tinv,level2_T,level2_Tinv,distortion"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn effort_falls_back_to_environment() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_fdist"));
        c.env_remove("FD_EFFORT");
        if let Some(e) = env {
            c.env("FD_EFFORT", e);
        }
        c.args(["homnorm", "--source", "Z4", "--target", "Z2xZ2", "--bijection", "0,1,2,3"]).output().unwrap()
    };
    let low: Value = serde_json::from_slice(&run(Some("low")).stdout).unwrap();
    let default: Value = serde_json::from_slice(&run(None).stdout).unwrap();
    assert_eq!(low["effort"], "low");
    assert_eq!(default["effort"], "default");
    assert_eq!(run(Some("bogus")).status.code(), Some(2));
}

#[test]
fn group_tables_load_from_json_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s3.json");
    let exported = json(&["irreps", "--group", "S3"]);
    let group = fdist::group::parse_group("S3").unwrap();
    std::fs::write(&path, group.to_json()).unwrap();
    let loaded = json(&["irreps", "--group", path.to_str().unwrap()]);
    assert_eq!(loaded["dims"], exported["dims"]);
    std::fs::write(&path, "{\"order\": 2, \"table\": [[0, 1], [1, 1]], \"label\": \"bad\"}").unwrap();
    assert_eq!(fdist(&["irreps", "--group", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn jobs_flag_does_not_change_results() {
    let base = ["scan", "--source", "Z4", "--target", "Z2xZ2", "--level", "2", "--effort", "low"];
    let one: Vec<&str> = ["--jobs", "1"].into_iter().chain(base).collect();
    let two: Vec<&str> = ["--jobs", "2"].into_iter().chain(base).collect();
    assert_eq!(fdist(&one).stdout, fdist(&two).stdout);
}
