use std::process::{Command, Output};

use gl3sup::gl2special::{gl2_whittaker, BesselEvalConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl3sup")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn gl2w_matches_the_library() {
    let (h, rows) = csv_rows(&stdout(&["eval", "gl2w", "--t", "0", "--x", "1"]));
    let v: f64 = rows[0][column(&h, "value")].parse().unwrap();
    let o = gl2_whittaker(0.0, 1.0, &BesselEvalConfig::default()).unwrap();
    assert_eq!(v, o);
}

#[test]
fn kbessel_reports_its_path() {
    let (h, rows) = csv_rows(&stdout(&["eval", "kbessel", "--t", "30", "--x", "40"]));
    assert_eq!(rows[0][column(&h, "path")], "multiprecision");
    let (h, rows) = csv_rows(&stdout(&["eval", "kbessel", "--t", "3", "--x", "0.5"]));
    assert_eq!(rows[0][column(&h, "path")], "series");
}

#[test]
fn jw3_is_real_for_equal_parameters() {
    let text = stdout(&["--format", "json", "eval", "jw3", "--t1", "1", "--t2", "1", "--y1", "1", "--y2", "1"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let (re, im) = (v[0]["re"].as_f64().unwrap(), v[0]["im"].as_f64().unwrap());
    assert!(im.abs() <= 1e-10 * re.abs() && re != 0.0);
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["eval", "gl2w", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = run(&["count", "--point", "0,0,0,-1,1", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["scan", "--source", "file"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify", "eighth"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stderr).starts_with("PASS"));
    let fail = run(&["verify", "eighth", "--ceiling", "1e-30"]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn reduce_lands_in_the_siegel_set() {
    let (h, rows) = csv_rows(&stdout(&["reduce", "--point", "0,0,0,0.1,0.1"]));
    for name in ["y1", "y2"] {
        let y: f64 = rows[0][column(&h, name)].parse().unwrap();
        assert!(y >= 0.866);
    }
}

#[test]
fn count_output() {
    assert_eq!(stdout(&["count", "--point", "0.1,0.2,0.3,1.3,1.1", "--radius", "0.05"]).trim(), "M1:1 M2:0 M3:0 M4:0");
    let high = stdout(&["count", "--point", "0,0,0,20,20", "--radius", "0.5"]);
    assert!(high.trim().ends_with("M4:0"), "{high}");
    let json = stdout(&["--format", "json", "count", "--point", "0.1,0.2,0.3,1.3,1.1", "--radius", "0.05"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["M1"], 1);
}

#[test]
fn scan_grid_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("scan.csv");
    let args = ["scan", "--t1", "0.5", "--t2", "0.5", "--y1", "1,1.5,2", "--y2", "1,1.5,2"];
    let mut with_out = vec!["--out", csv_path.to_str().unwrap()];
    with_out.extend(args);
    assert!(stdout(&with_out).is_empty());
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let (h, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 9);
    let (abs, e2, e3) = (column(&h, "abs"), column(&h, "envelope2"), column(&h, "envelope3"));
    let mut fitted: f64 = 0.0;
    for r in &rows {
        let v: f64 = r[abs].parse().unwrap();
        let env = r[e2].parse::<f64>().unwrap().min(r[e3].parse().unwrap());
        assert!(v.is_finite() && env > 0.0);
        fitted = fitted.max(v / env);
    }
    assert!(fitted <= 1.0, "fitted constant {fitted}");

    let mut json_args = vec!["--format", "json"];
    json_args.extend(args);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 9);
    for (obj, r) in arr.iter().zip(&rows) {
        for (k, name) in h.iter().enumerate() {
            assert_eq!(obj[name].as_f64().unwrap(), r[k].parse::<f64>().unwrap(), "{name}");
        }
    }
    assert_eq!(stdout(&args), text);
}
