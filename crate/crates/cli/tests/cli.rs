use std::process::{Command, Output};

use serde_json::Value;

fn zstrip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zstrip"))
        .args(args)
        .output()
        .expect("spawn zstrip")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    let out = zstrip(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

/// Every object carrying a `value` also carries a finite `est_error`.
fn assert_errors_everywhere(v: &Value) {
    match v {
        Value::Object(map) => {
            if map.contains_key("value") {
                assert!(map["est_error"].as_f64().is_some_and(f64::is_finite), "{v}");
            }
            map.values().for_each(assert_errors_everywhere);
        }
        Value::Array(items) => items.iter().for_each(assert_errors_everywhere),
        _ => {}
    }
}

fn z_value(doc: &Value) -> f64 {
    doc["rows"][0]["z"]["value"].as_f64().unwrap()
}

#[test]
fn eval_examples() {
    let out = zstrip(&["eval", "--t", "100", "--method", "approx"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("value=2.6269297"), "{}", stdout(&out));
    let out = zstrip(&["eval", "--t", "0", "--method", "oracle"]);
    assert!(stdout(&out).contains("value=-1.4603545"));

    let integral = json(&["eval", "--t", "50", "--method", "integral", "--json"]);
    let oracle = json(&["eval", "--t", "50", "--method", "oracle", "--json"]);
    assert!((z_value(&integral) - z_value(&oracle)).abs() <= 1e-8);
    assert_eq!(integral["meta"]["command"], "eval");
    assert_eq!(integral["meta"]["flags"]["method"], "integral");
    assert_errors_everywhere(&integral);
    assert_errors_everywhere(&json(&["eval", "--t", "1000", "--method", "g", "--json"]));
}

#[test]
fn eval_rejects_bad_flags() {
    assert_eq!(zstrip(&["eval", "--t", "abc"]).status.code(), Some(2));
    assert_eq!(
        zstrip(&["eval", "--t", "5", "--method", "approx"]).status.code(),
        Some(2)
    );
    assert_eq!(
        zstrip(&["eval", "--t", "50", "--method", "integral", "--sigma", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(zstrip(&["eval", "--t", "50", "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(zstrip(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn table_single_row_and_formats() {
    let out = zstrip(&["table", "--rows", "10", "--csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,Z,approx,absdiff");
    assert_eq!(lines.len(), 2);
    let cols: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cols[1] + 1.5491945).abs() <= 5e-6 && (cols[2] + 0.9983260).abs() <= 5e-6);
    assert!(!text.contains('\r'));

    let doc = json(&["table", "--rows", "10,100", "--json"]);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_errors_everywhere(&doc);
    assert_eq!(doc["meta"]["version"], env!("CARGO_PKG_VERSION"));

    assert_eq!(zstrip(&["table", "--rows", "20"]).status.code(), Some(2));
    assert_eq!(zstrip(&["table", "--json", "--csv"]).status.code(), Some(2));
}

#[test]
fn output_is_reproducible() {
    for args in [
        &["table", "--rows", "100,1000", "--json"][..],
        &["eval", "--t", "123.4", "--method", "g"][..],
        &["scan", "--from", "10", "--to", "30", "--json"][..],
    ] {
        assert_eq!(zstrip(args).stdout, zstrip(args).stdout, "{args:?}");
    }
    let timed = json(&["eval", "--t", "10", "--json", "--timing"]);
    assert!(timed["meta"]["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn scan_examples() {
    let out = zstrip(&["scan", "--from", "10", "--to", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a,b,N,dphi_over_pi,verdict,zeros");
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(cols[2], "3");
    assert_eq!(cols[4], "pass");
    assert_eq!(cols[5].split(';').count(), 3);

    let doc = json(&["scan", "--from", "14.2", "--to", "20.9", "--json"]);
    assert_eq!(doc["rows"][0]["N"], 0);
    assert_eq!(doc["rows"][0]["verdict"], "pass");
    assert_errors_everywhere(&doc);

    let doc = json(&["scan", "--from", "10", "--to", "100", "--json"]);
    assert_eq!(doc["rows"][0]["N"], 29);
    assert_errors_everywhere(&doc);

    assert_eq!(zstrip(&["scan", "--from", "5", "--to", "30"]).status.code(), Some(2));
    assert_eq!(zstrip(&["scan", "--from", "30", "--to", "20"]).status.code(), Some(2));
    assert_eq!(zstrip(&["scan", "--from", "10", "--to", "2e5"]).status.code(), Some(2));
}

#[test]
fn hstat_domain_floor() {
    assert_eq!(zstrip(&["hstat", "--t", "50"]).status.code(), Some(2));
    let doc = json(&["hstat", "--t", "1000", "--json"]);
    let c = doc["rows"][0]["c"]["value"].as_f64().unwrap();
    assert!((0.1..=0.45).contains(&c));
    assert_errors_everywhere(&doc);
}

#[test]
fn xray_of_the_figure_box() {
    let dir = std::env::temp_dir().join(format!("zstrip-xray-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.csv");
    let out = zstrip(&[
        "xray",
        "--re0",
        "10000",
        "--re1",
        "10020",
        "--im0",
        "-2",
        "--im1",
        "4",
        "--n",
        "100",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,sgn_re_H,sgn_im_H"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 10_000);
    for col in [2, 3] {
        assert!(rows.iter().any(|r| r[col] != rows[0][col]), "column {col} is constant");
    }
    let bad = zstrip(&[
        "xray", "--re0", "10000", "--re1", "10020", "--im0", "-4", "--im1", "4", "--n", "4",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}
