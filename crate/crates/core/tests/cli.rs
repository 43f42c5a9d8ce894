use std::io::Write;
use std::process::{Command, Output};

use lifemoments::format::fixed;
use lifemoments::tables::{self, Which};

fn table1() -> String {
    format!("{}/data/table1.csv", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lifemoments"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn records(text: &str) -> Vec<Vec<String>> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn moment_under_constant_force() {
    let t = table1();
    let out = stdout(&[
        "moment", "--table", &t, "--product", "term-insurance", "--x", "50", "--defer", "2", "--term", "7",
        "--i", "0.03", "--m", "1", "--assumption", "C",
    ]);
    assert_eq!(out, "C\n0.0444333\n");
}

#[test]
fn moment_under_three_assumptions() {
    let t = table1();
    let out = stdout(&[
        "moment", "--table", &t, "--product", "term-insurance", "--x", "50", "--defer", "2", "--term", "7",
        "--i", "0.03", "--assumption", "UDD,C,B",
    ]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("UDD,C,B"));
    let values: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    // a decreasing payoff: UDD <= C <= B
    assert!(values[0] <= values[1] && values[1] <= values[2], "{values:?}");
}

#[test]
fn zero_interest_gives_death_probability() {
    let t = table1();
    let out = stdout(&[
        "moment", "--table", &t, "--product", "term-insurance", "--x", "50", "--defer", "2", "--term", "7",
        "--i", "0", "--assumption", "C", "--precision", "12",
    ]);
    let table = tables::reference_table();
    let want = (table.lx(52).unwrap() - table.lx(59).unwrap()) / table.lx(50).unwrap();
    assert_eq!(records(&out)[0][0], fixed(want, 12));
}

#[test]
fn gompertz_column_rejected_for_csv_input() {
    let t = table1();
    let out = run(&[
        "moment", "--table", &t, "--product", "term-insurance", "--x", "50", "--i", "0.03", "--term", "5",
        "--assumption", "G",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("G"));
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(run(&["moment", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--which", "table9"]).status.code(), Some(2));
}

#[test]
fn age_outside_table_is_compute_error() {
    let t = table1();
    let out = run(&[
        "moment", "--table", &t, "--product", "term-insurance", "--x", "70", "--i", "0.03", "--term", "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn config_file_with_flag_override() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    write!(
        cfg,
        r#"{{"table": "{}", "product": "term-insurance", "x": 50, "defer": 2, "term": "7", "i": 0.05, "assumption": ["C"]}}"#,
        table1()
    )
    .unwrap();
    let path = cfg.path().to_str().unwrap();
    let from_file = stdout(&["moment", "--config", path]);
    let overridden = stdout(&["moment", "--config", path, "--i", "0.03"]);
    assert_eq!(overridden, "C\n0.0444333\n");
    assert_ne!(from_file, overridden);
}

#[test]
fn table2_round_trips_through_csv() {
    let out = stdout(&["table", "--which", "table2"]);
    let rows = records(&out);
    let lib = tables::build(Which::Table2, &Which::Table2.default_source(), &Which::Table2.default_laws()).unwrap();
    assert_eq!(rows.len(), lib.rows.len());
    for (printed, row) in rows.iter().zip(&lib.rows) {
        assert_eq!(printed[0], row.label);
        for (cell, v) in printed[1..].iter().zip(&row.values) {
            assert_eq!(*cell, fixed(*v, 7));
        }
    }
}

#[test]
fn table6_has_gompertz_column() {
    let out = stdout(&["table", "--which", "table6"]);
    assert!(out.starts_with("expectation,UDD,C,B,G\n"), "{out}");
    assert_eq!(records(&out).len(), 4);
}

#[test]
fn table3_at_higher_precision() {
    let out = stdout(&["table", "--which", "table3", "--assumption", "C", "--precision", "8"]);
    let rows = records(&out);
    assert_eq!(rows[2][0], "I(j)A");
    let cell = &rows[2][1];
    assert_eq!(cell.split('.').nth(1).unwrap().len(), 8);
    let v: f64 = cell.parse().unwrap();
    assert!((v - 3.01177542).abs() < 1e-6 * 3.01177542, "{cell}");
}

#[test]
fn plotdata_series() {
    let interp = records(&stdout(&["plotdata", "--which", "interp"]));
    let mid = interp.iter().find(|r| r[0] == "0.5000000").unwrap();
    assert_eq!(mid[2], fixed(0.8f64.sqrt(), 7));

    let density = records(&stdout(&["plotdata", "--which", "density"]));
    for row in density.iter().filter(|r| r[0].parse::<f64>().unwrap() < 1.0) {
        assert_eq!(row[1], "0.2000000");
    }

    let s = records(&stdout(&["plotdata", "--which", "gompertz_s"]));
    let g = tables::reference_gompertz();
    assert_eq!(s[1][1], fixed(g.survival(1.0), 7));
    assert_eq!(s.len(), 121);
}

#[test]
fn json_and_markdown_output() {
    let t = table1();
    let args = [
        "moment", "--table", &t, "--product", "term-insurance", "--x", "50", "--defer", "2", "--term", "7",
        "--i", "0.03", "--assumption", "C", "--format",
    ];
    let json = stdout(&[&args[..], &["json"]].concat());
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v[0]["C"], serde_json::json!(0.0444333));

    let md = stdout(&[&args[..], &["markdown"]].concat());
    assert_eq!(md, "| C |\n|---|\n| 0.0444333 |\n");
}
