use std::process::{Command, Output};

use cumulant_bounds::combinatorics::ordered_bell;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cumbounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&full)).unwrap()
}

fn rows(v: &Value) -> &Vec<Value> {
    v["rows"].as_array().unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64()
        .unwrap_or_else(|| v.as_str().unwrap().parse().unwrap())
}

#[test]
fn coefficient_table_csv() {
    let out = stdout(&[
        "coeffs",
        "--class",
        "all-three",
        "--max-n",
        "9",
        "--format",
        "csv",
    ]);
    let expected = "n,raw,cen,sym\n\
                    2,2,1,1\n3,6,1,0\n4,26,4,4\n5,150,11,0\n6,1082,56,46\n\
                    7,9366,267,0\n8,94586,1730,1114\n9,1091670,11643,0\n";
    assert_eq!(out, expected);
}

#[test]
fn symmetric_odd_rows_vanish() {
    let v = json(&["coeffs", "--class", "sym", "--max-n", "3"]);
    let pairs: Vec<(u64, u64)> = rows(&v)
        .iter()
        .map(|r| (r["n"].as_u64().unwrap(), r["sym"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, vec![(2, 1), (3, 0)]);
}

#[test]
fn raw_row_twenty_is_twice_ordered_bell() {
    let out = stdout(&[
        "coeffs", "--class", "raw", "--max-n", "20", "--format", "csv",
    ]);
    let last = out.lines().last().unwrap();
    assert_eq!(last, format!("20,{}", ordered_bell(19) * 2u32));
}

#[test]
fn big_integers_print_in_full() {
    let out = stdout(&[
        "coeffs", "--class", "raw", "--max-n", "250", "--format", "csv",
    ]);
    let last = out.lines().last().unwrap();
    assert!(!last.contains('e') && last.len() > 300);
    let v = json(&["coeffs", "--class", "raw", "--max-n", "250"]);
    let text = serde_json::to_string(&rows(&v)[248]["raw"]).unwrap();
    assert_eq!(text, (ordered_bell(249) * 2u32).to_string());
}

#[test]
fn asymptotic_columns() {
    let v = json(&["coeffs", "--max-n", "40", "--asymptotic"]);
    let last = rows(&v).last().unwrap();
    for c in ["raw", "cen", "sym"] {
        let ratio = num(&last[format!("{c}_ratio")]);
        assert!((ratio - 1.0).abs() < 0.1, "{c}: {ratio}");
    }
    let v = json(&["coeffs", "--class", "sym", "--max-n", "5", "--asymptotic"]);
    assert!(rows(&v)[1]["sym_ratio"].is_null());
}

#[test]
fn scientific_beyond_f64_range() {
    let v = json(&[
        "coeffs",
        "--class",
        "cen",
        "--max-n",
        "200",
        "--asymptotic",
        "--scientific",
    ]);
    let last = rows(&v).last().unwrap();
    let approx = last["cen_asymptotic"].to_string();
    assert!(approx.contains('e'), "{approx}");
    let exponent: i32 = approx.split('e').nth(1).unwrap().parse().unwrap();
    let digits = last["cen"].to_string().len() as i32;
    assert_eq!(exponent, digits - 1);
    assert!((num(&last["cen_ratio"]) - 1.0).abs() < 1e-6);
}

#[test]
fn transform_examples() {
    let v = json(&["transform", "--moments", "0,1,0,3"]);
    let k: Vec<&str> = rows(&v)
        .iter()
        .map(|r| r["cumulant"].as_str().unwrap())
        .collect();
    assert_eq!(k, ["0", "1", "0", "0"]);
    let v = json(&["transform", "--cumulants", "1,1,1,1"]);
    let m: Vec<&str> = rows(&v)
        .iter()
        .map(|r| r["moment"].as_str().unwrap())
        .collect();
    assert_eq!(m, ["1", "2", "5", "15"]);
}

#[test]
fn transform_roundtrip_and_decimals() {
    let input = "1/3,-0.25,7,2e-1,-5/9";
    let k = json(&["transform", "--moments", input]);
    let kappas: Vec<&str> = rows(&k)
        .iter()
        .map(|r| r["cumulant"].as_str().unwrap())
        .collect();
    let back = json(&["transform", "--cumulants", &kappas.join(",")]);
    let moments: Vec<&str> = rows(&back)
        .iter()
        .map(|r| r["moment"].as_str().unwrap())
        .collect();
    assert_eq!(moments, ["1/3", "-1/4", "7", "1/5", "-5/9"]);
}

#[test]
fn transform_center() {
    let v = json(&[
        "transform",
        "--moments",
        "1,2,5,15",
        "--direction",
        "center",
    ]);
    let c: Vec<&str> = rows(&v)
        .iter()
        .map(|r| r["central_moment"].as_str().unwrap())
        .collect();
    assert_eq!(c, ["0", "1", "1", "4"]);
}

#[test]
fn transform_parse_error_names_token() {
    let out = run(&["transform", "--moments", "1,2,oops,4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'oops'"));
    let out = run(&["transform", "--moments", "1,2", "--direction", "to-moments"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["transform", "--moments", "1,2", "--direction", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gaussian_converse_three_le_four() {
    let v = json(&[
        "bound",
        "--law",
        "gaussian:sigma=1",
        "--max-n",
        "4",
        "--converse",
    ]);
    let row = rows(&v)
        .iter()
        .find(|r| r["row_type"] == "converse-central" && r["n"] == 4)
        .unwrap();
    assert_eq!(row["moment"], "3");
    assert_eq!(num(&row["bound"]), 4.0);
    assert_eq!(row["ok"], true);
}

#[test]
fn bound_rows_for_law() {
    let v = json(&["bound", "--law", "poisson:lambda=2", "--max-n", "10"]);
    let bound_rows: Vec<&Value> = rows(&v)
        .iter()
        .filter(|r| r["row_type"] == "bound")
        .collect();
    assert!(!bound_rows.is_empty());
    for r in &bound_rows {
        assert!(num(&r["slack"]) <= 1.0 + 1e-9);
    }
    for n in 2..=10u64 {
        let tight: Vec<&&Value> = bound_rows
            .iter()
            .filter(|r| r["n"] == n && r["tightest"] == true)
            .collect();
        assert_eq!(tight.len(), 1, "n = {n}");
        assert_eq!(tight[0]["kind"], "central");
    }
}

#[test]
fn bound_from_moment_list() {
    let v = json(&[
        "bound",
        "--moments",
        "0,1,0,1",
        "--abs-moments",
        "1,1,1,1",
        "--symmetric",
        "--centered",
    ]);
    let sym4 = rows(&v)
        .iter()
        .find(|r| r["n"] == 4 && r["kind"] == "symmetric")
        .unwrap();
    assert_eq!(sym4["cumulant"], "-2");
    assert_eq!(num(&sym4["bound"]), 4.0);
    assert_eq!(sym4["tightest"], true);
}

#[test]
fn unknown_law_lists_registry() {
    let out = run(&["bound", "--law", "cauchy"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in [
        "rademacher",
        "gaussian",
        "bernoulli",
        "poisson",
        "exponential",
        "uniform",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn violated_bound_exits_one() {
    let out = run(&[
        "bound",
        "--moments",
        "0,1",
        "--abs-moments",
        "0,1",
        "--central-abs-moments",
        "0,1/2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("central"));
}

#[test]
fn tail_example() {
    let v = json(&["tail", "--v", "1", "--b", "1", "--x", "3"]);
    let t = num(&rows(&v)[0]["tail"]);
    assert!((t - (-9.0f64 / 8.0).exp()).abs() < 1e-15);
    assert!(t.to_string().starts_with("0.324652"));
}

#[test]
fn tail_derive_and_law_check() {
    let v = json(&["tail", "--derive", "1,1", "--x", "1,2"]);
    let r = &rows(&v)[0];
    assert_eq!(num(&r["v_prime"]), 1.0);
    assert_eq!(r["a_cen_argmax"], 2);
    assert!((num(&r["b"]) - 0.8725).abs() < 1e-4);
    let out = run(&["tail", "--derive", "1,1", "--law", "exponential:rate=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["tail", "--derive", "1,1", "--law", "rademacher"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["tail", "--v", "1", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["tail", "--v", "-1", "--b", "1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rates_default_precision() {
    let v = json(&["rates"]);
    let values: Vec<String> = rows(&v)[..3]
        .iter()
        .map(|r| r["value"].to_string())
        .collect();
    assert_eq!(values, ["0.693147", "1.146193", "1.316958"]);
    let out = run(&["rates", "--precision", "40"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["coeffs", "--max-n", "1"][..],
        &["coeffs", "--class", "odd"],
        &["coeffs", "--bogus"],
        &["transform"],
        &["bound", "--law", "gaussian", "--max-n", "0"],
        &["bound", "--moments", "1,2", "--max-n", "3"],
        &["sample", "--law", "poisson", "--count", "0"],
        &["nonsense"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_passes() {
    let v = json(&["check", "--max-n", "12"]);
    assert_eq!(rows(&v).len(), 6);
    for r in rows(&v) {
        assert_eq!(r["violations"], 0);
        assert_eq!(r["converse_failures"], 0);
    }
}

#[test]
fn sampling_tracks_exact_moments() {
    let v = json(&[
        "sample",
        "--law",
        "gaussian:sigma=1",
        "--count",
        "20000",
        "--seed",
        "7",
    ]);
    for r in rows(&v).iter().take(2) {
        assert!((num(&r["empirical_moment"]) - num(&r["exact_moment"])).abs() < 0.05);
    }
}

const ALL_COMMANDS: &[&[&str]] = &[
    &["coeffs", "--max-n", "12", "--asymptotic"],
    &[
        "coeffs",
        "--class",
        "cen",
        "--max-n",
        "180",
        "--asymptotic",
        "--scientific",
    ],
    &["transform", "--moments", "1/2,0.3,-4"],
    &["transform", "--cumulants", "0,1,2"],
    &["transform", "--moments", "1,2,5", "--direction", "center"],
    &[
        "bound",
        "--law",
        "exponential:rate=2",
        "--max-n",
        "9",
        "--converse",
    ],
    &[
        "bound",
        "--moments",
        "0,1,0,3",
        "--abs-moments",
        "0.8,1,1.6,3",
        "--symmetric",
    ],
    &[
        "tail",
        "--v",
        "2",
        "--b",
        "0.5",
        "--x",
        "1,2,3,5",
        "--two-sided",
    ],
    &["tail", "--derive", "1,2"],
    &["rates", "--precision", "12"],
    &[
        "sample",
        "--law",
        "uniform:a=1",
        "--count",
        "500",
        "--seed",
        "3",
    ],
    &["check", "--max-n", "8"],
];

#[test]
fn outputs_are_deterministic() {
    for args in ALL_COMMANDS {
        for format in ["json", "csv", "table"] {
            let mut full = args.to_vec();
            full.extend(["--format", format]);
            assert_eq!(stdout(&full), stdout(&full), "{full:?}");
        }
    }
}

#[test]
fn json_matches_published_schema() {
    let schema: Value = serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for args in ALL_COMMANDS {
        let doc = json(args);
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
        assert_eq!(doc["command"], args[0]);
    }
    let bad =
        serde_json::json!({"schema_version": "1.0", "command": "coeffs", "rows": [{"n": [1]}]});
    assert!(!validator.is_valid(&bad));
}

#[test]
fn csv_has_header_and_quotes() {
    let out = stdout(&["rates", "--format", "csv"]);
    let header = out.lines().next().unwrap();
    assert_eq!(header, "name,value,residual,definition");
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 5);
    assert_eq!(&records[4][3], "rho_sym / (pi/2)");
}
