use std::process::{Command, Output};

use nleq_core::lookup;
use serde_json::Value;

fn nleq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nleq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = nleq(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn list_shows_registry() {
    let out = nleq(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for name in [
        "dgv-full:0121a",
        "dgv-full:0121b",
        "dgv-full:0121c",
        "dgv-reduced:0121a",
        "simple2",
        "trigexp:",
        "brent:",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
    let v = json(&["list", "--format", "json"]);
    let simple2 = v.as_array().unwrap().iter().find(|e| e["name"] == "simple2").unwrap();
    assert_eq!(simple2["n_params"], 2);
    assert!(simple2["starts"].as_array().unwrap().iter().any(|s| s == "xstart3"));
}

#[test]
fn cascade_json_winner() {
    let v = json(&["cascade", "--problem", "dgv-full:0121a", "--start", "x0", "--format", "json"]);
    assert_eq!(v["winner"]["method"], "newton");
    assert_eq!(v["winner"]["global"], "qline");
    let ss = v["sumsq"].as_f64().unwrap();
    assert!(ss <= 1e-20, "{ss:e}");
}

#[test]
fn grid_table_shape() {
    let out = nleq(&["grid", "--problem", "dgv-full:0121a", "--start", "x0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(header, ["Method", "Global", "termcd", "Fcnt", "Jcnt", "Iter", "Message", "Fnorm"]);
    assert_eq!(lines.len(), 15);

    let csv = stdout(&nleq(&["grid", "--problem", "dgv-full:0121a", "--format", "csv"]));
    let csv_lines: Vec<&str> = csv.lines().collect();
    assert_eq!(csv_lines[0].split(',').collect::<Vec<_>>(), header);
    assert_eq!(csv_lines.len(), 15);
}

#[test]
fn numbers_keep_ten_digits() {
    let text = stdout(&nleq(&["grid", "--problem", "simple2", "--start", "xbasin", "--method", "newton"]));
    let fnorm = text.lines().nth(1).unwrap().split_whitespace().last().unwrap();
    let mantissa = fnorm.split('e').next().unwrap().replace(['-', '.'], "");
    assert!(mantissa.len() >= 10, "{fnorm}");
}

#[test]
fn solve_json_round_trips_sumsq() {
    let cases: &[&[&str]] = &[
        &["--problem", "dgv-full:0121a", "--solver", "root", "--method", "newton", "--global", "qline"],
        &["--problem", "dgv-reduced:0121a", "--solver", "lm"],
        &["--problem", "simple2", "--start", "xstart3", "--solver", "vm"],
        &["--problem", "simple2", "--start", "xbeyond", "--solver", "neldermead"],
        &["--problem", "trigexp:20", "--solver", "dfsane"],
        &["--problem", "dgv-reduced:0121b", "--solver", "dfsane-acc", "--history", "10"],
        &["--problem", "simple2", "--start", "2.5,0.5", "--solver", "cg"],
    ];
    for case in cases {
        let mut args = vec!["solve", "--format", "json"];
        args.extend_from_slice(case);
        let v = json(&args);
        let row = &v["rows"][0];
        let problem = lookup(row["problem"].as_str().unwrap()).unwrap();
        let x = floats(&row["x"]);
        let reported = row["sumsq"].as_f64().unwrap();
        let again = problem.sum_squares(&x).unwrap();
        assert!(
            (again - reported).abs() <= 1e-15 * reported.abs().max(f64::MIN_POSITIVE),
            "{case:?}: {reported:e} vs {again:e}"
        );
    }
}

#[test]
fn lm_json_has_singvals() {
    let v = json(&["solve", "--problem", "dgv-reduced:0121a", "--solver", "lm", "--format", "json"]);
    let sv = floats(&v["rows"][0]["singvals"]);
    assert_eq!(sv.len(), 6);
    assert!(sv.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn exit_status_contract() {
    let code = |args: &[&str]| nleq(args).status.code();
    assert_eq!(code(&["solve", "--problem", "simple2", "--start", "xbasin", "--strict"]), Some(0));
    // Broyden trust-region rows hit the iteration cap on this problem.
    assert_eq!(code(&["grid", "--problem", "dgv-full:0121a", "--strict"]), Some(1));
    assert_eq!(code(&["grid", "--problem", "dgv-full:0121a"]), Some(0));
    assert_eq!(
        code(&["solve", "--problem", "trigexp:20", "--solver", "dfsane", "--maxiter", "1", "--strict"]),
        Some(1)
    );
    assert_eq!(code(&["solve", "--problem", "simple2", "--bogus"]), Some(2));
    assert_eq!(code(&["solve", "--problem", "simple2", "--format", "xml"]), Some(2));
    assert_eq!(code(&["solve", "--problem", "simple2", "--solver", "lm", "--M", "3"]), Some(2));
    assert_eq!(code(&["solve", "--problem", "simple2", "--solver", "vm", "--parscale", "1,2,3"]), Some(2));
    assert_eq!(code(&["grid", "--problem", "simple2", "--history", "5"]), Some(2));
    assert_eq!(code(&["compare", "--problem", "simple2", "--solver", "lm", "--method", "newton"]), Some(2));
    assert_eq!(code(&["cascade", "--problem", "simple2", "--start", "nowhere"]), Some(2));
    assert_eq!(code(&["solve", "--solver", "lm"]), Some(2));
}

#[test]
fn usage_errors_name_the_token() {
    let out = nleq(&["solve", "--problem", "dgv-full:9999"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("9999"));
    let out = nleq(&["solve", "--problem", "simple2", "--solver", "gradient-descent"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gradient-descent"));
}

#[test]
fn compare_rows_and_timing() {
    let v = json(&[
        "compare", "--problem", "simple2", "--start", "xbasin", "--start", "xbeyond", "--solver",
        "root,lm,vm", "--method", "newton,broyden", "--global", "qline", "--reps", "2", "--format",
        "json",
    ]);
    let rows = v["rows"].as_array().unwrap();
    // (2 root + lm + vm) x 2 starts
    assert_eq!(rows.len(), 8);
    assert_eq!(v["timing"].as_array().unwrap().len(), 8);
    assert!(v["timing"].as_array().unwrap().iter().all(|t| t["reps"] == 2));

    let csv = stdout(&nleq(&["compare", "--problem", "simple2", "--solver", "lm", "--format", "csv"]));
    let header = csv.lines().next().unwrap();
    assert_eq!(header, "Problem,Start,Solver,Sumsq,Converged,Fevals,Iter,Message");
}

#[test]
fn parallel_grid_matches_sequential() {
    let strip = |mut v: Value| {
        for row in v["rows"].as_array_mut().unwrap() {
            row.as_object_mut().unwrap().remove("wall_us");
        }
        v
    };
    let seq = strip(json(&["grid", "--problem", "dgv-reduced:0121a", "--format", "json"]));
    let par = strip(json(&["grid", "--problem", "dgv-reduced:0121a", "--parallel", "--format", "json"]));
    assert_eq!(seq, par);
}

#[test]
fn minimizer_scaling_flags() {
    let v = json(&[
        "solve", "--problem", "dgv-reduced:0121a", "--solver", "vm", "--parscale",
        "0.01,1,0.01,0.1,1,1", "--format", "json",
    ]);
    assert_eq!(v["rows"][0]["solver"], "vm+parscale");
    let v = json(&[
        "solve", "--problem", "simple2", "--start", "xbasin", "--solver", "neldermead", "--rscale",
        "1,0", "--format", "json",
    ]);
    assert_eq!(v["rows"][0]["solver"], "neldermead+rscale");
}
