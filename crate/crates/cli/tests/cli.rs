use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellipticore"))
        .args(args)
        .output()
        .expect("spawn ellipticore")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn value(doc: &Value) -> (f64, f64) {
    (doc["value"]["re"].as_f64().unwrap(), doc["value"]["im"].as_f64().unwrap())
}

fn eval(f: &str, x: &str, tau: &str, extra: &[&str]) -> (f64, f64) {
    let mut args = vec!["eval", f, "--x", x, "--tau", tau];
    args.extend_from_slice(extra);
    value(&json_ok(&args))
}

fn rel(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).hypot(a.1 - b.1)) / b.0.hypot(b.1).max(1e-300)
}

#[test]
fn theta3_at_large_imaginary_modulus_is_one() {
    let doc = json_ok(&["eval", "theta3", "--x", "0", "--tau", "0+50i"]);
    let v = value(&doc);
    assert!((v.0 - 1.0).abs() < 1e-15 && v.1.abs() < 1e-15);
    assert_eq!(doc["schema"], "ellipticore/1");
    assert!(doc["terms_used"].as_u64().unwrap() >= 1);
}

#[test]
fn g3_vanishes_at_i() {
    let v = eval("g3", "0", "i", &[]);
    assert!(v.0.hypot(v.1) < 1e-12);
}

#[test]
fn series_and_q_routes_agree() {
    for f in ["theta1", "theta2", "theta3", "theta4", "sigma", "sigma1", "sigma2", "sigma3"] {
        let q = eval(f, "0.25", "0.3+1.2i", &[]);
        let s = eval(f, "0.25", "0.3+1.2i", &["--method", "series", "--order", "18"]);
        assert!(rel(s, q) < 1e-11, "{f}: {:e}", rel(s, q));
    }
}

#[test]
fn series_route_rejects_functions_without_one() {
    let o = run(&["eval", "wp", "--x", "0.2", "--tau", "i", "--method", "series"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn reduce_examples() {
    let d = json_ok(&["reduce", "--tau", "0.25+2i"]);
    assert_eq!(d["reduced_tau"]["re"], 0.25);
    assert_eq!(d["reduced_tau"]["im"], 2.0);
    assert_eq!((d["map"]["a"].as_i64(), d["map"]["b"].as_i64(), d["map"]["c"].as_i64(), d["map"]["d"].as_i64()), (Some(1), Some(0), Some(0), Some(1)));

    for tau in [(5.3, 0.9), (0.5, 0.01)] {
        let d = json_ok(&["reduce", "--tau", &format!("{}+{}i", tau.0, tau.1)]);
        let (re, im) = (d["reduced_tau"]["re"].as_f64().unwrap(), d["reduced_tau"]["im"].as_f64().unwrap());
        assert!(im >= 3f64.sqrt() / 2.0 - 1e-12);
        assert!(re.abs() <= 0.5 + 1e-12 && re.hypot(im) >= 1.0 - 1e-12);
        let m = |k: &str| d["map"][k].as_i64().unwrap() as f64;
        let (a, b, c, dd) = (m("a"), m("b"), m("c"), m("d"));
        assert_eq!(a * dd - b * c, 1.0);
        // inverse action: τ = (dτ′ − b)/(−cτ′ + a)
        let num = (dd * re - b, dd * im);
        let den = (-c * re + a, -c * im);
        let n2 = den.0 * den.0 + den.1 * den.1;
        let back = ((num.0 * den.0 + num.1 * den.1) / n2, (num.1 * den.0 - num.0 * den.1) / n2);
        assert!((back.0 - tau.0).abs() < 1e-13 * 10.0 && (back.1 - tau.1).abs() < 1e-13 * 10.0, "{back:?}");
        let q = (-std::f64::consts::PI * im).exp();
        assert!(q <= (-std::f64::consts::PI * 3f64.sqrt() / 2.0).exp() + 1e-15);
    }
}

#[test]
fn expand_sigma_gives_halphen_leading_terms() {
    let d = json_ok(&["expand", "sigma", "--order", "3", "--representation", "g"]);
    let c: Vec<&str> = d["rows"].as_array().unwrap().iter().map(|r| r["c_k"].as_str().unwrap()).collect();
    assert_eq!(c, ["1", "0", "-1/2*g2", "-6*g3"]);
}

#[test]
fn expand_table_a_is_integral() {
    let d = json_ok(&["expand", "table-A", "--order", "8"]);
    let rows = d["rows"].as_array().unwrap();
    assert!(rows.len() >= 40);
    for r in rows {
        let v = r["value"].as_str().unwrap();
        assert!(v.parse::<i128>().is_ok() || v.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()), "{v}");
    }
    assert_eq!(rows[0]["value"], "1");
}

#[test]
fn expand_theta1_shows_eta_in_cubic_term() {
    let d = json_ok(&["expand", "theta1", "--order", "2", "--representation", "theta"]);
    assert_eq!(d["prefactor"], "2*pi*etahat^3");
    let rows = d["rows"].as_array().unwrap();
    assert_eq!(rows[0]["coefficient"], "1");
    assert_eq!(rows[1]["power"], 3);
    assert_eq!(rows[1]["coefficient"], "-2*eta");
}

#[test]
fn expand_csv_has_header() {
    let o = run(&["--format", "csv", "expand", "table-G", "--order", "4"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("m,n,value\n"));
}

#[test]
fn verify_identities_passes_tightly() {
    let o = run(&["verify", "--suite", "identities", "--grid", "default"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let d: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(d["pass"], true);
    for c in d["checks"].as_array().unwrap() {
        assert!(c["residual"].as_f64().unwrap() <= 1e-11, "{}", c["label"]);
    }
}

#[test]
fn verify_modular_covers_twelve_matrices() {
    let o = run(&["verify", "--suite", "modular"]);
    assert_eq!(o.status.code(), Some(0));
    let d: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let laws = d["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["label"].as_str().unwrap().starts_with("theta1_law"))
        .map(|c| c["label"].as_str().unwrap().to_string())
        .collect::<std::collections::BTreeSet<_>>();
    assert!(laws.len() >= 12, "{laws:?}");
}

#[test]
fn corrupted_flow_fails_and_names_equation() {
    let o = run(&["verify", "--suite", "all", "--grid", "quick", "--corrupt-flow", "1:0"]);
    assert_ne!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("vartheta_flow/vartheta3"), "{err}");
    let d: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(d["pass"], false);
}

#[test]
fn table_theta3_rows_and_header() {
    let o = run(&["table", "theta3", "--x", "0:1:0.1", "--tau", "0+1.2i"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "x_re,x_im,re,im");
    assert_eq!(lines.len(), 12);
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        let e = eval("theta3", &format!("{}+{}i", f[0], f[1]), "0+1.2i", &[]);
        assert_eq!((f[2].parse::<f64>().unwrap(), f[3].parse::<f64>().unwrap()), e);
    }
}

#[test]
fn table_wp_marks_pole() {
    let o = run(&["table", "wp", "--x", "-0.2:0.2:0.1", "--tau", "0+1.2i"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("x_re,x_im,re,im,pole"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let poles: Vec<_> = rows.iter().filter(|r| r[4] == "1").collect();
    assert_eq!(poles.len(), 1);
    assert_eq!((poles[0][2], poles[0][3]), ("", ""));
    assert!(rows.iter().filter(|r| r[4] == "0").all(|r| !r[2].is_empty()));
}

#[test]
fn reduction_does_not_change_values() {
    for tau in ["-0.4+0.9i", "3.7+0.5i", "0.1+0.6i"] {
        for f in ["theta1", "theta[3,-2]", "theta1_prime", "sigma", "sigma2", "zeta", "wp", "wp_prime", "g2", "eta", "etahat", "e1", "e3", "vartheta4"] {
            let a = eval(f, "0.21+0.13i", tau, &["--max-terms", "4096"]);
            let b = eval(f, "0.21+0.13i", tau, &["--max-terms", "4096", "--no-reduce"]);
            assert!(rel(a, b) <= 1e-11, "{f} at {tau}: {:e}", rel(a, b));
        }
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["eval", "sigma", "--x", "0.3-0.1i", "--tau", "0.2+1.1i"][..],
        &["table", "theta1", "--x", "0:0.5:0.05", "--tau", "-0.4+0.9i"][..],
        &["verify", "--suite", "odes", "--grid", "quick"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eval", "theta1", "--x", "0.1", "--tau", "0-1i"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "theta1", "--x", "0.1", "--tau", "1 + 2i"]).status.code(), Some(64));
    assert_eq!(run(&["eval", "theta1", "--x", "abc", "--tau", "i"]).status.code(), Some(64));
    assert_eq!(run(&["eval", "nope", "--tau", "i"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["eval", "wp", "--x", "0", "--tau", "i"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "g2", "--tau", "0.3+0.02i", "--no-reduce", "--max-terms", "4"]).status.code(), Some(4));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}
