use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ellipticore::dynsys::VarFlow;
use ellipticore::modular::{constants_reduced, reduce_to_fundamental, theta1_factor, theta_reduced};
use ellipticore::poly::GaussRat;
use ellipticore::qkernel::{
    eta_w_value, etahat_value, g2_value, g3_value, theta, theta_mixed, Characteristic, EvalOptions, Tau, ThetaValue,
};
use ellipticore::recur::{
    build_table, sigma_series_poly, sigma_series_poly_halphen, theta1_series, theta1_series_poly, theta_even_series_poly,
    theta_series_char, xi_series, xi_series_poly, Family, SeriesPoly,
};
use ellipticore::scalar::parse_complex;
use ellipticore::verify::{run_suite_with_flow, Grid, Suite};
use ellipticore::{Complex64, Error, Lattice, UnimodularMap};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ellipticore", version, about = "Theta, sigma and Weierstrass functions with verification suites")]
struct Cli {
    /// Relative truncation tolerance of the q-series.
    #[arg(long, global = true, default_value_t = 1e-15)]
    rel_tol: f64,
    /// Maximum number of series terms.
    #[arg(long, global = true, default_value_t = 512)]
    max_terms: usize,
    /// Output format (default: json; csv for `table`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Evaluate at the given τ instead of reducing it to the fundamental domain first.
    #[arg(long, global = true)]
    no_reduce: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Q,
    Series,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one function at (x, τ).
    Eval {
        function: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, value_enum, default_value = "q")]
        method: Method,
        /// Series order for `--method series`.
        #[arg(long, default_value_t = 18)]
        order: usize,
    },
    /// Reduce τ to the fundamental domain.
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
    /// Series coefficients or recurrence tables.
    Expand {
        /// sigma, sigma1..sigma3, xi0, theta1..theta4, or table-A, table-B0, table-B1, table-C, table-G, table-G0, table-G1
        function: String,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// g | halphen (sigma), e (sigma1..3, xi0), theta (theta1..4)
        #[arg(long)]
        representation: Option<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// default | quick | x=<c>,..;tau=<c>,..
        #[arg(long, default_value = "default")]
        grid: String,
        /// Negate term TERM of flow equation EQ (0..3), to check that verification catches it.
        #[arg(long, hide = true, value_name = "EQ:TERM")]
        corrupt_flow: Option<String>,
    },
    /// Tabulate a function along a segment in x.
    Table {
        function: String,
        /// start:end:step, or start:end with --step
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long)]
        step: Option<f64>,
    },
}

/// Failure with its exit code.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 64,
            message: message.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain { .. } => 2,
            Error::Pole { .. } | Error::Singular { .. } | Error::Resonance { .. } => 3,
            Error::Truncation { .. } => 4,
            Error::InvalidArgument(_) | Error::InvalidRepresentation { .. } | Error::Normalization { .. } => 64,
            Error::Integrality { .. } | Error::Internal(_) => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Fail>;

fn complex(s: &str, what: &str) -> CliResult<Complex64> {
    parse_complex(s).ok_or_else(|| Fail::usage(format!("cannot parse {what} {s:?}; expected a+bi")))
}

fn modulus(s: &str) -> CliResult<Tau<f64>> {
    Ok(Tau::new(complex(s, "tau")?)?)
}

fn cjson(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    /// `sign·θ_{ch}`
    Theta { ch: Characteristic, sign: f64 },
    Theta1Prime,
    Sigma,
    SigmaLambda(u8),
    Zeta,
    Wp,
    WpPrime,
    G2,
    G3,
    Eta,
    Etahat,
    Branch(u8),
    Vartheta(u8),
}

impl Func {
    fn parse(s: &str) -> CliResult<Self> {
        let digit = |p: &str, lo: u8, hi: u8| s.strip_prefix(p).and_then(|d| d.parse::<u8>().ok()).filter(|k| (lo..=hi).contains(k));
        if let Some(inner) = s.strip_prefix("theta[").and_then(|r| r.strip_suffix(']')) {
            let (a, b) = inner.split_once(',').ok_or_else(|| Fail::usage(format!("bad characteristic in {s:?}")))?;
            let p = |v: &str| v.trim().parse::<i64>().map_err(|_| Fail::usage(format!("bad characteristic in {s:?}")));
            return Ok(Func::Theta {
                ch: Characteristic::new(p(a)?, p(b)?),
                sign: 1.0,
            });
        }
        Ok(match s {
            "theta1_prime" => Func::Theta1Prime,
            "sigma" => Func::Sigma,
            "zeta" => Func::Zeta,
            "wp" => Func::Wp,
            "wp_prime" => Func::WpPrime,
            "g2" => Func::G2,
            "g3" => Func::G3,
            "eta" => Func::Eta,
            "etahat" => Func::Etahat,
            _ => {
                if let Some(k) = digit("theta", 1, 4) {
                    Func::Theta {
                        ch: Characteristic::classical(k),
                        sign: if k == 1 { -1.0 } else { 1.0 },
                    }
                } else if let Some(k) = digit("sigma", 1, 3) {
                    Func::SigmaLambda(k)
                } else if let Some(k) = digit("e", 1, 3) {
                    Func::Branch(k)
                } else if let Some(k) = digit("vartheta", 2, 4) {
                    Func::Vartheta(k)
                } else {
                    return Err(Fail::usage(format!("unknown function {s:?}")));
                }
            }
        })
    }
}

struct Evaluated {
    value: Complex64,
    terms_used: Option<usize>,
    tail_estimate: Option<f64>,
}

impl Evaluated {
    fn plain(value: Complex64) -> Self {
        Self {
            value,
            terms_used: None,
            tail_estimate: None,
        }
    }

    fn from_theta(v: ThetaValue<f64>, factor: Complex64) -> Self {
        Self {
            value: v.value * factor,
            terms_used: Some(v.terms_used),
            tail_estimate: Some(v.tail_estimate * factor.norm()),
        }
    }
}

/// Index of the half-period `ω_λ` after the basis change by `m`
/// (`ω₁ = 1`, `ω₂ = 1 + τ`, `ω₃ = τ`).
fn permuted_lambda(lam: u8, m: &UnimodularMap) -> u8 {
    let (p, q) = match lam {
        1 => (1, 0),
        2 => (1, 1),
        _ => (0, 1),
    };
    let p2 = (p * m.a - q * m.b).rem_euclid(2);
    let q2 = (-p * m.c + q * m.d).rem_euclid(2);
    match (p2, q2) {
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

fn eval_q(f: Func, x: Complex64, tau: &Tau<f64>, reduce: bool, opts: &EvalOptions) -> CliResult<Evaluated> {
    let (map, t) = if reduce {
        let r = reduce_to_fundamental(tau)?;
        (r.map, r.reduced_tau)
    } else {
        (UnimodularMap::IDENTITY, *tau)
    };
    let z = map.cocycle(tau.value());
    let one = Complex64::new(1.0, 0.0);
    let th = |ch: Characteristic, x: Complex64| -> CliResult<ThetaValue<f64>> {
        Ok(if reduce { theta_reduced(ch, x, tau, opts)? } else { theta(ch, x, tau, opts)? })
    };
    let weighted = |v: ThetaValue<f64>, exact: Complex64| -> Evaluated {
        let k = if v.value.norm() > 0.0 { exact.norm() / v.value.norm() } else { 1.0 };
        Evaluated {
            value: exact,
            terms_used: Some(v.terms_used),
            tail_estimate: Some(v.tail_estimate * k),
        }
    };
    Ok(match f {
        Func::Theta { ch, sign } => Evaluated::from_theta(th(ch, x)?, one * sign),
        Func::Vartheta(k) => Evaluated::from_theta(th(Characteristic::classical(k), Complex64::new(0.0, 0.0))?, one),
        Func::Theta1Prime => {
            // θ₁(x|τ) = F(x/z)/P(x) with F = θ₁(·|Mτ), P′/P = 2πicx/z
            let neg = Characteristic::THETA1_NEG;
            let u = x / z;
            let f0 = -theta(neg, u, &t, opts)?.value;
            let f1 = -theta_mixed(neg, u, &t, 1, 0, opts)?;
            let p = theta1_factor(x, tau, &map)?;
            let dlog = Complex64::new(0.0, 2.0 * std::f64::consts::PI * map.c as f64) * x / z;
            Evaluated::plain((f1 / z - f0 * dlog) / p)
        }
        Func::G2 | Func::G3 | Func::Eta | Func::Etahat => {
            let c = constants_reduced(&t, opts)?;
            let exact = if reduce { constants_reduced(tau, opts)? } else { c };
            match f {
                Func::G2 => weighted(g2_value(&t, opts)?, exact.g2),
                Func::G3 => weighted(g3_value(&t, opts)?, exact.g3),
                Func::Eta => weighted(eta_w_value(&t, opts)?, exact.eta_w),
                _ => weighted(etahat_value(&t, opts)?, exact.etahat),
            }
        }
        Func::Sigma | Func::Zeta | Func::Wp | Func::WpPrime | Func::SigmaLambda(_) | Func::Branch(_) => {
            let l = Lattice::new(t, *opts)?;
            let u = x / z;
            let v = match f {
                Func::Sigma => l.sigma(u)? * z,
                Func::Zeta => l.zeta(u)? / z,
                Func::Wp => l.wp(u)? / (z * z),
                Func::WpPrime => l.wp_prime(u)? / (z * z * z),
                Func::SigmaLambda(lam) => l.sigma_lambda(permuted_lambda(lam, &map), u)?,
                Func::Branch(lam) => {
                    let inv = l.invariants()?;
                    [inv.e1, inv.e2, inv.e3][(permuted_lambda(lam, &map) - 1) as usize] / (z * z)
                }
                _ => unreachable!(),
            };
            Evaluated::plain(v)
        }
    })
}

fn eval_series(f: Func, x: Complex64, tau: &Tau<f64>, order: usize, opts: &EvalOptions) -> CliResult<Evaluated> {
    if order < 2 {
        return Err(Fail::usage("series order must be at least 2"));
    }
    let at = |n: usize| -> CliResult<Complex64> {
        Ok(match f {
            Func::Theta { ch, sign } if ch.is_odd() => {
                let (_, s) = ch.classical_index();
                theta1_series(x, tau, n)? * (s as f64) * sign * -1.0 * -1.0
            }
            Func::Theta { ch, sign } => theta_series_char(ch, x, tau, n)? * sign,
            Func::Sigma => {
                let l = Lattice::new(*tau, *opts)?;
                sigma_series_poly(n)?.eval(x, &[l.g2, l.g3])
            }
            Func::SigmaLambda(lam) => {
                let l = Lattice::new(*tau, *opts)?;
                let inv = l.invariants()?;
                xi_series(1, x, [inv.e1, inv.e2, inv.e3][(lam - 1) as usize], l.g2, n)?
            }
            _ => return Err(Fail::usage("this function has no series route; use --method q")),
        })
    };
    let v = at(order)?;
    let prev = at(order - 1)?;
    Ok(Evaluated {
        value: v,
        terms_used: Some(order + 1),
        tail_estimate: Some((v - prev).norm()),
    })
}

fn options(cli: &Cli) -> CliResult<EvalOptions> {
    Ok(EvalOptions::new(cli.rel_tol, cli.max_terms)?)
}

fn cmd_eval(cli: &Cli, function: &str, x: &str, tau: &str, method: Method, order: usize) -> CliResult<String> {
    let opts = options(cli)?;
    let f = Func::parse(function)?;
    let xv = complex(x, "x")?;
    let t = modulus(tau)?;
    let out = match method {
        Method::Q => eval_q(f, xv, &t, !cli.no_reduce, &opts)?,
        Method::Series => eval_series(f, xv, &t, order, &opts)?,
    };
    let doc = json!({
        "schema": ellipticore::verify::SCHEMA,
        "function": function,
        "x": cjson(xv),
        "tau": cjson(t.value()),
        "value": cjson(out.value),
        "method": if method == Method::Q { "q" } else { "series" },
        "terms_used": out.terms_used,
        "tail_estimate": out.tail_estimate,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("json"))
}

fn cmd_reduce(tau: &str) -> CliResult<String> {
    let t = modulus(tau)?;
    let r = reduce_to_fundamental(&t)?;
    let m = r.map;
    let doc = json!({
        "schema": ellipticore::verify::SCHEMA,
        "tau": cjson(t.value()),
        "reduced_tau": cjson(r.reduced_tau.value()),
        "map": { "a": m.a, "b": m.b, "c": m.c, "d": m.d },
    });
    Ok(serde_json::to_string_pretty(&doc).expect("json"))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn factorial(n: u32) -> GaussRat {
    (1..=n as i64).fold(GaussRat::one(), |acc, k| acc.scale_int(k))
}

fn series_rows(s: &SeriesPoly, names: &[&str], with_c: bool) -> Vec<Vec<(String, Value)>> {
    s.coefficients
        .iter()
        .enumerate()
        .map(|(k, (power, c))| {
            let mut row = vec![
                ("k".to_string(), json!(k)),
                ("power".to_string(), json!(power)),
                ("coefficient".to_string(), json!(c.render(names))),
            ];
            if with_c {
                row.push(("c_k".to_string(), json!(c.scale(&factorial(*power)).render(names))));
            }
            row
        })
        .collect()
}

fn cmd_expand(cli: &Cli, function: &str, order: usize, representation: Option<&str>) -> CliResult<String> {
    let mut meta = serde_json::Map::new();
    let rows: Vec<Vec<(String, Value)>> = if let Some(name) = function.strip_prefix("table-") {
        let fam = Family::parse(name).ok_or_else(|| Fail::usage(format!("unknown table {name:?}")))?;
        let t = build_table(fam, order)?;
        if fam == Family::C {
            meta.insert("variables".into(), json!(["g2", "g3"]));
            (0..=order)
                .map(|k| vec![("k".to_string(), json!(k)), ("value".to_string(), json!(t.poly(k).render(&["g2", "g3"])))])
                .collect()
        } else {
            t.rows()
                .into_iter()
                .filter(|(m, n, _)| (m + n) as usize <= order)
                .map(|(m, n, v)| vec![("m".to_string(), json!(m)), ("n".to_string(), json!(n)), ("value".to_string(), json!(v.to_string()))])
                .collect()
        }
    } else {
        let rep = representation;
        let bad_rep = || Fail::usage(format!("representation {rep:?} is not available for {function}"));
        match function {
            "sigma" => {
                let s = match rep.unwrap_or("g") {
                    "g" => (*sigma_series_poly(order)?).clone(),
                    "halphen" => sigma_series_poly_halphen(order)?,
                    _ => return Err(bad_rep()),
                };
                meta.insert("variables".into(), json!(["g2", "g3"]));
                series_rows(&s, &["g2", "g3"], true)
            }
            "sigma1" | "sigma2" | "sigma3" | "xi0" => {
                if !matches!(rep.unwrap_or("e"), "e") {
                    return Err(bad_rep());
                }
                let eps = if function == "xi0" { 0 } else { 1 };
                meta.insert("variables".into(), json!(["e", "g2"]));
                meta.insert("e".into(), json!(format!("branch point e_lambda of {function}")));
                series_rows(&*xi_series_poly(eps, order)?, &["e", "g2"], true)
            }
            "theta1" | "theta2" | "theta3" | "theta4" => {
                if !matches!(rep.unwrap_or("theta"), "theta") {
                    return Err(bad_rep());
                }
                let k: u8 = function[5..].parse().expect("digit");
                let (s, names, pre, pq) = if k == 1 {
                    (theta1_series_poly(order)?, ["pi", "eta", "P", "Q"], "2*pi*etahat^3".to_string(), ("vartheta2^4", "vartheta4^4"))
                } else {
                    let ch = Characteristic::classical(k);
                    let (a, b) = (ch.alpha, ch.beta);
                    let p = format!("vartheta[{},0]^4", (a - 1).rem_euclid(2));
                    let q = format!("vartheta[0,{}]^4", (b - 1).rem_euclid(2));
                    let s = theta_even_series_poly(ch, order)?;
                    meta.insert("P".into(), json!(p));
                    meta.insert("Q".into(), json!(q));
                    (s, ["pi", "eta", "P", "Q"], format!("vartheta{k}"), ("", ""))
                };
                if k == 1 {
                    meta.insert("P".into(), json!(pq.0));
                    meta.insert("Q".into(), json!(pq.1));
                }
                meta.insert("prefactor".into(), json!(pre));
                meta.insert("variables".into(), json!(names));
                series_rows(&s, &names, false)
            }
            _ => return Err(Fail::usage(format!("nothing to expand for {function:?}"))),
        }
    };
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let rows: Vec<Value> = rows.into_iter().map(|r| Value::Object(r.into_iter().collect())).collect();
            let mut doc = serde_json::Map::new();
            doc.insert("schema".into(), json!(ellipticore::verify::SCHEMA));
            doc.insert("function".into(), json!(function));
            doc.insert("order".into(), json!(order));
            if let Some(r) = representation {
                doc.insert("representation".into(), json!(r));
            }
            doc.extend(meta);
            doc.insert("rows".into(), Value::Array(rows));
            Ok(serde_json::to_string_pretty(&Value::Object(doc)).expect("json"))
        }
        Format::Csv => {
            let mut out = String::new();
            if let Some(first) = rows.first() {
                let header: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
                out.push_str(&header.join(","));
                out.push('\n');
            }
            for r in rows {
                let cells: Vec<String> = r
                    .into_iter()
                    .map(|(_, v)| match v {
                        Value::String(s) => csv_field(&s),
                        other => other.to_string(),
                    })
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Ok(out.trim_end().to_string())
        }
    }
}

fn cmd_verify(cli: &Cli, suite: &str, grid: &str, corrupt: Option<&str>) -> CliResult<(String, bool, Vec<String>)> {
    let opts = options(cli)?;
    let s = Suite::parse(suite).ok_or_else(|| Fail::usage(format!("unknown suite {suite:?}")))?;
    let g = Grid::parse(grid)?;
    let flow = match corrupt {
        None => VarFlow::standard(),
        Some(flip) => {
            let (e, t) = flip.split_once(':').ok_or_else(|| Fail::usage("--corrupt-flow expects EQ:TERM"))?;
            let p = |v: &str| v.parse::<usize>().map_err(|_| Fail::usage("--corrupt-flow expects EQ:TERM"));
            VarFlow::with_sign_flip(p(e)?, p(t)?)?
        }
    };
    let r = run_suite_with_flow(s, &g, &flow, &opts);
    let lines = r
        .failing()
        .map(|c| match &c.error {
            Some(e) => format!("FAIL {}:{} at {}: {e}", c.suite.label(), c.label, c.grid),
            None => format!("FAIL {}:{} at {}: residual {:e} > budget {:e}", c.suite.label(), c.label, c.grid, c.residual, c.budget),
        })
        .collect();
    Ok((serde_json::to_string_pretty(&r).expect("json"), r.pass, lines))
}

fn segment(range: &str, step: Option<f64>) -> CliResult<Vec<Complex64>> {
    let parts: Vec<&str> = range.split(':').collect();
    let (a, b, h) = match (parts.as_slice(), step) {
        ([a, b, h], None) => (*a, *b, h.parse::<f64>().map_err(|_| Fail::usage(format!("bad step {h:?}")))?),
        ([a, b], Some(h)) => (*a, *b, h),
        _ => return Err(Fail::usage("--x expects start:end:step (or start:end with --step)")),
    };
    let (a, b) = (complex(a, "x start")?, complex(b, "x end")?);
    if !(h > 0.0) || !h.is_finite() {
        return Err(Fail::usage("step must be positive"));
    }
    let len = (b - a).norm();
    let n = (len / h + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(Fail::usage("too many table rows"));
    }
    let dir = if len > 0.0 { (b - a) / len } else { Complex64::new(0.0, 0.0) };
    Ok((0..=n).map(|k| a + dir * (h * k as f64)).collect())
}

fn cmd_table(cli: &Cli, function: &str, x: &str, tau: &str, step: Option<f64>) -> CliResult<String> {
    let opts = options(cli)?;
    let f = Func::parse(function)?;
    let t = modulus(tau)?;
    let xs = segment(x, step)?;
    let mut rows = Vec::with_capacity(xs.len());
    for xv in xs {
        match eval_q(f, xv, &t, !cli.no_reduce, &opts) {
            Ok(v) => rows.push((xv, Some(v.value))),
            Err(e) if e.code == 3 => rows.push((xv, None)),
            Err(e) => return Err(e),
        }
    }
    let any_pole = rows.iter().any(|(_, v)| v.is_none());
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from(if any_pole { "x_re,x_im,re,im,pole" } else { "x_re,x_im,re,im" });
            for (xv, v) in rows {
                match (v, any_pole) {
                    (Some(v), false) => write!(out, "\n{},{},{},{}", xv.re, xv.im, v.re, v.im),
                    (Some(v), true) => write!(out, "\n{},{},{},{},0", xv.re, xv.im, v.re, v.im),
                    (None, _) => write!(out, "\n{},{},,,1", xv.re, xv.im),
                }
                .expect("string write");
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(xv, v)| json!({ "x": cjson(xv), "value": v.map(cjson), "pole": v.is_none() }))
                .collect();
            let doc = json!({
                "schema": ellipticore::verify::SCHEMA,
                "function": function,
                "tau": cjson(t.value()),
                "rows": rows,
            });
            Ok(serde_json::to_string_pretty(&doc).expect("json"))
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}").and_then(|_| out.flush());
}

fn run(cli: &Cli) -> CliResult<ExitCode> {
    let out = match &cli.cmd {
        Cmd::Eval {
            function,
            x,
            tau,
            method,
            order,
        } => cmd_eval(cli, function, x, tau, *method, *order)?,
        Cmd::Reduce { tau } => cmd_reduce(tau)?,
        Cmd::Expand {
            function,
            order,
            representation,
        } => cmd_expand(cli, function, *order, representation.as_deref())?,
        Cmd::Verify {
            suite,
            grid,
            corrupt_flow,
        } => {
            let (doc, pass, lines) = cmd_verify(cli, suite, grid, corrupt_flow.as_deref())?;
            emit(&doc);
            for l in lines {
                eprintln!("{l}");
            }
            return Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Cmd::Table { function, x, tau, step } => cmd_table(cli, function, x, tau, *step)?,
    };
    emit(&out);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
