//! Command-line front end: argument parsing, running the pipeline and
//! printing reports as text or JSON.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::linalg::RatMatrix;
use crate::matrix::{jacobian, PolyMatrix};
use crate::oracle::local_degree_bruteforce;
use crate::parser::{parse_point, parse_problem, render_rational, Mode, ProblemSpec};
use crate::pipeline::{run, CheckReport, Options, PointSelection, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rank2count", version, about = "Signed counts of rank-two points of 4x4 polynomial matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Signed count of the points where the matrix has rank two.
    Sigma2(Common),
    /// Sum of local degrees of the map over its real zeros (map mode only).
    Degree(Common),
    /// Local index and local dimension at a rational point.
    LocalIndex(PointArgs),
    /// Check the hypotheses without computing the count.
    Check(Common),
    /// Brute-force local degree by counting perturbed solutions.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Problem file.
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub max_retries: usize,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Include stage timings (makes the output run-dependent).
    #[arg(long)]
    pub timings: bool,
    /// Multiply by random invertible matrices even when not needed.
    #[arg(long)]
    pub regularize: bool,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: Common,
    /// Rational point, e.g. `0,1/2,-3,0`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Radius of the ball around the point.
    #[arg(long, default_value = "1/2")]
    pub radius: String,
    /// In map mode, take the local degree of the map itself rather than of
    /// the corner minors of its Jacobian matrix.
    #[arg(long)]
    pub map_degree: bool,
}

fn input_error(err: &mut dyn Write, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {msg}");
    EXIT_INPUT
}

fn load(path: &PathBuf) -> Result<ProblemSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_problem(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Problem(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch { .. }
        | Error::PointNotOnVariety { .. } => EXIT_INPUT,
        _ => EXIT_HYPOTHESIS,
    }
}

fn rational(r: &BigRational) -> Value {
    Value::String(render_rational(r))
}

fn matrix_json(m: &RatMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(rational).collect())).collect())
}

fn checks_json(c: &CheckReport) -> Value {
    json!({
        "p_is_unit": c.p_is_unit,
        "zero_dimensional": c.zero_dimensional,
        "s_plus_detA_unit": c.s_plus_det_a_unit,
    })
}

pub fn report_json(r: &Report, timings: bool) -> Value {
    let mut out = Map::new();
    out.insert("checks".into(), checks_json(&r.checks));
    out.insert("dim_A".into(), json!(r.checks.dim_a));
    out.insert(
        "inertia".into(),
        r.inertia.map_or(Value::Null, |i| json!({"pos": i.pos, "neg": i.neg, "null": i.null})),
    );
    out.insert("sigma2".into(), json!(r.sigma2));
    out.insert("degree".into(), json!(r.degree.as_ref().map(|d| d.degree)));
    out.insert(
        "points".into(),
        Value::Array(
            r.points
                .iter()
                .map(|p| {
                    json!({
                        "point": Value::Array(p.point.iter().map(rational).collect()),
                        "index": p.index,
                        "local_dim": p.local_dim,
                    })
                })
                .collect(),
        ),
    );
    out.insert(
        "regularization".into(),
        r.checks.regularization.as_ref().map_or(Value::Null, |g| {
            json!({
                "L1": matrix_json(&g.l1),
                "L2": matrix_json(&g.l2),
                "attempts": g.attempts,
                "seed": g.seed,
            })
        }),
    );
    let t = if timings {
        Value::Object(r.timings.iter().map(|(k, d)| (k.clone(), json!(d.as_secs_f64() * 1e3))).collect())
    } else {
        Value::Null
    };
    out.insert("timings_ms".into(), t);
    Value::Object(out)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn matrix_text(m: &RatMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| format!("[{}]", m.row(i).iter().map(render_rational).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

fn checks_text(c: &CheckReport) -> String {
    let mut s = String::new();
    s += &format!("2x2 minors generate the unit ideal: {}\n", yes(c.p_is_unit));
    s += &format!("3x3 minors zero-dimensional: {}\n", yes(c.zero_dimensional));
    if let Some(d) = c.dim_a {
        s += &format!("dim A = {d}\n");
    }
    s += &format!("S + det A is the unit ideal: {}\n", yes(c.s_plus_det_a_unit));
    if let Some(g) = &c.regularization {
        if g.attempts == 0 {
            s += "regularization: not needed\n";
        } else {
            s += &format!("regularization: {} attempts (seed {})\n", g.attempts, g.seed);
            s += &format!("L1 = {}\nL2 = {}\n", matrix_text(&g.l1), matrix_text(&g.l2));
        }
    }
    s
}

pub fn report_text(r: &Report, timings: bool) -> String {
    let mut s = checks_text(&r.checks);
    if let Some(i) = r.inertia {
        s += &format!("inertia = ({}, {}, {})\n", i.pos, i.neg, i.null);
    }
    if let Some(v) = r.sigma2 {
        s += &format!("sigma2 = {v}\n");
    }
    for p in &r.points {
        let pt: Vec<String> = p.point.iter().map(render_rational).collect();
        s += &format!("point ({}): index = {}, local dimension = {}\n", pt.join(", "), p.index, p.local_dim);
    }
    if let Some(d) = &r.degree {
        s += &format!("degree = {}\n", d.degree);
    }
    if timings {
        for (k, d) in &r.timings {
            s += &format!("time {k}: {:.1} ms\n", d.as_secs_f64() * 1e3);
        }
    }
    s
}

fn emit(out: &mut dyn Write, common: &Common, r: &Report) {
    let text = if common.json {
        let mut t = serde_json::to_string_pretty(&report_json(r, common.timings)).expect("serializable");
        t.push('\n');
        t
    } else {
        report_text(r, common.timings)
    };
    let _ = out.write_all(text.as_bytes());
}

fn options(common: &Common) -> Options {
    Options {
        seed: common.seed,
        max_retries: common.max_retries,
        force_regularization: common.regularize,
        ..Options::default()
    }
}

/// Run the pipeline; on failure print the diagnostics and return the exit code.
fn compute(common: &Common, opts: Options, out: &mut dyn Write, err: &mut dyn Write) -> Result<Report, i32> {
    let problem = load(&common.input).map_err(|msg| input_error(err, msg))?;
    if opts.degree {
        let _ = writeln!(
            err,
            "note: this is the topological degree only when the map is proper; otherwise it is the sum of local degrees at its real zeros"
        );
    }
    match run(&problem, &opts) {
        Ok(report) => Ok(report),
        Err(Error::ChecksFailed(checks)) => {
            let report = Report { checks: *checks.clone(), ..Report::default() };
            emit(out, common, &report);
            let _ = writeln!(err, "error: {}", Error::ChecksFailed(checks));
            Err(EXIT_HYPOTHESIS)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Err(exit_code(&e))
        }
    }
}

fn execute(common: &Common, opts: Options, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match compute(common, opts, out, err) {
        Ok(report) => {
            emit(out, common, &report);
            EXIT_OK
        }
        Err(code) => code,
    }
}

fn oracle(args: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let common = &args.point.common;
    let problem = match load(&common.input) {
        Ok(p) => p,
        Err(msg) => return input_error(err, msg),
    };
    let point = match parse_point(&args.point.point) {
        Ok(p) => p,
        Err(e) => return input_error(err, format!("bad point: {e}")),
    };
    let radius = match parse_point(&args.radius) {
        Ok(r) if r.len() == 1 => r[0].clone(),
        _ => return input_error(err, format!("bad radius {:?}", args.radius)),
    };
    let h = match (problem.mode, args.map_degree) {
        (Mode::Map, true) => problem.entries.clone(),
        (Mode::Map, false) => jacobian(&problem.entries).corner_minors().to_vec(),
        (Mode::Matrix, false) => PolyMatrix::from_entries(problem.entries.clone()).corner_minors().to_vec(),
        (Mode::Matrix, true) => return input_error(err, "--map-degree needs a map"),
    };
    match local_degree_bruteforce(&h, &point, &radius, common.seed) {
        Ok(d) => {
            let text = if common.json {
                let v = json!({
                    "point": Value::Array(point.iter().map(rational).collect()),
                    "radius": rational(&radius),
                    "degree": d,
                });
                serde_json::to_string_pretty(&v).expect("serializable") + "\n"
            } else {
                format!("local degree = {d}\n")
            };
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Run the command line `args` (program name first); returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match &cli.command {
        Command::Sigma2(c) => execute(c, Options { sigma2: true, ..options(c) }, out, err),
        Command::Check(c) => match compute(c, options(c), out, err) {
            Ok(report) => {
                emit(out, c, &report);
                if report.checks.p_is_unit && report.checks.zero_dimensional {
                    EXIT_OK
                } else {
                    let _ = writeln!(err, "error: {}", report.checks.failure_summary());
                    EXIT_HYPOTHESIS
                }
            }
            Err(code) => code,
        },
        Command::Degree(c) => execute(c, Options { degree: true, ..options(c) }, out, err),
        Command::LocalIndex(p) => {
            let point = match parse_point(&p.point) {
                Ok(pt) => pt,
                Err(e) => return input_error(err, format!("bad point: {e}")),
            };
            let opts = Options { points: PointSelection::Given(vec![point]), ..options(&p.common) };
            if p.common.json {
                return execute(&p.common, opts, out, err);
            }
            match compute(&p.common, opts, out, err) {
                Ok(report) => {
                    let r = &report.points[0];
                    let _ = writeln!(out, "index = {}, local dimension = {}", r.index, r.local_dim);
                    EXIT_OK
                }
                Err(code) => code,
            }
        }
        Command::Oracle(a) => oracle(a, out, err),
    }
}
