//! The `karp` command line: argument parsing, dispatch and output formats.
//!
//! Every command builds a JSON payload plus a flat table; `--format` picks
//! the JSON envelope, the table as CSV, or the table as aligned text.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use karpelevic::arc_powers::{all_relations, verify_power_numeric, PowerRelation};
use karpelevic::boundary::{parse_rational, sample_arc, Angle, BoundaryLocator, BoundaryPoint};
use karpelevic::farey::{arc_params, arcs_of_order, farey_sequence, ArcId, ArcType, FareyPair};
use karpelevic::matrix_powers::{decide_power_tii, decide_power_tiii, SourcePartition};
use karpelevic::realizations::{build, char_poly, join};
use karpelevic::Error;

pub const FORMAT_VERSION: u32 = 1;
/// Default order budget for enumeration commands.
pub const DEFAULT_MAX_N: i64 = 2000;
/// Default order budget for commands that build exact matrices.
pub const DEFAULT_MATRIX_MAX_N: i64 = 64;

#[derive(Debug, Parser)]
#[command(name = "karp", version, about = "Boundary of the Karpelevič region and powers of its arcs")]
pub struct Cli {
    /// Output format; boundary defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the Farey fractions of order n.
    Farey {
        n: i64,
        /// List consecutive pairs and their arcs instead.
        #[arg(long)]
        pairs: bool,
    },
    /// Points of the boundary curve.
    Boundary(BoundaryArgs),
    /// Power relations between arcs of order n.
    ArcPowers {
        n: i64,
        /// Restrict to relations with target K_n(q, s).
        #[arg(requires = "s")]
        q: Option<i64>,
        s: Option<i64>,
    },
    /// Build a realizing stochastic matrix for K_n(q, s).
    Realize(RealizeArgs),
    /// Decide whether a realization with the given partition is a c-th power.
    PowerCheck(PowerCheckArgs),
    /// Check every power relation numerically along the boundary.
    Verify {
        n: i64,
        #[arg(requires = "s")]
        q: Option<i64>,
        s: Option<i64>,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "where")]
pub struct BoundaryWhere {
    /// Radians, or a multiple of pi such as `29/42pi`.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Samples per arc, endpoints included.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    pub n: i64,
    #[command(flatten)]
    pub at: BoundaryWhere,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    pub n: i64,
    pub q: i64,
    pub s: i64,
    /// Expected arc type; an error if the arc has another.
    #[arg(long = "type", value_parser = ["0", "I", "II", "III"])]
    pub arc_type: Option<String>,
    /// Comma-separated partition, required for Type II and III.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long, default_value = "1/2")]
    pub alpha: String,
    /// Also write the matrix, one `i j p/q` entry per line.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct PowerCheckArgs {
    pub n: i64,
    pub q: i64,
    pub s: i64,
    #[arg(long)]
    pub c: i64,
    #[arg(long)]
    pub partition: String,
}

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) => 3,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        // a closed pipe (`karp ... | head`) is not a failure
        let code = if e.kind() == std::io::ErrorKind::BrokenPipe { 0 } else { 1 };
        CliError { code, message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced before formatting.
struct Report {
    command: &'static str,
    header: Value,
    payload: Value,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Printed after the table in text mode.
    trailer: Option<String>,
    /// Set when the command ran but its check failed.
    failure: Option<String>,
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        round15(x).to_string()
    }
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(round15(x))
    } else {
        json!(fmt_float(x))
    }
}

/// `29/42pi`, `2pi`, `pi` or `π`, or plain radians.
pub fn parse_angle(text: &str) -> CliResult<Angle> {
    let t = text.trim();
    let bad = || CliError::validation(format!("cannot read angle `{text}`"));
    let body = t.strip_suffix("pi").or_else(|| t.strip_suffix('π'));
    match body {
        Some(b) => {
            let b = b.trim().trim_end_matches('*').trim();
            if b.is_empty() {
                return Ok(Angle::PiMultiple(1, 1));
            }
            let (num, den) = match b.split_once('/') {
                Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
                None => (b.parse().map_err(|_| bad())?, 1),
            };
            if den <= 0 {
                return Err(bad());
            }
            Ok(Angle::PiMultiple(num, den))
        }
        None => {
            let x: f64 = t.parse().map_err(|_| bad())?;
            if !x.is_finite() {
                return Err(bad());
            }
            Ok(Angle::Radians(x))
        }
    }
}

pub fn parse_partition(text: &str) -> CliResult<Vec<i64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| CliError::validation(format!("cannot read partition `{text}`")))
        })
        .collect()
}

/// The order budget, `KARP_MAX_N` if set.
fn budget(default: i64) -> CliResult<i64> {
    match std::env::var("KARP_MAX_N") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::validation(format!("KARP_MAX_N must be an integer, got `{v}`"))),
        Err(_) => Ok(default),
    }
}

fn check_n(n: i64, default: i64) -> CliResult<()> {
    let limit = budget(default)?;
    if n < 1 {
        return Err(CliError::validation(format!("n must be at least 1, got {n}")));
    }
    if n > limit {
        return Err(CliError::validation(format!(
            "n = {n} exceeds the budget {limit}; raise KARP_MAX_N to allow it"
        )));
    }
    Ok(())
}

fn arc_json(a: ArcId) -> Value {
    json!({ "q": a.q(), "s": a.s() })
}

fn pair_json(p: &FareyPair) -> Value {
    json!({
        "left": p.left.to_string(),
        "right": p.right.to_string(),
        "arc": p.arc().map(arc_json),
    })
}

fn farey(n: i64, pairs: bool) -> CliResult<Report> {
    check_n(n, DEFAULT_MAX_N)?;
    let seq = farey_sequence(n)?;
    let fractions: Vec<String> = seq.iter().map(ToString::to_string).collect();
    let consecutive: Vec<FareyPair> = seq
        .windows(2)
        .map(|w| FareyPair::new(w[0], w[1], n))
        .collect::<karpelevic::Result<_>>()?;
    let mut payload = json!({ "fractions": fractions });
    let (columns, rows) = if pairs {
        payload["pairs"] = consecutive.iter().map(pair_json).collect();
        let rows = consecutive
            .iter()
            .map(|p| {
                let (q, s) = p.arc().map_or((String::new(), String::new()), |a| (a.q().to_string(), a.s().to_string()));
                vec![p.left.to_string(), p.right.to_string(), q, s]
            })
            .collect();
        (vec!["left", "right", "q", "s"], rows)
    } else {
        (vec!["fraction"], fractions.iter().map(|f| vec![f.clone()]).collect())
    };
    Ok(Report {
        command: "farey",
        header: json!({ "n": n }),
        payload,
        columns,
        rows,
        trailer: None,
        failure: None,
    })
}

fn point_row(p: &BoundaryPoint) -> Vec<String> {
    vec![
        fmt_float(p.theta),
        fmt_float(p.rho),
        fmt_float(p.mu),
        fmt_float(p.alpha),
        p.arc.q().to_string(),
        p.arc.s().to_string(),
    ]
}

fn point_json(p: &BoundaryPoint) -> Value {
    json!({
        "theta": json_float(p.theta),
        "rho": json_float(p.rho),
        "mu": json_float(p.mu),
        "alpha": json_float(p.alpha),
        "q": p.arc.q(),
        "s": p.arc.s(),
        "conjugate": p.conjugate,
    })
}

fn boundary(args: &BoundaryArgs) -> CliResult<Report> {
    let n = args.n;
    check_n(n, DEFAULT_MAX_N)?;
    let mut points = match (&args.at.theta, args.at.samples) {
        (Some(t), None) => vec![BoundaryLocator::new(n)?.rho_at(parse_angle(t)?)?],
        (None, Some(k)) => {
            let mut all = Vec::new();
            for a in arcs_of_order(n)? {
                all.extend(sample_arc(a, k)?);
            }
            all
        }
        _ => return Err(CliError::validation("give exactly one of --theta or --samples")),
    };
    points.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.arc.cmp(&b.arc)));
    Ok(Report {
        command: "boundary",
        header: json!({ "n": n }),
        payload: json!({ "points": points.iter().map(point_json).collect::<Vec<_>>() }),
        columns: vec!["theta", "rho", "mu", "alpha", "q", "s"],
        rows: points.iter().map(point_row).collect(),
        trailer: None,
        failure: None,
    })
}

fn relations(n: i64, q: Option<i64>, s: Option<i64>) -> CliResult<Vec<PowerRelation>> {
    let rels = all_relations(n)?;
    Ok(match (q, s) {
        (Some(q), Some(s)) => {
            let target = ArcId::new(n, q, s)?;
            rels.into_iter().filter(|r| r.target == target).collect()
        }
        _ => rels,
    })
}

fn relation_json(r: &PowerRelation) -> Value {
    json!({ "target": arc_json(r.target), "source": arc_json(r.source), "c": r.c })
}

fn relation_cells(r: &PowerRelation) -> Vec<String> {
    vec![
        r.target.q().to_string(),
        r.target.s().to_string(),
        r.source.q().to_string(),
        r.source.s().to_string(),
        r.c.to_string(),
    ]
}

fn arc_powers(n: i64, q: Option<i64>, s: Option<i64>) -> CliResult<Report> {
    check_n(n, DEFAULT_MAX_N)?;
    let rels = relations(n, q, s)?;
    Ok(Report {
        command: "arc-powers",
        header: json!({ "n": n, "q": q, "s": s }),
        payload: json!({ "relations": rels.iter().map(relation_json).collect::<Vec<_>>() }),
        columns: vec!["target_q", "target_s", "source_q", "source_s", "c"],
        rows: rels.iter().map(relation_cells).collect(),
        trailer: None,
        failure: None,
    })
}

fn type_label(t: ArcType) -> &'static str {
    match t {
        ArcType::Type0 => "0",
        ArcType::TypeI => "I",
        ArcType::TypeII => "II",
        ArcType::TypeIII => "III",
        ArcType::Unsupported => "unsupported",
    }
}

fn realize(args: &RealizeArgs) -> CliResult<Report> {
    check_n(args.n, DEFAULT_MATRIX_MAX_N)?;
    let arc = ArcId::new(args.n, args.q, args.s)?;
    let found = arc_params(arc).arc_type;
    if let Some(want) = &args.arc_type {
        if want != type_label(found) {
            return Err(CliError::validation(format!("{arc} is Type {}, not Type {want}", type_label(found))));
        }
    }
    let alpha = parse_rational(&args.alpha)
        .ok_or_else(|| CliError::validation(format!("cannot read alpha `{}`", args.alpha)))?;
    let parts = args.partition.as_deref().map(parse_partition).transpose()?;
    let m = build(arc, parts.as_deref(), &alpha)?;
    let f = char_poly(&m)?;
    if let Some(path) = &args.out {
        std::fs::write(path, m.to_string())?;
    }
    let g = m.digraph();
    let edges: Vec<Value> = m
        .entries()
        .map(|(&(i, j), w)| json!({ "from": i, "to": j, "weight": w.to_string() }))
        .collect();
    Ok(Report {
        command: "realize",
        header: json!({ "n": args.n, "q": args.q, "s": args.s }),
        payload: json!({
            "type": type_label(found),
            "alpha": alpha.to_string(),
            "partition": parts,
            "matrix": m,
            "nnz": m.nnz(),
            "digraph": edges,
            "char_poly": f.to_string(),
            "char_poly_coeffs": f,
        }),
        columns: vec!["row", "col", "value"],
        rows: m
            .entries()
            .map(|(&(i, j), w)| vec![i.to_string(), j.to_string(), w.to_string()])
            .collect(),
        trailer: Some(format!("{g}char_poly: {f}")),
        failure: None,
    })
}

fn witness_label(w: &SourcePartition) -> String {
    match w {
        SourcePartition::TypeI => "Type I".into(),
        SourcePartition::Class(c) => join(&c.max_rotation()),
    }
}

fn power_check(args: &PowerCheckArgs) -> CliResult<Report> {
    check_n(args.n, DEFAULT_MAX_N)?;
    let target = ArcId::new(args.n, args.q, args.s)?;
    let parts = parse_partition(&args.partition)?;
    let decision = match arc_params(target).arc_type {
        ArcType::TypeII => decide_power_tii(target, args.c, &parts)?,
        ArcType::TypeIII => decide_power_tiii(target, args.c, &parts)?,
        other => {
            return Err(CliError::validation(format!(
                "{target} is {}; power-check needs Type II or III",
                other.name()
            )))
        }
    };
    let witnesses: Vec<String> = decision.witnesses.iter().map(witness_label).collect();
    let rows = if witnesses.is_empty() {
        vec![vec![decision.verdict.to_string(), String::new()]]
    } else {
        witnesses.iter().map(|w| vec![decision.verdict.to_string(), w.clone()]).collect()
    };
    Ok(Report {
        command: "power-check",
        header: json!({ "n": args.n, "q": args.q, "s": args.s, "c": args.c }),
        payload: json!({
            "partition": join(&parts),
            "verdict": decision.verdict,
            "witness": witnesses.first(),
            "witnesses": witnesses,
        }),
        columns: vec!["verdict", "witness"],
        rows,
        trailer: None,
        failure: None,
    })
}

fn verify(n: i64, q: Option<i64>, s: Option<i64>, samples: usize, tol: f64) -> CliResult<Report> {
    check_n(n, DEFAULT_MAX_N)?;
    let rels = relations(n, q, s)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut failed = 0;
    for r in &rels {
        let c = verify_power_numeric(r, samples)?;
        let ok = c.passed(tol);
        failed += usize::from(!ok);
        let mut cells = relation_cells(r);
        cells.extend([
            samples.to_string(),
            fmt_float(c.max_deviation),
            fmt_float(c.endpoint_deviation),
            ok.to_string(),
        ]);
        rows.push(cells);
        checks.push(json!({
            "relation": relation_json(r),
            "max_deviation": json_float(c.max_deviation),
            "endpoint_deviation": json_float(c.endpoint_deviation),
            "passed": ok,
        }));
    }
    Ok(Report {
        command: "verify",
        header: json!({ "n": n, "q": q, "s": s }),
        payload: json!({ "samples": samples, "tol": tol, "checks": checks, "failed": failed }),
        columns: vec![
            "target_q",
            "target_s",
            "source_q",
            "source_s",
            "c",
            "samples",
            "max_deviation",
            "endpoint_deviation",
            "passed",
        ],
        rows,
        trailer: None,
        failure: (failed > 0).then(|| format!("{failed} of {} relations exceed tolerance {tol}", rels.len())),
    })
}

fn emit(report: &Report, format: Format, out: &mut dyn Write) -> CliResult<()> {
    match format {
        Format::Json => {
            let mut env = json!({
                "command": report.command,
                "format_version": FORMAT_VERSION,
                "payload": report.payload,
            });
            if let (Some(obj), Some(head)) = (env.as_object_mut(), report.header.as_object()) {
                for (k, v) in head {
                    if !v.is_null() {
                        obj.insert(k.clone(), v.clone());
                    }
                }
            }
            serde_json::to_writer_pretty(&mut *out, &env).map_err(|e| CliError { code: 1, message: e.to_string() })?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let io = |e: csv::Error| match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::from(io),
                other => CliError { code: 1, message: format!("{other:?}") },
            };
            w.write_record(&report.columns).map_err(io)?;
            for row in &report.rows {
                w.write_record(row).map_err(io)?;
            }
            w.flush()?;
        }
        Format::Text => {
            let widths: Vec<usize> = (0..report.columns.len())
                .map(|k| {
                    report
                        .rows
                        .iter()
                        .map(|r| r[k].len())
                        .chain([report.columns[k].len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(report.columns.clone()))?;
            for row in &report.rows {
                writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
            }
            if let Some(tail) = &report.trailer {
                writeln!(out, "{tail}")?;
            }
        }
    }
    Ok(())
}

/// Runs one invocation, writing its output to `out`.
///
/// A verification failure still writes the full report before returning
/// an error with exit code 1.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let (report, default) = match &cli.command {
        Command::Farey { n, pairs } => (farey(*n, *pairs)?, Format::Json),
        Command::Boundary(args) => (boundary(args)?, Format::Csv),
        Command::ArcPowers { n, q, s } => (arc_powers(*n, *q, *s)?, Format::Json),
        Command::Realize(args) => (realize(args)?, Format::Json),
        Command::PowerCheck(args) => (power_check(args)?, Format::Json),
        Command::Verify { n, q, s, samples, tol } => (verify(*n, *q, *s, *samples, *tol)?, Format::Json),
    };
    emit(&report, cli.format.unwrap_or(default), out)?;
    match report.failure {
        Some(message) => Err(CliError { code: 1, message }),
        None => Ok(()),
    }
}
