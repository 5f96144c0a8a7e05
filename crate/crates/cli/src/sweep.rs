//! Parameter sweeps: a pure map over the axis product with ordered output.

use clap::Args;
use fnel_core::liouville::fixed_point;
use fnel_core::matcore::{EllipticOperator, OperatorKind};
use fnel_core::scaling::{alpha_star, beta_star, classify, critical_exponent, explicit_constant};
use fnel_core::spectral::principal_eigenvalue;
use fnel_core::EllipticOperator64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::app::{
    ellipticity_summary, load_operator, parse_domain, resolve_jobs, Failure, Shared, EXIT_NUMERICAL, EXIT_OK,
    EXIT_SPEC, EXIT_USAGE,
};
use crate::output::{emit, Echo, Format};

/// Largest axis product a sweep will run.
pub const MAX_ROWS: usize = 1_000_000;

pub const AXES: [&str; 5] = ["p", "gamma", "lambda", "Lambda", "n"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCommand {
    Classify,
    AlphaStar,
    CriticalExponent,
    Constant,
    FixedPoint,
    Eigen,
}

impl SweepCommand {
    pub const ALL: &'static [SweepCommand] = &[
        SweepCommand::Classify,
        SweepCommand::AlphaStar,
        SweepCommand::CriticalExponent,
        SweepCommand::Constant,
        SweepCommand::FixedPoint,
        SweepCommand::Eigen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepCommand::Classify => "classify",
            SweepCommand::AlphaStar => "alpha-star",
            SweepCommand::CriticalExponent => "critical-exponent",
            SweepCommand::Constant => "constant",
            SweepCommand::FixedPoint => "fixed-point",
            SweepCommand::Eigen => "eigen",
        }
    }

    /// Result columns, between the axis columns and `error`.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            SweepCommand::Classify => &["alpha_star", "log_case", "beta_star", "margin", "outcome"],
            SweepCommand::AlphaStar => &["alpha_star", "log_case"],
            SweepCommand::CriticalExponent => &["critical_exponent"],
            SweepCommand::Constant => &["beta_star", "c"],
            SweepCommand::FixedPoint => &["beta_star", "norm", "r_bar", "residual", "newton_iterations"],
            SweepCommand::Eigen => &["lambda1", "iterations", "residual"],
        }
    }

    fn needs_p(self) -> bool {
        matches!(self, SweepCommand::Classify | SweepCommand::Constant | SweepCommand::FixedPoint)
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub shared: Shared,
    /// Command run on every row
    #[arg(long, value_enum)]
    pub command: SweepCommand,
    /// Comma-separated values; an empty list gives an empty sweep
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Defaults to the spec's value
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long = "Lambda")]
    #[serde(rename = "Lambda")]
    pub big_lambda: Option<String>,
    /// Defaults to the spec's dimension
    #[arg(long)]
    pub n: Option<String>,
    /// Grid cells for `eigen`
    #[arg(long, default_value_t = 512)]
    pub cells: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Domain for `eigen`
    #[arg(long, default_value = "annulus:1:2")]
    pub domain: String,
}

/// Parses a comma list, sorted ascending with duplicates removed.
pub fn parse_axis(name: &str, text: &str) -> Result<Vec<f64>, Failure> {
    let mut v = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let x: f64 = item.parse().map_err(|_| Failure::Usage(format!("--{name}: `{item}` is not a number")))?;
        if !x.is_finite() {
            return Err(Failure::Usage(format!("--{name}: `{item}` is not finite")));
        }
        v.push(x);
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub p: Option<f64>,
    pub gamma: f64,
    pub lambda: f64,
    pub big_lambda: f64,
    pub n: usize,
}

fn axis(name: &str, flag: &Option<String>, default: Option<f64>) -> Result<Vec<Option<f64>>, Failure> {
    match flag {
        Some(t) => Ok(parse_axis(name, t)?.into_iter().map(Some).collect()),
        None => Ok(vec![default]),
    }
}

/// Axis product in lexicographic order of (p, gamma, lambda, Lambda, n).
pub fn rows(args: &SweepArgs, base: &EllipticOperator64) -> Result<Vec<Row>, Failure> {
    if args.command.needs_p() && args.p.is_none() {
        return Err(Failure::Usage(format!("sweep --command {} needs --p", args.command.name())));
    }
    if base.kind() == OperatorKind::Laplacian && (args.lambda.is_some() || args.big_lambda.is_some()) {
        return Err(Failure::Usage("the laplacian has fixed constants; drop --lambda/--Lambda".into()));
    }
    let ps = axis("p", &args.p, None)?;
    let gammas = axis("gamma", &args.gamma, Some(0.0))?;
    let lambdas = axis("lambda", &args.lambda, Some(base.lambda()))?;
    let big_lambdas = axis("Lambda", &args.big_lambda, Some(base.big_lambda()))?;
    let ns = axis("n", &args.n, Some(base.dim() as f64))?;
    let mut dims = Vec::with_capacity(ns.len());
    for x in ns.into_iter().flatten() {
        if x < 1.0 || x.fract() != 0.0 {
            return Err(Failure::Usage(format!("--n: {x} is not a positive integer")));
        }
        dims.push(x as usize);
    }
    let total = [ps.len(), gammas.len(), lambdas.len(), big_lambdas.len(), dims.len()]
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k))
        .unwrap_or(usize::MAX);
    if total > MAX_ROWS {
        return Err(Failure::Usage(format!("sweep has {total} rows, more than the limit of {MAX_ROWS}")));
    }
    let mut out = Vec::with_capacity(total);
    for &p in &ps {
        for &gamma in gammas.iter().flatten() {
            for &lambda in lambdas.iter().flatten() {
                for &big_lambda in big_lambdas.iter().flatten() {
                    for &n in &dims {
                        out.push(Row { p, gamma, lambda, big_lambda, n });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn row_operator(base: &EllipticOperator64, row: &Row) -> fnel_core::Result<EllipticOperator64> {
    let (l, bl, n) = (row.lambda, row.big_lambda, row.n);
    match base.kind() {
        OperatorKind::Laplacian => EllipticOperator::laplacian(n),
        OperatorKind::PucciMax => EllipticOperator::pucci_max(n, l, bl),
        OperatorKind::PucciMin => EllipticOperator::pucci_min(n, l, bl),
        OperatorKind::Isaacs => {
            let op = if (l, bl) == (base.lambda(), base.big_lambda()) {
                base.clone()
            } else {
                EllipticOperator::isaacs(base.dim(), l, bl, base.families().to_vec(), base.rot_invariant())?
            };
            if n == op.dim() {
                Ok(op)
            } else {
                op.with_dim(n)
            }
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn evaluate(cmd: SweepCommand, base: &EllipticOperator64, row: &Row, args: &SweepArgs) -> Result<Vec<String>, String> {
    let run = || -> fnel_core::Result<Vec<String>> {
        let op = row_operator(base, row)?;
        let n = row.n;
        let p = row.p.unwrap_or(f64::NAN);
        Ok(match cmd {
            SweepCommand::Classify => {
                let v = classify(&op, n, p, row.gamma)?;
                vec![fmt(v.alpha_star), v.log_case.to_string(), fmt(v.beta_star), fmt(v.margin), v.outcome.label().into()]
            }
            SweepCommand::AlphaStar => {
                let r = alpha_star(&op, n, 1e-12)?;
                vec![fmt(r.alpha_star), r.log_case.to_string()]
            }
            SweepCommand::CriticalExponent => {
                let c = critical_exponent(&op, n)?;
                vec![match serde_json::to_value(c).expect("serializes") {
                    Value::String(s) => s,
                    v => v.to_string(),
                }]
            }
            SweepCommand::Constant => {
                let c = explicit_constant(&op, n, p, row.gamma)?;
                vec![fmt(beta_star(p, row.gamma)?), c.map(fmt).unwrap_or_default()]
            }
            SweepCommand::FixedPoint => {
                if row.gamma != 0.0 {
                    return Err(fnel_core::Error::ParameterDomain("fixed-point needs gamma = 0".into()));
                }
                let r = fixed_point(&op, n, p)?;
                vec![fmt(r.profile.beta), fmt(r.norm), fmt(r.r_bar), fmt(r.residual), r.newton_iterations.to_string()]
            }
            SweepCommand::Eigen => {
                let domain = parse_domain(&args.domain).map_err(|_| fnel_core::Error::ParameterDomain(args.domain.clone()))?;
                let e = principal_eigenvalue(&op, domain, args.cells, args.tol)?;
                vec![fmt(e.lambda1), e.iterations.to_string(), fmt(e.residual)]
            }
        })
    };
    run().map_err(|e| e.to_string())
}

pub fn header(cmd: SweepCommand) -> Vec<&'static str> {
    AXES.iter().chain(cmd.columns()).chain(std::iter::once(&"error")).copied().collect()
}

/// Evaluates every row on `jobs` workers; results come back in row order.
pub fn evaluate_rows(
    args: &SweepArgs,
    base: &EllipticOperator64,
    rows: &[Row],
    jobs: usize,
) -> Vec<Result<Vec<String>, String>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| rows.par_iter().map(|r| evaluate(args.command, base, r, args)).collect())
}

fn record(cmd: SweepCommand, row: &Row, result: &Result<Vec<String>, String>) -> Vec<String> {
    let mut rec = vec![
        row.p.map(fmt).unwrap_or_default(),
        fmt(row.gamma),
        fmt(row.lambda),
        fmt(row.big_lambda),
        row.n.to_string(),
    ];
    match result {
        Ok(cols) => {
            rec.extend(cols.iter().cloned());
            rec.push(String::new());
        }
        Err(e) => {
            rec.extend(std::iter::repeat_n(String::new(), cmd.columns().len()));
            rec.push(e.clone());
        }
    }
    rec
}

fn to_csv(cmd: SweepCommand, records: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(cmd)).expect("in-memory write");
    for r in records {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn to_json(cmd: SweepCommand, records: &[Vec<String>]) -> Value {
    let head = header(cmd);
    Value::Array(
        records
            .iter()
            .map(|r| Value::Object(head.iter().zip(r).map(|(k, v)| (k.to_string(), json!(v))).collect::<Map<_, _>>()))
            .collect(),
    )
}

pub fn run_sweep(args: &SweepArgs, params: Value) -> i32 {
    let out = args.shared.out.as_deref();
    let fail = |f: Failure| match f {
        Failure::Usage(m) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Failure::Spec(e) => {
            eprintln!("error: {e}");
            EXIT_SPEC
        }
        Failure::Numerical { error, .. } => {
            eprintln!("error: {error}");
            EXIT_NUMERICAL
        }
    };
    let loaded = match load_operator(args.shared.op.as_deref()) {
        Ok(l) => l,
        Err(f) => return fail(f),
    };
    if let Err(f) = ellipticity_summary(&loaded.op, args.shared.seed) {
        return fail(f);
    }
    let rows = match rows(args, &loaded.op) {
        Ok(r) => r,
        Err(f) => return fail(f),
    };
    let results = evaluate_rows(args, &loaded.op, &rows, resolve_jobs(args.shared.jobs));
    let failed = results.iter().filter(|r| r.is_err()).count();
    let records: Vec<Vec<String>> = rows.iter().zip(&results).map(|(row, r)| record(args.command, row, r)).collect();
    let echo = Echo {
        command: format!("sweep {}", args.command.name()),
        digest: Some(loaded.spec.digest()),
        operator: Some(loaded.spec),
        params,
    };
    let text = match args.shared.format {
        Format::Csv => format!("{}{}", echo.csv_preamble(), to_csv(args.command, &records)),
        Format::Json => echo.json(
            if failed == 0 { "ok" } else { "failed" },
            "rows",
            to_json(args.command, &records),
        ),
    };
    if let Err(e) = emit(out, &text) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    if failed > 0 {
        eprintln!("error: {failed} of {} rows failed", rows.len());
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}
