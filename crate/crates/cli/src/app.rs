//! Argument parsing, command dispatch and exit codes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fnel_core::liouville::{
    bend_fundamental, build_global_supersolution, fixed_point, hadamard_check, log_grid, nonexistence_certificate,
    CertificateOptions, Psi,
};
use fnel_core::matcore::verify_ellipticity;
use fnel_core::scaling::{
    alpha_star, beta_star, classify, critical_exponent, explicit_constant, hypothesis_check, sampled_verdict,
    xi_alpha, NonlinearitySpec, SamplingPlan,
};
use fnel_core::solver::{
    fundamental_profile, solve_dirichlet_2d, solve_dirichlet_radial, Domain, Field, PlanarProblem, RadialProblem,
};
use fnel_core::spectral::principal_eigenvalue;
use fnel_core::{EllipticOperator64, Error as CoreError};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{emit, Echo, Format};
use crate::spec::{parse_operator_spec, OperatorSpec, SpecError};
use crate::sweep::{run_sweep, SweepArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_SPEC: i32 = 3;

/// Samples used for the ellipticity check run on every loaded operator.
pub const ELLIPTICITY_SAMPLES: usize = 256;

#[derive(Parser, Debug)]
#[command(name = "fnel", version, about = "Scaling exponents, Liouville experiments and solvers for fully nonlinear elliptic operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags accepted by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Shared {
    /// Operator spec file (JSON)
    #[arg(long)]
    pub op: Option<PathBuf>,
    /// Output file; stdout when absent
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; falls back to FNEL_JOBS, then to the available parallelism
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Seed of the sampled ellipticity check
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Point {
    /// Dimension; defaults to the spec's `n`
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Basic {
    #[command(flatten)]
    #[serde(flatten)]
    pub shared: Shared,
    #[command(flatten)]
    #[serde(flatten)]
    pub point: Point,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub basic: Basic,
    /// annulus:R0:R1, ball:R or rect:X0:X1:Y0:Y1
    #[arg(long, default_value = "annulus:1:2")]
    pub domain: String,
    /// Constant right-hand side
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rhs: f64,
    /// Boundary value on the inner sphere of an annulus
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub inner: f64,
    /// Boundary value on the outer sphere
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub outer: f64,
    /// Boundary value on a ball or rectangle
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub boundary: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DomainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub basic: Basic,
    #[arg(long, default_value = "annulus:1:2")]
    pub domain: String,
    /// Exponent of the boundary data `xi_alpha`; defaults to alpha*(F)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CertificateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub basic: Basic,
    /// Lower-bound constant `c` (an input, not derived)
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1e6)]
    pub sigma_max: f64,
    /// Use the constant growth curve in the critical case
    #[arg(long)]
    pub no_log_improvement: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FixedPointArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub basic: Basic,
    /// Angular points for operators without rotational invariance (n = 2)
    #[arg(long, default_value_t = fnel_core::liouville::cone::ANGULAR_POINTS)]
    pub points: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HypothesisArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub basic: Basic,
    /// f(x, s) = coef |x|^-x_power s^s_power
    #[arg(long, default_value_t = 1.0)]
    pub coef: f64,
    /// Defaults to --p
    #[arg(long, allow_negative_numbers = true)]
    pub s_power: Option<f64>,
    /// Defaults to --gamma
    #[arg(long, allow_negative_numbers = true)]
    pub x_power: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scaling exponent alpha*(F)
    AlphaStar(Basic),
    /// Critical exponent (alpha* + 2) / alpha*
    CriticalExponent(Basic),
    /// Existence or nonexistence from alpha* against beta*
    Classify(Basic),
    /// Explicit constant c of c r^-beta*
    Constant(Basic),
    /// Dirichlet problem F(D^2u) = rhs
    Solve(SolveArgs),
    /// Principal eigenvalue by inverse power iteration
    Eigen(SolveArgs),
    /// Fitted exponent of the fundamental profile
    Fundamental(Basic),
    /// Sphere-minimum monotonicity of a solve with xi_alpha data
    Hadamard(DomainArgs),
    /// Eigenvalue-growth crossing scale
    Certificate(CertificateArgs),
    /// Bent fundamental solution r^-beta*
    Bend(Basic),
    /// Global supersolution patched from a ball solve and r^-beta*
    Truncate(Basic),
    /// Homogeneous solution of F(D^2u) = u^p
    FixedPoint(FixedPointArgs),
    /// Sampled growth hypotheses on a power nonlinearity
    Hypothesis(HypothesisArgs),
    /// Parameter sweep to CSV
    Sweep(SweepArgs),
}

/// Ways a run can fail; each maps to an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Spec(SpecError),
    /// Numerical failure, with whatever report could be assembled.
    Numerical { error: String, detail: Value },
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Spec(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidOperator { field, message } => Failure::Spec(SpecError { field, message }),
            CoreError::ControlOutOfBounds { sup_index, inf_index, .. } => Failure::Spec(SpecError {
                field: format!("families[{sup_index}][{inf_index}]"),
                message: e.to_string(),
            }),
            CoreError::NoSignChange { .. } | CoreError::InvalidMatrix(_) => {
                Failure::Spec(SpecError { field: "kind".into(), message: e.to_string() })
            }
            CoreError::NoConvergence { iterations, last_residual, ref history } => Failure::Numerical {
                error: e.to_string(),
                detail: json!({ "iterations": iterations, "last_residual": last_residual, "history": history }),
            },
            CoreError::NonPositive(_)
            | CoreError::Singular(_)
            | CoreError::FitRejected { .. }
            | CoreError::NonMonotone(_)
            | CoreError::Evaluator { .. } => Failure::Numerical { error: e.to_string(), detail: Value::Null },
            CoreError::DimensionMismatch { .. }
            | CoreError::NotRotationallyInvariant
            | CoreError::ParameterDomain(_)
            | CoreError::WrongRegime(_) => Failure::Usage(e.to_string()),
        }
    }
}

/// A command's result: the JSON body and, when the command has one, a CSV curve.
pub struct Artifact {
    pub json: Value,
    pub csv: Option<String>,
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

pub struct Loaded {
    pub op: EllipticOperator64,
    pub spec: OperatorSpec,
}

pub fn load_operator(path: Option<&Path>) -> Result<Loaded, Failure> {
    let path = path.ok_or_else(|| Failure::Usage("--op FILE is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let op = parse_operator_spec(&text)?;
    let spec = OperatorSpec::from_operator(&op);
    Ok(Loaded { op, spec })
}

/// Operator in dimension `n` (default: the spec's).
fn at_dim(op: &EllipticOperator64, n: Option<usize>) -> Result<(EllipticOperator64, usize), Failure> {
    match n {
        None => Ok((op.clone(), op.dim())),
        Some(n) if n == op.dim() => Ok((op.clone(), n)),
        Some(n) => Ok((op.with_dim(n)?, n)),
    }
}

fn need_p(point: &Point) -> Result<f64, Failure> {
    point.p.ok_or_else(|| Failure::Usage("--p is required".into()))
}

pub fn parse_domain(s: &str) -> Result<Domain<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = |xs: &[&str]| -> Result<Vec<f64>, Failure> {
        xs.iter().map(|x| x.parse::<f64>().map_err(|_| Failure::Usage(format!("bad number `{x}` in --domain {s}")))).collect()
    };
    let d = match (parts[0], parts.len()) {
        ("annulus", 3) => {
            let v = nums(&parts[1..])?;
            Domain::annulus(v[0], v[1])
        }
        ("ball", 2) => Domain::ball(nums(&parts[1..])?[0]),
        ("rect", 5) => {
            let v = nums(&parts[1..])?;
            Domain::rectangle(v[0], v[1], v[2], v[3])
        }
        _ => return Err(Failure::Usage(format!("--domain must be annulus:R0:R1, ball:R or rect:X0:X1:Y0:Y1, got {s}"))),
    };
    d.map_err(|e| Failure::Usage(e.to_string()))
}

/// Planar grid spacing giving `cells` intervals across the domain's width.
fn planar_h(domain: Domain<f64>, cells: usize) -> f64 {
    match domain {
        Domain::Annulus { r1, .. } | Domain::Ball { r1 } => 2.0 * r1 / cells as f64,
        Domain::Rectangle { x0, x1, .. } => (x1 - x0) / cells as f64,
    }
}

fn use_radial(op: &EllipticOperator64, domain: Domain<f64>) -> bool {
    op.rot_invariant() && !matches!(domain, Domain::Rectangle { .. })
}

fn profile_csv(psi: &Psi<f64>) -> Option<String> {
    match psi {
        Psi::Constant(_) => None,
        Psi::Periodic(v) => {
            let m = v.len();
            let mut s = String::from("theta,psi\n");
            for (k, x) in v.iter().enumerate() {
                s.push_str(&format!("{},{x}\n", std::f64::consts::TAU * k as f64 / m as f64));
            }
            Some(s)
        }
    }
}

fn execute(cmd: &Command, loaded: &Loaded, digest: &str) -> Result<Artifact, Failure> {
    let op = &loaded.op;
    let art = |json: Value| Ok(Artifact { json, csv: None });
    match cmd {
        Command::AlphaStar(a) => {
            let (op, n) = at_dim(op, a.point.n)?;
            art(value(&alpha_star(&op, n, a.point.tol.unwrap_or(1e-12))?))
        }
        Command::CriticalExponent(a) => {
            let (op, n) = at_dim(op, a.point.n)?;
            art(json!({ "critical_exponent": value(&critical_exponent(&op, n)?) }))
        }
        Command::Classify(a) => {
            let (op, n) = at_dim(op, a.point.n)?;
            art(value(&classify(&op, n, need_p(&a.point)?, a.point.gamma)?))
        }
        Command::Constant(a) => {
            let (op, n) = at_dim(op, a.point.n)?;
            let p = need_p(&a.point)?;
            let c = explicit_constant(&op, n, p, a.point.gamma)?;
            art(json!({ "beta_star": beta_star(p, a.point.gamma)?, "c": c }))
        }
        Command::Solve(s) => {
            let (op, n) = at_dim(op, s.basic.point.n)?;
            let domain = parse_domain(&s.domain)?;
            let cells = s.basic.point.cells.unwrap_or(256);
            let rhs = s.rhs;
            let field = if use_radial(&op, domain) {
                let (inner, outer, b) = (s.inner, s.outer, s.boundary);
                let g: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match domain {
                    Domain::Annulus { r0, r1 } => Arc::new(move |r: f64| if (r - r0).abs() <= (r - r1).abs() { inner } else { outer }),
                    _ => Arc::new(move |_| b),
                };
                let pb = RadialProblem::new(n, domain, Arc::new(move |_| rhs), g)?;
                let sol = solve_dirichlet_radial(&op, &pb, cells)?;
                (Field::Radial(sol.field), sol.stats)
            } else {
                let (inner, outer, b) = (s.inner, s.outer, s.boundary);
                let g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> = match domain {
                    Domain::Annulus { r0, r1 } => Arc::new(move |x: f64, y: f64| {
                        let r = x.hypot(y);
                        if (r - r0).abs() <= (r - r1).abs() { inner } else { outer }
                    }),
                    _ => Arc::new(move |_, _| b),
                };
                let pb = PlanarProblem::new(domain, Arc::new(move |_, _| rhs), g);
                let sol = solve_dirichlet_2d(&op, &pb, planar_h(domain, cells))?;
                (Field::Planar(sol.field), sol.stats)
            };
            let (field, stats) = field;
            Ok(Artifact {
                csv: Some(field.to_csv(&format!("digest={digest}"))),
                json: json!({ "stats": value(&stats), "field": value(&field) }),
            })
        }
        Command::Eigen(s) => {
            let (op, _) = at_dim(op, s.basic.point.n)?;
            let domain = parse_domain(&s.domain)?;
            let cells = s.basic.point.cells.unwrap_or(512);
            let e = principal_eigenvalue(&op, domain, cells, s.basic.point.tol.unwrap_or(1e-10))?;
            Ok(Artifact {
                csv: Some(e.eigenfield.to_csv(&format!("digest={digest} lambda1={}", e.lambda1))),
                json: json!({
                    "lambda1": e.lambda1,
                    "iterations": e.iterations,
                    "drift": e.drift,
                    "residual": e.residual,
                    "history": e.history,
                }),
            })
        }
        Command::Fundamental(a) => {
            let (op, _) = at_dim(op, a.point.n)?;
            let f = fundamental_profile(&op, a.point.cells.unwrap_or(512))?;
            Ok(Artifact {
                csv: Some(f.field.to_csv(&format!("digest={digest}"))),
                json: json!({
                    "fitted_alpha": f.fitted_alpha,
                    "log_case": f.log_case,
                    "fit": value(&f.fit),
                    "alpha_from_max": f.alpha_from_max,
                }),
            })
        }
        Command::Hadamard(h) => {
            let (op, n) = at_dim(op, h.basic.point.n)?;
            let domain = parse_domain(&h.domain)?;
            let Domain::Annulus { .. } = domain else {
                return Err(Failure::Usage("hadamard needs an annulus domain".into()));
            };
            let alpha = match h.alpha {
                Some(a) => a,
                None => alpha_star(&op, n, 1e-12)?.alpha_star,
            };
            let cells = h.basic.point.cells.unwrap_or(512);
            let field = if use_radial(&op, domain) {
                let pb = RadialProblem::homogeneous(n, domain, Arc::new(move |r: f64| xi_alpha(alpha, r).unwrap_or(f64::NAN)))?;
                Field::Radial(solve_dirichlet_radial(&op, &pb, cells)?.field)
            } else {
                let pb = PlanarProblem::new(
                    domain,
                    Arc::new(|_, _| 0.0),
                    Arc::new(move |x: f64, y: f64| xi_alpha(alpha, x.hypot(y)).unwrap_or(f64::NAN)),
                );
                Field::Planar(solve_dirichlet_2d(&op, &pb, planar_h(domain, cells))?.field)
            };
            let rep = hadamard_check(&op, &field, Some(alpha))?;
            let mut csv = String::from("r,m\n");
            for (r, m) in rep.radii.iter().zip(&rep.minima) {
                csv.push_str(&format!("{r},{m}\n"));
            }
            Ok(Artifact { json: json!({ "passed": rep.passed(), "report": value(&rep) }), csv: Some(csv) })
        }
        Command::Certificate(c) => {
            let (op, n) = at_dim(op, c.basic.point.n)?;
            let opts = CertificateOptions {
                cells: c.basic.point.cells.unwrap_or(2048),
                eigen_tol: c.basic.point.tol.unwrap_or(1e-10),
                log_improvement: !c.no_log_improvement,
                ..CertificateOptions::default()
            };
            let rep = nonexistence_certificate(&op, n, need_p(&c.basic.point)?, c.basic.point.gamma, c.c, c.sigma_max, &opts)?;
            Ok(Artifact { csv: Some(rep.curve_csv()), json: value(&rep) })
        }
        Command::Bend(a) => {
            let (op, n) = at_dim(op, a.point.n)?;
            let rep = bend_fundamental(&op, n, need_p(&a.point)?, a.point.gamma)?;
            let mut csv = String::from("r,ratio\n");
            for (r, q) in &rep.samples {
                csv.push_str(&format!("{r},{q}\n"));
            }
            Ok(Artifact { json: value(&rep), csv: Some(csv) })
        }
        Command::Truncate(a) => {
            let (op, n) = at_dim(op, a.point.n)?;
            let s = build_global_supersolution(&op, n, need_p(&a.point)?, a.point.gamma, a.point.cells.unwrap_or(512))?;
            let mut csv = String::from("r,u\n");
            let radii = s.inner.nodes.iter().copied().chain(log_grid(1.0f64, 100.0, 64).into_iter().skip(1));
            for r in radii {
                if let Some(u) = s.eval(r) {
                    csv.push_str(&format!("{r},{u}\n"));
                }
            }
            Ok(Artifact { json: value(&s), csv: Some(csv) })
        }
        Command::FixedPoint(f) => {
            let (op, n) = at_dim(op, f.basic.point.n)?;
            let p = need_p(&f.basic.point)?;
            let rep = if op.rot_invariant() {
                fixed_point(&op, n, p)?
            } else {
                fnel_core::liouville::fixed_point_angular(&op, p, f.points, None)?
            };
            Ok(Artifact { csv: profile_csv(&rep.profile.psi), json: value(&rep) })
        }
        Command::Hypothesis(h) => {
            let (op, n) = at_dim(op, h.basic.point.n)?;
            let (p, gamma) = (need_p(&h.basic.point)?, h.basic.point.gamma);
            let (q, g, c) = (h.s_power.unwrap_or(p), h.x_power.unwrap_or(gamma), h.coef);
            let f = if q == p && g == gamma {
                NonlinearitySpec::power(c, gamma, p, h.epsilon0, h.r0)?
            } else {
                NonlinearitySpec::sampled(Arc::new(move |r: f64, s: f64| c * r.powf(-g) * s.powf(q)), h.epsilon0, h.r0)?
            };
            let rep = hypothesis_check(&f, p, gamma, &SamplingPlan::default())?;
            let verdict = sampled_verdict(&rep, &classify(&op, n, p, gamma)?);
            art(json!({ "report": value(&rep), "verdict": value(&verdict) }))
        }
        Command::Sweep(_) => unreachable!("sweeps are dispatched separately"),
    }
}

fn shared(cmd: &Command) -> &Shared {
    match cmd {
        Command::AlphaStar(a)
        | Command::CriticalExponent(a)
        | Command::Classify(a)
        | Command::Constant(a)
        | Command::Fundamental(a)
        | Command::Bend(a)
        | Command::Truncate(a) => &a.shared,
        Command::Solve(s) | Command::Eigen(s) => &s.basic.shared,
        Command::Hadamard(h) => &h.basic.shared,
        Command::Certificate(c) => &c.basic.shared,
        Command::FixedPoint(f) => &f.basic.shared,
        Command::Hypothesis(h) => &h.basic.shared,
        Command::Sweep(s) => &s.shared,
    }
}

fn params(cmd: &Command) -> Value {
    match cmd {
        Command::AlphaStar(a)
        | Command::CriticalExponent(a)
        | Command::Classify(a)
        | Command::Constant(a)
        | Command::Fundamental(a)
        | Command::Bend(a)
        | Command::Truncate(a) => value(a),
        Command::Solve(s) | Command::Eigen(s) => value(s),
        Command::Hadamard(h) => value(h),
        Command::Certificate(c) => value(c),
        Command::FixedPoint(f) => value(f),
        Command::Hypothesis(h) => value(h),
        Command::Sweep(s) => value(s),
    }
}

fn command_name(cmd: &Command) -> String {
    let v = format!("{cmd:?}");
    let head: String = v.chars().take_while(|c| c.is_alphanumeric()).collect();
    let mut s = String::new();
    for (i, ch) in head.chars().enumerate() {
        if ch.is_uppercase() && i > 0 {
            s.push('-');
        }
        s.push(ch.to_ascii_lowercase());
    }
    s
}

/// Worker count: `--jobs`, then `FNEL_JOBS`, then the available parallelism.
pub fn resolve_jobs(flag: Option<usize>) -> usize {
    flag.filter(|&j| j > 0)
        .or_else(|| std::env::var("FNEL_JOBS").ok().and_then(|s| s.trim().parse().ok()).filter(|&j| j > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub(crate) fn ellipticity_summary(op: &EllipticOperator64, seed: u64) -> Result<Value, Failure> {
    let r = verify_ellipticity(op, ELLIPTICITY_SAMPLES, seed)?;
    if !r.passed() {
        return Err(Failure::Spec(SpecError {
            field: "families".into(),
            message: format!("{} of {} sampled ellipticity checks failed", r.violation_count, r.samples),
        }));
    }
    Ok(json!({ "samples": r.samples, "seed": r.seed, "violations": r.violation_count }))
}

fn report_failure(f: Failure, echo: Option<&Echo>, out: Option<&Path>) -> i32 {
    match f {
        Failure::Usage(m) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Failure::Spec(e) => {
            eprintln!("error: {e}");
            EXIT_SPEC
        }
        Failure::Numerical { error, detail } => {
            eprintln!("error: {error}");
            if let Some(echo) = echo {
                let body = echo.json("failed", "error", json!({ "message": error, "detail": detail }));
                if let Err(e) = emit(out, &body) {
                    eprintln!("error: cannot write report: {e}");
                }
            }
            EXIT_NUMERICAL
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let sh = shared(&cli.command).clone();
    let out = sh.out.as_deref();
    if let Command::Sweep(args) = &cli.command {
        return run_sweep(args, params(&cli.command));
    }
    let loaded = match load_operator(sh.op.as_deref()) {
        Ok(l) => l,
        Err(f) => return report_failure(f, None, out),
    };
    let digest = loaded.spec.digest();
    let echo = Echo {
        command: command_name(&cli.command),
        operator: Some(loaded.spec.clone()),
        digest: Some(digest.clone()),
        params: params(&cli.command),
    };
    let ellipticity = match ellipticity_summary(&loaded.op, sh.seed) {
        Ok(v) => v,
        Err(f) => return report_failure(f, Some(&echo), out),
    };
    let artifact = match execute(&cli.command, &loaded, &digest) {
        Ok(a) => a,
        Err(f) => return report_failure(f, Some(&echo), out),
    };
    let text = match sh.format {
        Format::Json => {
            let mut body = artifact.json;
            if let Value::Object(m) = &mut body {
                m.insert("ellipticity".into(), ellipticity);
            } else {
                body = json!({ "value": body, "ellipticity": ellipticity });
            }
            echo.json("ok", "result", body)
        }
        Format::Csv => match artifact.csv {
            Some(csv) => format!("{}{csv}", echo.csv_preamble()),
            None => return report_failure(Failure::Usage(format!("{} has no CSV output", echo.command)), None, out),
        },
    };
    match emit(out, &text) {
        Ok(()) => EXIT_OK,
        Err(e) => report_failure(Failure::Usage(format!("cannot write output: {e}")), None, out),
    }
}

impl ValueEnum for crate::sweep::SweepCommand {
    fn value_variants<'a>() -> &'a [Self] {
        crate::sweep::SweepCommand::ALL
    }
    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}
