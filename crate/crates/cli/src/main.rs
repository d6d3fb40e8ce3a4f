//! Command-line front end: evaluate functions, dump coefficient tables, run
//! the identity-verification suites, and emit convergence-comparison CSV.
//!
//! Exit codes are a stable contract: 0 success, 2 usage error, 3 domain
//! error (the library's error name is printed), 4 verification failure.
//!
//! Defaults (`tol`, `max_terms`, formal `order`) live in one [`Defaults`]
//! struct and can be overridden per-invocation by flags or globally through
//! the `THETAKIT_TOL`, `THETAKIT_MAX_TERMS`, and `THETAKIT_ORDER`
//! environment variables.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;
use thetakit::elliptic::ZnRoute;
use thetakit::eval::{self, EvalSpec, Evaluation, RrRoute, StripStatus, ThetaRep, WpRep};
use thetakit::theta::{CoeffValues, EtaRoute, ThetaKind};
use thetakit::verify::{self, Suite};
use thetakit::{EvalConfig, EvalError, HalfPlanePoint, StripPolicy};

const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "thetakit",
    about = "Jacobi theta functions, q-series, and the Rogers-Ramanujan fraction, \
             with cross-checked representations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a function at a point by a chosen representation
    Eval(EvalArgs),
    /// Print a coefficient table (numeric, or exact q-series with --formal)
    Coeffs(CoeffsArgs),
    /// Run an identity-verification suite and emit JSON-lines records
    Verify(VerifyArgs),
    /// Compare representations on a grid and emit CSV
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StripFlag {
    Enforce,
    Warn,
    Ignore,
}

impl From<StripFlag> for StripPolicy {
    fn from(f: StripFlag) -> Self {
        match f {
            StripFlag::Enforce => StripPolicy::Enforce,
            StripFlag::Warn => StripPolicy::Warn,
            StripFlag::Ignore => StripPolicy::Ignore,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Function: theta1..theta4, wp, zn, eta, rr
    function: String,
    /// Representation for theta functions: fourier, product, expansion
    #[arg(long)]
    rep: Option<String>,
    /// Route for wp (expansion|oracle|addition), zn (closed|fourier),
    /// eta (product|expansion), rr (product|cf|exp-sin|exp-cos|theta4|liu)
    #[arg(long)]
    route: Option<String>,
    /// Argument v for theta functions (complex, e.g. 0.1, 0.2-0.5i)
    #[arg(long)]
    v: Option<String>,
    /// Argument z for wp and zn
    #[arg(long)]
    z: Option<String>,
    /// Modular parameter tau (e.g. 2i, 0.3+1.2i); Im tau > 0
    #[arg(long)]
    tau: String,
    /// Continued-fraction depth for rr --route cf
    #[arg(long, default_value_t = 80)]
    depth: usize,
    /// Strip policy for expansion-type representations
    #[arg(long, value_enum)]
    strip: Option<StripFlag>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Series tail tolerance (default 1e-14 or THETAKIT_TOL)
    #[arg(long)]
    tol: Option<f64>,
    /// Term cap (default 2000 or THETAKIT_MAX_TERMS)
    #[arg(long)]
    max_terms: Option<usize>,
}

#[derive(Args)]
struct CoeffsArgs {
    /// Coefficient family: c (log-theta expansion) or a (wp expansion)
    family: String,
    /// Modular parameter tau (numeric mode)
    #[arg(long)]
    tau: Option<String>,
    /// Largest p in the table
    #[arg(long, default_value_t = 8)]
    max_p: usize,
    /// Numeric method for family c: closed, binomial, recursive
    #[arg(long, default_value = "closed")]
    method: String,
    /// Emit exact q-series instead of numeric values
    #[arg(long)]
    formal: bool,
    /// Truncation order in formal mode (default 40 or THETAKIT_ORDER)
    #[arg(long)]
    order: Option<usize>,
    /// Single p to print in formal mode (default: 1..=max_p)
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: all, theta, modular, elliptic, rr, formal
    suite: String,
    /// Truncation order for the formal suite (default 40 or THETAKIT_ORDER)
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated tau grid override, e.g. "1.5i,2i,0.3+1.4i"
    #[arg(long)]
    tau_grid: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    /// Theta function to profile: theta1..theta4
    #[arg(long, default_value = "theta4")]
    function: String,
    /// Representations to compare (comma-separated)
    #[arg(long, default_value = "fourier,expansion,product")]
    reps: String,
    /// Modular parameter tau
    #[arg(long, default_value = "2i")]
    tau: String,
    /// Grid resolution along Re v
    #[arg(long, default_value_t = 5)]
    nx: usize,
    /// Grid resolution along Im v
    #[arg(long, default_value_t = 5)]
    ny: usize,
    /// Largest Re v on the grid
    #[arg(long, default_value_t = 0.45)]
    x_max: f64,
    /// Largest |Im v| on the grid
    #[arg(long, default_value_t = 0.2)]
    y_max: f64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
}

/// All knobs with their environment-overridable defaults.
struct Defaults {
    tol: f64,
    max_terms: usize,
    order: usize,
}

impl Defaults {
    fn load() -> Self {
        fn env_parse<T: std::str::FromStr>(name: &str, fallback: T) -> T {
            std::env::var(name)
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(fallback)
        }
        Defaults {
            tol: env_parse("THETAKIT_TOL", 1e-14),
            max_terms: env_parse("THETAKIT_MAX_TERMS", 2000),
            order: env_parse("THETAKIT_ORDER", 40),
        }
    }

    fn config(
        &self,
        tol: Option<f64>,
        max_terms: Option<usize>,
        strip: StripPolicy,
    ) -> Result<EvalConfig, EvalError> {
        EvalConfig::new(tol.unwrap_or(self.tol), max_terms.unwrap_or(self.max_terms), strip)
    }
}

enum CliError {
    Usage(String),
    Domain(EvalError),
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Domain(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Writes one line to stdout; returns false when the pipe is gone (e.g. the
/// output is fed to `head`), which ends the command quietly.
fn emit(out: &mut impl Write, line: std::fmt::Arguments) -> bool {
    writeln!(out, "{line}").is_ok()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let defaults = Defaults::load();
    let outcome = match cli.command {
        Cmd::Eval(args) => cmd_eval(&args, &defaults),
        Cmd::Coeffs(args) => cmd_coeffs(&args, &defaults),
        Cmd::Verify(args) => cmd_verify(&args, &defaults),
        Cmd::Bench(args) => cmd_bench(&args, &defaults),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("domain error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}

/// Accepts `a+bi`, `bi`, `i`, `-i`, or a bare real `a`.
fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(idx, ch)| {
                (ch == '+' || ch == '-') && !matches!(body.as_bytes()[idx - 1], b'e' | b'E')
            })
            .map(|(idx, _)| idx)
            .last();
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let re: f64 = if re_str.is_empty() {
            0.0
        } else {
            re_str
                .parse()
                .map_err(|_| usage(format!("cannot parse real part of '{s}'")))?
        };
        let im: f64 = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => im_str
                .parse()
                .map_err(|_| usage(format!("cannot parse imaginary part of '{s}'")))?,
        };
        Ok(Complex64::new(re, im))
    } else {
        s.parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| usage(format!("cannot parse complex number '{s}'")))
    }
}

fn parse_tau(s: &str) -> Result<HalfPlanePoint, CliError> {
    s.parse::<HalfPlanePoint>()
        .map_err(|e| usage(format!("bad tau '{s}': {e}")))
}

fn theta_kind(name: &str) -> Option<ThetaKind> {
    Some(match name {
        "theta1" => ThetaKind::One,
        "theta2" => ThetaKind::Two,
        "theta3" => ThetaKind::Three,
        "theta4" => ThetaKind::Four,
        _ => return None,
    })
}

fn cmd_eval(args: &EvalArgs, defaults: &Defaults) -> Result<ExitCode, CliError> {
    let tau = parse_tau(&args.tau)?;
    let v = args.v.as_deref().map(parse_complex).transpose()?;
    let z = args.z.as_deref().map(parse_complex).transpose()?;
    let route = args.route.as_deref();

    let (spec, default_strip) = if let Some(kind) = theta_kind(&args.function) {
        let rep = match args.rep.as_deref().unwrap_or("fourier") {
            "fourier" => ThetaRep::Fourier,
            "product" => ThetaRep::Product,
            "expansion" => ThetaRep::Expansion,
            other => return Err(usage(format!("unknown theta representation '{other}'"))),
        };
        let v = v.ok_or_else(|| usage("theta functions need --v"))?;
        (EvalSpec::Theta { kind, rep, v }, StripPolicy::Enforce)
    } else {
        match args.function.as_str() {
            "wp" => {
                let rep = match args.rep.as_deref().or(route).unwrap_or("expansion") {
                    "expansion" => WpRep::Expansion,
                    "oracle" => WpRep::Oracle,
                    "addition" => WpRep::Addition,
                    other => return Err(usage(format!("unknown wp representation '{other}'"))),
                };
                let z = z.ok_or_else(|| usage("wp needs --z"))?;
                (EvalSpec::Wp { rep, z }, StripPolicy::Enforce)
            }
            "zn" => {
                let route = match route.unwrap_or("closed") {
                    "closed" => ZnRoute::Closed,
                    "fourier" => ZnRoute::Fourier,
                    other => return Err(usage(format!("unknown zn route '{other}'"))),
                };
                let z = z.ok_or_else(|| usage("zn needs --z"))?;
                // the stated strip is sufficient-only; let exploration warn
                (EvalSpec::Zn { route, z }, StripPolicy::Warn)
            }
            "eta" => {
                let route = match route.unwrap_or("product") {
                    "product" => EtaRoute::Product,
                    "expansion" => EtaRoute::Expansion,
                    other => return Err(usage(format!("unknown eta route '{other}'"))),
                };
                (EvalSpec::Eta { route }, StripPolicy::Enforce)
            }
            "rr" => {
                let route = match route.unwrap_or("product") {
                    "product" => RrRoute::Product,
                    "cf" => RrRoute::Cf { depth: args.depth },
                    "exp-sin" => RrRoute::ExpSin,
                    "exp-cos" => RrRoute::ExpCos,
                    "theta4" => RrRoute::Theta4,
                    "liu" => RrRoute::Liu,
                    other => return Err(usage(format!("unknown rr route '{other}'"))),
                };
                (EvalSpec::Rr { route }, StripPolicy::Enforce)
            }
            other => return Err(usage(format!("unknown function '{other}'"))),
        }
    };

    let strip = args.strip.map(StripPolicy::from).unwrap_or(default_strip);
    let cfg = defaults.config(args.tol, args.max_terms, strip)?;
    let evaluation = eval::evaluate(&spec, tau, &cfg)?;
    print_evaluation(&evaluation, args.format);
    Ok(ExitCode::SUCCESS)
}

fn print_evaluation(e: &Evaluation, format: OutputFormat) {
    match format {
        OutputFormat::Json => println!("{}", serde_json::to_string(e).expect("serializable")),
        OutputFormat::Text => {
            println!("value: {:+.15e} {:+.15e}i", e.value[0], e.value[1]);
            println!("representation: {}", e.representation);
            match e.terms {
                Some(t) => println!("terms: {t}"),
                None => println!("terms: n/a"),
            }
            match e.strip {
                StripStatus::Inside { ratio } => println!("strip: inside (ratio {ratio:.4})"),
                StripStatus::Outside { ratio } => println!("strip: outside (ratio {ratio:.4})"),
                StripStatus::Unrestricted => println!("strip: unrestricted"),
            }
        }
    }
}

fn cmd_coeffs(args: &CoeffsArgs, defaults: &Defaults) -> Result<ExitCode, CliError> {
    if args.max_p < 1 {
        return Err(usage("--max-p must be at least 1"));
    }
    match (args.family.as_str(), args.formal) {
        ("c", true) => {
            let order = args.order.unwrap_or(defaults.order);
            let ps: Vec<usize> = match args.p {
                Some(p) => vec![p],
                None => (1..=args.max_p).collect(),
            };
            for p in ps {
                if p < 1 {
                    return Err(usage("--p must be at least 1"));
                }
                let series = thetakit::theta::c2p_closed_formal(p, order);
                match args.format {
                    OutputFormat::Text => println!("{series}"),
                    OutputFormat::Json => println!(
                        "{}",
                        serde_json::json!({ "p": p, "order": order, "coeffs": series })
                    ),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        ("a", true) => Err(usage(
            "formal mode covers family c only: a_{2p} carries a pi^2/4 factor and is not a rational q-series",
        )),
        (family @ ("c" | "a"), false) => {
            let tau = parse_tau(
                args.tau
                    .as_deref()
                    .ok_or_else(|| usage("numeric mode needs --tau"))?,
            )?;
            let cfg = defaults.config(args.tol, args.max_terms, StripPolicy::Enforce)?;
            let values: Vec<Complex64> = if family == "c" {
                match args.method.as_str() {
                    "closed" => (1..=args.max_p)
                        .map(|p| thetakit::theta::c2p_closed(p, tau, &cfg))
                        .collect::<Result<_, _>>()?,
                    "binomial" => (1..=args.max_p)
                        .map(|p| thetakit::theta::c2p_binomial(p, tau, &cfg))
                        .collect::<Result<_, _>>()?,
                    "recursive" => {
                        let table = thetakit::theta::c2p_recursive(tau, args.max_p.max(2), &cfg)?;
                        match &table.values {
                            CoeffValues::Numeric { per_p, .. } => {
                                per_p.iter().take(args.max_p).copied().collect()
                            }
                            CoeffValues::Formal { .. } => unreachable!("recursive table is numeric"),
                        }
                    }
                    other => return Err(usage(format!("unknown method '{other}'"))),
                }
            } else {
                (1..=args.max_p)
                    .map(|p| thetakit::elliptic::a2p_closed(p, tau, &cfg))
                    .collect::<Result<_, _>>()?
            };
            match args.format {
                OutputFormat::Text => {
                    println!("# family {family}, tau = {tau}, method = {}", args.method);
                    for (i, value) in values.iter().enumerate() {
                        println!("{:2}  {:+.15e}  {:+.15e}", i + 1, value.re, value.im);
                    }
                }
                OutputFormat::Json => {
                    let rows: Vec<_> = values
                        .iter()
                        .enumerate()
                        .map(|(i, value)| {
                            serde_json::json!({ "p": i + 1, "value": [value.re, value.im] })
                        })
                        .collect();
                    println!("{}", serde_json::Value::Array(rows));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        (other, _) => Err(usage(format!("unknown family '{other}' (use c or a)"))),
    }
}

fn cmd_verify(args: &VerifyArgs, defaults: &Defaults) -> Result<ExitCode, CliError> {
    let suite = Suite::parse(&args.suite)
        .ok_or_else(|| usage(format!("unknown suite '{}'", args.suite)))?;
    let grid = match args.tau_grid.as_deref() {
        Some(spec) => {
            let parsed: Result<Vec<_>, _> = spec.split(',').map(|s| parse_tau(s.trim())).collect();
            let parsed = parsed?;
            if parsed.is_empty() {
                return Err(usage("empty tau grid"));
            }
            parsed
        }
        None => verify::default_tau_grid(),
    };
    let cfg = defaults.config(args.tol, args.max_terms, StripPolicy::Enforce)?;
    let order = args.order.unwrap_or(defaults.order);

    let tasks = verify::tasks(suite, cfg, &grid, order);
    // fan out over the worker pool; the sort makes output order deterministic
    let mut records: Vec<_> = tasks.par_iter().flat_map_iter(|task| task.run()).collect();
    records.sort_by(|a, b| (&a.identity, &a.params).cmp(&(&b.identity, &b.params)));

    let mut failures = 0usize;
    let mut reported = 0usize;
    let mut out = std::io::stdout().lock();
    for record in &records {
        if !emit(
            &mut out,
            format_args!("{}", serde_json::to_string(record).expect("serializable")),
        ) {
            return Ok(ExitCode::SUCCESS);
        }
        match record.status {
            thetakit::report::CheckStatus::Fail => failures += 1,
            thetakit::report::CheckStatus::Reported => reported += 1,
            thetakit::report::CheckStatus::Pass => {}
        }
    }
    eprintln!(
        "{} checks: {} passed, {failures} failed, {reported} report-only",
        records.len(),
        records.len() - failures - reported
    );
    if failures > 0 {
        Ok(ExitCode::from(EXIT_VERIFY))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_bench(args: &BenchArgs, defaults: &Defaults) -> Result<ExitCode, CliError> {
    let kind = theta_kind(&args.function)
        .ok_or_else(|| usage(format!("bench profiles theta1..theta4, not '{}'", args.function)))?;
    let tau = parse_tau(&args.tau)?;
    if args.nx < 1 || args.ny < 1 {
        return Err(usage("grid must have at least one point per axis"));
    }
    let reps: Vec<ThetaRep> = args
        .reps
        .split(',')
        .map(|name| match name.trim() {
            "fourier" => Ok(ThetaRep::Fourier),
            "product" => Ok(ThetaRep::Product),
            "expansion" => Ok(ThetaRep::Expansion),
            other => Err(usage(format!("unknown representation '{other}'"))),
        })
        .collect::<Result<_, _>>()?;
    if reps.is_empty() {
        return Err(usage("no representations selected"));
    }
    // expansion points outside the strip would error; measure under Warn so
    // slow convergence shows up as a term count instead
    let cfg = defaults.config(args.tol, args.max_terms, StripPolicy::Warn)?;

    let mut out = std::io::stdout().lock();
    if !emit(
        &mut out,
        format_args!("v_re,v_im,tau,representation,terms_to_tol,wall_time_ns,error_vs_oracle"),
    ) {
        return Ok(ExitCode::SUCCESS);
    }
    for ix in 0..args.nx {
        for iy in 0..args.ny {
            let x = if args.nx == 1 {
                0.0
            } else {
                args.x_max * ix as f64 / (args.nx - 1) as f64
            };
            let y = if args.ny == 1 {
                0.0
            } else {
                -args.y_max + 2.0 * args.y_max * iy as f64 / (args.ny - 1) as f64
            };
            let v = Complex64::new(x, y);
            let oracle = thetakit::theta::theta_fourier(kind, v, tau, &cfg)?;
            for &rep in &reps {
                let spec = EvalSpec::Theta { kind, rep, v };
                let started = Instant::now();
                let result = eval::evaluate(&spec, tau, &cfg);
                let elapsed = started.elapsed().as_nanos();
                let wrote = match result {
                    Ok(e) => {
                        let err = (e.value_complex() - oracle).norm() / oracle.norm().max(1e-300);
                        emit(
                            &mut out,
                            format_args!(
                                "{x},{y},{tau},{},{},{elapsed},{err:e}",
                                e.representation,
                                e.terms.map_or_else(|| "n/a".into(), |t| t.to_string()),
                            ),
                        )
                    }
                    Err(err) => emit(
                        &mut out,
                        format_args!(
                            "{x},{y},{tau},theta{}/{rep:?},n/a,{elapsed},{err}",
                            kind.index()
                        ),
                    ),
                };
                if !wrote {
                    return Ok(ExitCode::SUCCESS);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
