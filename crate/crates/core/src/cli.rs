//! Batch command-line interface.
//!
//! Exit codes: 0 success (or `certified-at-scale`), 1 configuration error,
//! 2 non-convergence or numerical breakdown, 3 `inconclusive`, 4 `violated`.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::approx::{sigma_n_with, weight_curve, weight_fn, WeightMethod};
use crate::coefficients::CoefficientSequence;
use crate::contfrac::resolvent_limit;
use crate::criteria::{self, CriterionReport, IndexWindow};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::io::{csv_columns, csv_rows, emit, emit_csv, json_bytes, metadata};
use crate::oracle::{dense_resolvent, kolmogorov_distance, truncation_measure};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "JACOBI_THREADS";

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "jacobi-spectral",
    version,
    about = "Spectral data and finite-window diagnostics for Jacobi matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Resolvent matrix element R(lambda) by continued fraction
    Resolvent(ResolventArgs),
    /// Approximant weight f_n on a grid, optionally with its distribution function
    Weights(WeightsArgs),
    /// Finite-window spectral criteria; prints a JSON report
    #[command(subcommand)]
    Criteria(CriteriaCommand),
    /// Compare the approximant distribution with a dense truncation
    OracleCompare(OracleArgs),
    /// Hermite weights against the Gaussian density exp(-x^2)/sqrt(pi)
    HermiteDemo(DemoArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ResolventArgs {
    /// Coefficient family, e.g. `hermite`, `constant:0,0.5` or `table:coeffs.jcoef.csv`
    #[arg(long)]
    pub family: String,
    /// Spectral parameter as `re`, `re+imi` or `re-imi`
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub n_max: usize,
    /// Also solve the dense truncation of this size and report the difference
    #[arg(long)]
    pub oracle_n: Option<usize>,
    /// JSON output path (stdout if omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct WeightsArgs {
    #[arg(long)]
    pub family: String,
    /// Approximant index
    #[arg(long)]
    pub n: usize,
    /// Evaluation grid `lo:hi:count`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Grid,
    #[arg(long, default_value_t = WeightMethod::TuranDet)]
    pub method: WeightMethod,
    /// Weight curve CSV path (stdout if omitted); a `.json` sidecar is written next to it
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Distribution function CSV path
    #[arg(long)]
    pub sigma_output: Option<PathBuf>,
    /// Base point of the distribution function (default: grid start)
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct CriteriaCommon {
    #[arg(long)]
    pub family: String,
    /// JSON report path (stdout if omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GridCriterionArgs {
    #[command(flatten)]
    pub common: CriteriaCommon,
    /// Target interval `lo:hi`
    #[arg(long, allow_hyphen_values = true, value_parser = parse_interval)]
    pub interval: (f64, f64),
    /// Grid `lo:hi:count` (default: 101 points across the interval)
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// Index window `start:end`
    #[arg(long, default_value = "1:500")]
    pub window: IndexWindow,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriteriaCommand {
    /// limsup b_{n-1}^2/|a_{n-1} a_n| < 1/4 with |a_n| unbounded
    Discreteness {
        #[command(flatten)]
        common: CriteriaCommon,
        #[arg(long, default_value = "1:500")]
        window: IndexWindow,
        /// Required distance of the tail supremum below 1/4
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
    },
    /// sup over n and the grid of f_n
    BoundedWeight(GridCriterionArgs),
    /// inf over n and the grid of b_n g_n via its sum form
    MainEstimate(GridCriterionArgs),
    /// inf of b_n (P_{n+1}^2 + P_n^2) where |x - a_n| <= K b_n
    Transfer {
        #[command(flatten)]
        common: CriteriaCommon,
        #[arg(long)]
        k_bound: f64,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
        #[arg(long, default_value = "1:500")]
        window: IndexWindow,
    },
    /// Growth conditions on the coefficients for absolutely continuous spectrum
    #[command(name = "thm39", visible_alias = "growth-conditions")]
    GrowthConditions {
        #[command(flatten)]
        common: CriteriaCommon,
        #[arg(long, default_value_t = 5000)]
        n_max: usize,
    },
    /// Moduli of continuity of f_n across the window
    Equicontinuity {
        #[command(flatten)]
        common: CriteriaCommon,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_interval)]
        interval: (f64, f64),
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[arg(long, default_value = "1:500")]
        window: IndexWindow,
        /// Comma-separated distances
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        deltas: Vec<f64>,
    },
    /// |g_n'(x)| / g_n(x) by central differences
    GnBound(GridCriterionArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub family: String,
    /// Approximant index for the distribution function
    #[arg(long)]
    pub n: usize,
    /// Size of the dense truncation
    #[arg(long)]
    pub truncation: usize,
    /// Comparison grid `lo:hi:count`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Grid,
    /// Also compare resolvents at this point
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Truncation measure CSV path (`lambda,weight`)
    #[arg(long)]
    pub measure_output: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DemoArgs {
    /// Comma-separated approximant indices
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub ns: Vec<usize>,
    /// Comma-separated evaluation points
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-1,-0.5,0,0.5,1"
    )]
    pub xs: Vec<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parse `re`, `re+imi` or `re-imi`. Forms without an explicit real part or
/// imaginary coefficient (`2i`, `1+i`) are rejected as ambiguous.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidArgument(format!("cannot parse `{s}` as re, re+imi or re-imi"));
    let t = s.trim();
    let z = match t.strip_suffix('i') {
        None => Complex64::new(t.parse().map_err(|_| bad())?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
                .ok_or_else(bad)?;
            let re: f64 = body[..split].parse().map_err(|_| bad())?;
            let im: f64 = body[split..].parse().map_err(|_| bad())?;
            Complex64::new(re, im)
        }
    };
    if !z.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

/// Parse `lo:hi` with `lo < hi`.
pub fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let bad = || format!("interval `{s}` is not of the form lo:hi with lo < hi");
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = a.trim().parse().map_err(|_| bad())?;
    let hi: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Exit code for a failed run.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFiniteIntermediate { .. }
        | Error::ApproximantPole { .. }
        | Error::ZeroDenominator { .. }
        | Error::NumericalBreakdown { .. }
        | Error::QuadratureFailure { .. }
        | Error::EigenSolverFailure { .. }
        | Error::SingularSystem { .. }
        | Error::StepUnderflow { .. } => 2,
        _ => 1,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::InvalidArgument(format!("{THREADS_ENV}=`{raw}` is not a positive integer"))
    })?;
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Run the CLI on `argv` (including the program name) and return the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match configure_threads().and_then(|_| execute(&cli, &argv)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, argv: &[String]) -> Result<i32> {
    match &cli.command {
        Command::Resolvent(a) => cmd_resolvent(a, argv),
        Command::Weights(a) => cmd_weights(a, argv),
        Command::Criteria(c) => cmd_criteria(c, argv),
        Command::OracleCompare(a) => cmd_oracle_compare(a, argv),
        Command::HermiteDemo(a) => cmd_hermite_demo(a, argv),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn cmd_resolvent(args: &ResolventArgs, argv: &[String]) -> Result<i32> {
    let seq = CoefficientSequence::parse_spec(&args.family)?;
    let lambda = parse_complex(&args.lambda)?;
    let (value, cert) = resolvent_limit(&seq, lambda, args.tol, args.n_max)?;
    let mut out = json!({
        "family": seq.label(),
        "lambda": complex_json(lambda),
        "value": complex_json(value),
        "certificate": cert,
    });
    if let Some(size) = args.oracle_n {
        let dense = dense_resolvent(&seq, size, lambda)?;
        out["oracle"] = json!({
            "truncation": size,
            "value": complex_json(dense),
            "abs_delta": (dense - value).norm(),
        });
    }
    out["metadata"] = metadata("resolvent", argv, args)?;
    emit(args.output.as_deref(), &json_bytes(&out)?)?;
    if !cert.converged {
        eprintln!(
            "error: continued fraction did not stabilize within {} steps",
            cert.iterations
        );
        return Ok(2);
    }
    Ok(0)
}

fn cmd_weights(args: &WeightsArgs, argv: &[String]) -> Result<i32> {
    let seq = CoefficientSequence::parse_spec(&args.family)?;
    let xs = args.grid.points();
    let base = args.base.unwrap_or(args.grid.lo);
    if !base.is_finite() {
        return Err(Error::InvalidArgument("base point must be finite".into()));
    }
    let curve = weight_curve(&seq, args.n, &xs, args.method)?;
    let sigma = match &args.sigma_output {
        Some(_) => Some(sigma_n_with(&seq, args.n, base, &xs, args.method)?),
        None => None,
    };
    let meta = metadata("weights", argv, args)?;
    let sidecar = json!({
        "metadata": meta,
        "quantity": "weight",
        "n": curve.n,
        "band": curve.band,
        "method": curve.method,
    });
    emit_csv(
        args.output.as_deref(),
        &csv_columns(["x", "value"], &curve.xs, &curve.fs)?,
        &sidecar,
    )?;
    if let (Some(path), Some(s)) = (&args.sigma_output, sigma) {
        let sidecar = json!({
            "metadata": meta,
            "quantity": "distribution",
            "n": s.n,
            "band": s.band,
            "method": args.method,
            "base_point": s.base_point,
            "base_value": s.base_value,
            "quadrature_error": s.quadrature_error,
            "evaluations": s.evaluations,
            "point_masses": s.point_masses,
        });
        emit_csv(
            Some(path),
            &csv_columns(["x", "value"], &s.lambdas, &s.sigma)?,
            &sidecar,
        )?;
    }
    Ok(0)
}

fn grid_points(interval: (f64, f64), grid: Option<Grid>) -> Result<Vec<f64>> {
    Ok(match grid {
        Some(g) => g.points(),
        None => Grid::new(interval.0, interval.1, 101)?.points(),
    })
}

fn cmd_criteria(command: &CriteriaCommand, argv: &[String]) -> Result<i32> {
    let (common, report): (&CriteriaCommon, CriterionReport) = match command {
        CriteriaCommand::Discreteness {
            common,
            window,
            margin,
        } => {
            let seq = CoefficientSequence::parse_spec(&common.family)?;
            (
                common,
                criteria::discreteness_check(&seq, *window, *margin)?,
            )
        }
        CriteriaCommand::BoundedWeight(a) => {
            let seq = CoefficientSequence::parse_spec(&a.common.family)?;
            let xs = grid_points(a.interval, a.grid)?;
            (
                &a.common,
                criteria::bounded_weight_criterion(&seq, a.interval, &xs, a.window)?,
            )
        }
        CriteriaCommand::MainEstimate(a) => {
            let seq = CoefficientSequence::parse_spec(&a.common.family)?;
            let xs = grid_points(a.interval, a.grid)?;
            (
                &a.common,
                criteria::main_estimate_infimum(&seq, a.interval, &xs, a.window)?,
            )
        }
        CriteriaCommand::Transfer {
            common,
            k_bound,
            grid,
            window,
        } => {
            let seq = CoefficientSequence::parse_spec(&common.family)?;
            (
                common,
                criteria::transfer_lower_bound(&seq, *k_bound, &grid.points(), *window)?,
            )
        }
        CriteriaCommand::GrowthConditions { common, n_max } => {
            let seq = CoefficientSequence::parse_spec(&common.family)?;
            (common, criteria::asymptotic_conditions_check(&seq, *n_max)?)
        }
        CriteriaCommand::Equicontinuity {
            common,
            interval,
            points,
            window,
            deltas,
        } => {
            let seq = CoefficientSequence::parse_spec(&common.family)?;
            (
                common,
                criteria::equicontinuity_diagnostic(&seq, *interval, *points, *window, deltas)?,
            )
        }
        CriteriaCommand::GnBound(a) => {
            let seq = CoefficientSequence::parse_spec(&a.common.family)?;
            let xs = grid_points(a.interval, a.grid)?;
            (
                &a.common,
                criteria::gn_derivative_bound(&seq, a.interval, &xs, a.window)?,
            )
        }
    };
    let mut out = serde_json::to_value(&report)?;
    out["metadata"] = metadata("criteria", argv, command)?;
    emit(common.output.as_deref(), &json_bytes(&out)?)?;
    Ok(report.verdict.exit_code())
}

fn cmd_oracle_compare(args: &OracleArgs, argv: &[String]) -> Result<i32> {
    let seq = CoefficientSequence::parse_spec(&args.family)?;
    let lambda = args.lambda.as_deref().map(parse_complex).transpose()?;
    let xs = args.grid.points();
    let measure = truncation_measure(&seq, args.truncation)?;
    let sigma = sigma_n_with(&seq, args.n, args.grid.lo, &xs, WeightMethod::TuranDet)?;
    let distance = kolmogorov_distance(&measure, &xs, &sigma.sigma)?;
    let meta = metadata("oracle-compare", argv, args)?;
    let mut out = json!({
        "family": seq.label(),
        "n": args.n,
        "truncation": args.truncation,
        "grid": args.grid,
        "kolmogorov_distance": distance,
        "truncation_mass": measure.total_mass(),
        "quadrature_error": sigma.quadrature_error,
    });
    if let Some(lambda) = lambda {
        let dense = dense_resolvent(&seq, args.truncation, lambda)?;
        let (cf, cert) = resolvent_limit(&seq, lambda, 1e-12, 1_000_000)?;
        out["resolvent"] = json!({
            "lambda": complex_json(lambda),
            "truncation_value": complex_json(dense),
            "continued_fraction_value": complex_json(cf),
            "certificate": cert,
            "abs_delta": (dense - cf).norm(),
        });
    }
    out["metadata"] = meta.clone();
    if let Some(path) = &args.measure_output {
        let sidecar =
            json!({ "metadata": meta, "quantity": "truncation-measure", "size": measure.size() });
        emit_csv(
            Some(path),
            &csv_columns(["lambda", "weight"], &measure.nodes, &measure.weights)?,
            &sidecar,
        )?;
    }
    emit(args.output.as_deref(), &json_bytes(&out)?)?;
    Ok(0)
}

/// One line of the Hermite demo table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DemoRow {
    pub n: usize,
    pub x: f64,
    pub weight: f64,
    /// `exp(-x^2)/sqrt(pi)`
    pub target: f64,
    pub abs_error: f64,
}

/// Hermite weights `f_n(x)` against the Gaussian limit for every `(n, x)` pair.
pub fn hermite_demo_rows(ns: &[usize], xs: &[f64]) -> Result<Vec<DemoRow>> {
    let seq = CoefficientSequence::hermite();
    let mut rows = Vec::with_capacity(ns.len() * xs.len());
    for &n in ns {
        for &x in xs {
            let f = weight_fn(&seq, n, x, WeightMethod::TuranDet)?;
            let target = (-x * x).exp() / std::f64::consts::PI.sqrt();
            rows.push(DemoRow {
                n,
                x,
                weight: f,
                target,
                abs_error: (f - target).abs(),
            });
        }
    }
    Ok(rows)
}

fn cmd_hermite_demo(args: &DemoArgs, argv: &[String]) -> Result<i32> {
    if args.ns.contains(&0) {
        return Err(Error::InvalidArgument(
            "approximant indices must be at least 1".into(),
        ));
    }
    let rows = hermite_demo_rows(&args.ns, &args.xs)?;
    let text: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.x.to_string(),
                r.weight.to_string(),
                r.target.to_string(),
                r.abs_error.to_string(),
            ]
        })
        .collect();
    let sidecar = json!({ "metadata": metadata("hermite-demo", argv, args)?, "family": "hermite" });
    emit_csv(
        args.output.as_deref(),
        &csv_rows(&["n", "x", "f_n", "target", "abs_error"], &text)?,
        &sidecar,
    )?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(
            parse_complex("-1.5-2e-3i").unwrap(),
            Complex64::new(-1.5, -2e-3)
        );
        assert_eq!(
            parse_complex("1e-3+2E+1i").unwrap(),
            Complex64::new(1e-3, 20.0)
        );
        assert_eq!(parse_complex(" 0.5 ").unwrap(), Complex64::new(0.5, 0.0));
        for bad in ["", "i", "2i", "1+i", "1+2", "1+2j", "nan+1i", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn intervals() {
        assert_eq!(parse_interval("-2:2").unwrap(), (-2.0, 2.0));
        assert!(parse_interval("2:-2").is_err());
        assert!(parse_interval("1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(error_exit_code(&Error::RealSpectralParameter), 1);
        assert_eq!(error_exit_code(&Error::StepUnderflow { x: 0.0 }), 2);
    }
}
