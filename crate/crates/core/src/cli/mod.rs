//! Command-line front end: `eval`, `sweep`, `validate`, `surface`.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or input error.
//! File-writing commands write through a temporary file in the target
//! directory and rename it into place, then write `FILE.manifest.json`
//! next to it.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::error::{MeasureError, SolverError, StateError};
use crate::measure::{
    lambda_max_sq, lambda_value, sample_diagonal_surface, sample_shared_surface,
    sample_unit_orthant, sweep, Family, Regime,
};
use crate::solver::{alternating_ascent, OracleConfig};
use crate::state::WStateParams;

pub use output::{write_atomic, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Number of worst-case inputs listed by `validate`.
const WORST_LISTED: usize = 5;

#[derive(Debug, Parser)]
#[command(
    name = "gme",
    version,
    about = "Geometric measure of entanglement for W-type states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Λ²max, regime and closest product state for one tuple.
    Eval(EvalArgs),
    /// Evaluate a one-parameter family on a grid and write CSV.
    Sweep(SweepArgs),
    /// Compare the closed form against the numerical oracle on random tuples.
    Validate(ValidateArgs),
    /// Sample points on a separating surface and write CSV.
    Surface(SurfaceArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    /// Coefficients `a,b,c,d` of a|100⟩ + b|010⟩ + c|001⟩ + d|111⟩.
    #[arg(long, value_parser = parse_coeffs, allow_hyphen_values = true)]
    pub coeffs: Coeffs,
    /// Rescale to unit norm instead of rejecting unnormalized input.
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Equality constraints, e.g. "a=b=c" or "b=c,d=0".
    #[arg(long)]
    pub family: String,
    /// Coefficient swept over the range.
    #[arg(long)]
    pub param: String,
    /// `LO:HI`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Range,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Add a column with the numerical oracle value.
    #[arg(long)]
    pub with_oracle: bool,
    /// Oracle seed.
    #[arg(long, env = "GME_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, env = "GME_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Validate this tuple (renormalized) instead of random samples.
    #[arg(long, value_parser = parse_coeffs, allow_hyphen_values = true)]
    pub coeffs: Option<Coeffs>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    /// r1 r2 r3 = 0.
    R0,
    /// l² = 1/2 + abcd/l².
    Shared,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long, value_enum)]
    pub which: Surface,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, env = "GME_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coeffs(pub [f64; 4]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

fn parse_coeffs(s: &str) -> Result<Coeffs, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected 4 comma-separated numbers, got {}",
            parts.len()
        ));
    }
    let mut out = [0.0; 4];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| format!("not a number: {part:?}"))?;
    }
    Ok(Coeffs(out))
}

fn parse_range(s: &str) -> Result<Range, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: {t:?}"))
    };
    Ok(Range {
        lo: num(lo)?,
        hi: num(hi)?,
    })
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::State(_) | CliError::Measure(_) => "input",
            CliError::Solver(_) => "solver",
            CliError::Io(_) | CliError::Csv(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductReport {
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub w: [f64; 3],
    /// Per qubit, `[[re, im], [re, im]]` amplitudes of `|0⟩`, `|1⟩`.
    pub amplitudes: [[[f64; 2]; 2]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub coeffs: [f64; 4],
    pub lambda_max_sq: f64,
    pub geometric_measure: f64,
    pub regime: Regime,
    pub lagrange: Option<[f64; 2]>,
    pub closest_product: ProductReport,
    pub overlap: f64,
    pub overlap_residual: f64,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<EvalReport, CliError> {
    let params = WStateParams::from_coeffs(args.coeffs.0, args.renormalize)?;
    let res = lambda_max_sq(&params);
    let cp = &res.closest_product;
    Ok(EvalReport {
        coeffs: res.coeffs,
        lambda_max_sq: res.lambda_max_sq,
        geometric_measure: res.geometric_measure,
        regime: res.regime,
        lagrange: res.lagrange.map(|(l1, l2)| [l1, l2]),
        closest_product: ProductReport {
            u: cp.u.into(),
            v: cp.v.into(),
            w: cp.w.into(),
            amplitudes: cp.kets.map(|k| k.map(|z| [z.re, z.im])),
        },
        overlap: cp.overlap,
        overlap_residual: res.overlap_residual(),
    })
}

fn write_eval_text(out: &mut dyn Write, r: &EvalReport) -> std::io::Result<()> {
    let [a, b, c, d] = r.coeffs;
    writeln!(out, "coefficients       a={a} b={b} c={c} d={d}")?;
    writeln!(out, "lambda_max_sq      {}", r.lambda_max_sq)?;
    writeln!(out, "geometric_measure  {}", r.geometric_measure)?;
    writeln!(out, "regime             {}", r.regime)?;
    if let Some([l1, l2]) = r.lagrange {
        writeln!(out, "lambda1, lambda2   {l1} {l2}")?;
    }
    let p = &r.closest_product;
    for (name, bloch, amp) in [
        ("A", p.u, p.amplitudes[0]),
        ("B", p.v, p.amplitudes[1]),
        ("C", p.w, p.amplitudes[2]),
    ] {
        writeln!(
            out,
            "qubit {name}            bloch ({:.12}, {:.12}, {:.12})  ket ({:.12}{:+.12}i, {:.12}{:+.12}i)",
            bloch[0], bloch[1], bloch[2], amp[0][0], amp[0][1], amp[1][0], amp[1][1]
        )?;
    }
    writeln!(out, "overlap            {}", r.overlap)?;
    writeln!(out, "overlap residual   {:e}", r.overlap_residual)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub transitions: Vec<usize>,
    pub out: PathBuf,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepSummary, CliError> {
    let family = Family::parse(&args.family, &args.param, (args.range.lo, args.range.hi))?;
    let points = sweep(&family, args.steps as usize)?;
    let oracle: Option<Vec<f64>> = if args.with_oracle {
        Some(
            points
                .par_iter()
                .enumerate()
                .map(|(i, p)| {
                    let params = WStateParams::from_coeffs(p.coeffs, false)?;
                    let cfg = OracleConfig::with_seed(args.seed.wrapping_add(i as u64));
                    Ok(alternating_ascent(&params.embed(), &cfg)?.lambda_max_sq)
                })
                .collect::<Result<_, CliError>>()?,
        )
    } else {
        None
    };

    let mut header = vec![
        "param",
        "a",
        "b",
        "c",
        "d",
        "lambda_max_sq",
        "regime",
        "transition",
    ];
    if oracle.is_some() {
        header.push("oracle");
    }
    let rows = points.iter().enumerate().map(|(i, p)| {
        let mut row = vec![output::num(p.param)];
        row.extend(p.coeffs.iter().map(|&x| output::num(x)));
        row.push(output::num(p.lambda_max_sq));
        row.push(p.regime.to_string());
        row.push(u8::from(p.transition).to_string());
        if let Some(o) = &oracle {
            row.push(output::num(o[i]));
        }
        row
    });
    output::write_csv(&args.out, &header, rows)?;
    let manifest = RunManifest::new("sweep", args, Some(args.seed), points.len());
    manifest.write_next_to(&args.out)?;
    Ok(SweepSummary {
        rows: points.len(),
        transitions: points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.transition)
            .map(|(i, _)| i)
            .collect(),
        out: args.out.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCase {
    pub coeffs: [f64; 4],
    pub analytic: f64,
    /// `None` when the oracle failed on this input.
    pub oracle: Option<f64>,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateReport {
    pub samples: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub exceedances: usize,
    pub oracle_failures: usize,
    pub worst: Vec<WorstCase>,
    pub passed: bool,
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<ValidateReport, CliError> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive, got {}",
            args.tol
        )));
    }
    let inputs: Vec<WStateParams> = match args.coeffs {
        Some(Coeffs(c)) => {
            let p = WStateParams::from_coeffs(c, true)?;
            vec![p; args.samples as usize]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..args.samples)
                .map(|_| sample_unit_orthant(&mut rng))
                .collect()
        }
    };
    let cases: Vec<WorstCase> = inputs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let (analytic, _) = lambda_value(p);
            let cfg = OracleConfig::with_seed(args.seed.wrapping_add(i as u64));
            let oracle = alternating_ascent(&p.embed(), &cfg)
                .ok()
                .map(|r| r.lambda_max_sq);
            WorstCase {
                coeffs: p.coeffs(),
                analytic,
                oracle,
                deviation: oracle.map_or(f64::INFINITY, |o| (o - analytic).abs()),
            }
        })
        .collect();

    let oracle_failures = cases.iter().filter(|c| c.oracle.is_none()).count();
    let exceedances = cases
        .iter()
        .filter(|c| c.deviation >= args.tol || c.deviation.is_nan())
        .count();
    let max_deviation = cases.iter().map(|c| c.deviation).fold(0.0, f64::max);
    let finite: Vec<f64> = cases
        .iter()
        .map(|c| c.deviation)
        .filter(|d| d.is_finite())
        .collect();
    let mean_deviation = if finite.is_empty() {
        f64::NAN
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    let mut order: Vec<usize> = (0..cases.len()).collect();
    // stable sort keeps the lowest sample index first among ties
    order.sort_by(|&i, &j| cases[j].deviation.total_cmp(&cases[i].deviation));
    let worst = order
        .into_iter()
        .take(WORST_LISTED)
        .map(|i| cases[i].clone())
        .collect();
    Ok(ValidateReport {
        samples: args.samples,
        seed: args.seed,
        tolerance: args.tol,
        max_deviation,
        mean_deviation,
        exceedances,
        oracle_failures,
        worst,
        passed: exceedances == 0,
    })
}

fn write_validate_text(out: &mut dyn Write, r: &ValidateReport) -> std::io::Result<()> {
    writeln!(out, "samples          {} (seed {})", r.samples, r.seed)?;
    writeln!(out, "tolerance        {:e}", r.tolerance)?;
    writeln!(out, "max deviation    {:e}", r.max_deviation)?;
    writeln!(out, "mean deviation   {:e}", r.mean_deviation)?;
    writeln!(out, "exceedances      {}", r.exceedances)?;
    writeln!(out, "oracle failures  {}", r.oracle_failures)?;
    for w in &r.worst {
        let o = w.oracle.map_or("failed".to_string(), |o| o.to_string());
        writeln!(
            out,
            "  {:?}  analytic {}  oracle {}  deviation {:e}",
            w.coeffs, w.analytic, o, w.deviation
        )?;
    }
    writeln!(out, "{}", if r.passed { "PASS" } else { "FAIL" })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceSummary {
    pub rows: usize,
    pub skipped: usize,
    pub min_lambda: f64,
    pub max_lambda: f64,
    pub out: PathBuf,
}

pub fn cmd_surface(args: &SurfaceArgs) -> Result<SurfaceSummary, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut points = Vec::with_capacity(args.samples as usize);
    let mut skipped = 0;
    for _ in 0..args.samples {
        let p = match args.which {
            Surface::R0 => Some(sample_diagonal_surface(&mut rng)),
            Surface::Shared => sample_shared_surface(&mut rng),
        };
        match p {
            Some(p) => points.push(p),
            None => skipped += 1,
        }
    }
    let values: Vec<(f64, Regime)> = points.par_iter().map(lambda_value).collect();
    let header = ["a", "b", "c", "d", "lambda_max_sq", "regime"];
    let rows = points.iter().zip(&values).map(|(p, (v, regime))| {
        let mut row: Vec<String> = p.coeffs().iter().map(|&x| output::num(x)).collect();
        row.push(output::num(*v));
        row.push(regime.to_string());
        row
    });
    output::write_csv(&args.out, &header, rows)?;
    let mut manifest = RunManifest::new("surface", args, Some(args.seed), points.len());
    manifest.skipped = Some(skipped);
    manifest.write_next_to(&args.out)?;
    Ok(SurfaceSummary {
        rows: points.len(),
        skipped,
        min_lambda: values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min),
        max_lambda: values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max),
        out: args.out.clone(),
    })
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

fn report_error(out: &mut dyn Write, err: &mut dyn Write, json: bool, kind: &str, message: String) {
    if json {
        let obj = ErrorObject {
            error: ErrorBody { kind, message },
        };
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(&obj).expect("serializable")
        );
    } else {
        let _ = writeln!(err, "error: {message}");
    }
}

fn wants_json(args: &[OsString]) -> bool {
    args.iter().any(|a| a == "--json")
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json = wants_json(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            if json {
                let rendered = e.render().to_string();
                let message = rendered
                    .lines()
                    .next()
                    .unwrap_or_default()
                    .trim_start_matches("error: ")
                    .to_string();
                report_error(out, err, true, "usage", message);
            } else {
                let _ = write!(err, "{}", e.render());
            }
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a).and_then(|r| {
            if a.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&r).expect("serializable")
                )?;
            } else {
                write_eval_text(out, &r)?;
            }
            Ok(EXIT_OK)
        }),
        Command::Sweep(a) => cmd_sweep(a).and_then(|s| {
            writeln!(out, "wrote {} rows to {}", s.rows, s.out.display())?;
            if !s.transitions.is_empty() {
                writeln!(out, "regime transitions at rows {:?}", s.transitions)?;
            }
            Ok(EXIT_OK)
        }),
        Command::Validate(a) => cmd_validate(a).and_then(|r| {
            if a.json {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&r).expect("serializable")
                )?;
            } else {
                write_validate_text(out, &r)?;
            }
            Ok(if r.passed { EXIT_OK } else { EXIT_VALIDATION })
        }),
        Command::Surface(a) => cmd_surface(a).and_then(|s| {
            writeln!(
                out,
                "wrote {} rows to {} (skipped {}); lambda_max_sq in [{}, {}]",
                s.rows,
                s.out.display(),
                s.skipped,
                s.min_lambda,
                s.max_lambda
            )?;
            Ok(EXIT_OK)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            report_error(out, err, json, e.kind(), e.to_string());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_parsing() {
        assert_eq!(
            parse_coeffs("1,0,0,0").unwrap(),
            Coeffs([1.0, 0.0, 0.0, 0.0])
        );
        assert_eq!(parse_coeffs(" 0.5, 0.5,0.5 ,0.5").unwrap().0, [0.5; 4]);
        assert!(parse_coeffs("1,2,3").is_err());
        assert!(parse_coeffs("1,2,x,4").is_err());
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0:1").unwrap(), Range { lo: 0.0, hi: 1.0 });
        assert_eq!(parse_range("-0.5:0.25").unwrap().lo, -0.5);
        assert!(parse_range("0-1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
