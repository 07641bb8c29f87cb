use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use andrica_lab::bounds::{check_bounds_with, BoundCheckOptions};
use andrica_lab::claims::{claim_catalog, ClaimId, LEDGER};
use andrica_lab::error::Error;
use andrica_lab::generalized::{check_generalized, threshold_n0};
use andrica_lab::report::{
    checkpoint_resume, checkpoint_write, run_stats, run_verify, OutputFormat, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "andrica-lab",
    version,
    about = "Prime-gap statistics and an empirical ledger for square-root gap inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Odd candidates per sieve segment
    #[arg(long, default_value_t = andrica_lab::sieve::DEFAULT_SEGMENT_SIZE)]
    segment_size: usize,

    /// Worker threads for sieving (falls back to ANDRICA_LAB_THREADS)
    #[arg(long, env = "ANDRICA_LAB_THREADS", default_value_t = 1)]
    threads: usize,

    /// Write output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run claim checkers over all gaps up to the limit and report outcomes
    Verify {
        #[command(flatten)]
        common: CommonOpts,

        /// Largest prime to include
        #[arg(long, default_value_t = 100_000_000)]
        limit: u64,

        /// Comma-separated claim subset (default: the whole ledger)
        #[arg(long, value_delimiter = ',')]
        claims: Vec<String>,

        /// Relative tolerance for the h-sum telescoping check
        #[arg(long, default_value_t = 1e-12)]
        h_tolerance: f64,

        /// Lower edge of the asymptotic band
        #[arg(long, default_value_t = 0.9)]
        band_lo: f64,

        /// Upper edge of the asymptotic band
        #[arg(long, default_value_t = 1.2)]
        band_hi: f64,

        /// Write the final fold state here
        #[arg(long)]
        checkpoint: Option<PathBuf>,

        /// Continue from a saved fold state
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Stream per-gap running statistics as CSV or JSON lines
    Stats {
        #[command(flatten)]
        common: CommonOpts,

        /// Largest prime to include
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,

        /// Emit every stride-th row
        #[arg(long, default_value_t = 1)]
        stride: u64,

        /// Output format
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Sweep the explicit k-th-prime bounds and report violations
    Bounds {
        #[command(flatten)]
        common: CommonOpts,

        /// Check every k up to this index
        #[arg(long, default_value_t = 100_000)]
        k_max: u64,

        /// Apply the k^2 bound from k = 1 to surface the documented exception
        #[arg(long, default_value_t = false)]
        square_from_k1: bool,
    },
    /// Analyze the power-x inequality: threshold solver plus a range check
    General {
        #[command(flatten)]
        common: CommonOpts,

        /// Exponent in (0, 1)
        #[arg(long)]
        x: f64,

        /// Largest prime for the range check (0 skips it)
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
    },
    /// Track record gaps and record h values up to the limit
    Records {
        #[command(flatten)]
        common: CommonOpts,

        /// Largest prime to include
        #[arg(long, default_value_t = 1_000_000)]
        limit: u64,
    },
    /// Print the claim catalog: id, inequality, expected empirical status
    Catalog,
}

fn write_output(out: &Option<PathBuf>, body: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

fn parse_claims(names: &[String]) -> Result<Vec<ClaimId>, Error> {
    if names.is_empty() {
        return Ok(LEDGER.to_vec());
    }
    names.iter().map(|s| ClaimId::from_str(s.trim())).collect()
}

fn is_usage_error(err: &Error) -> bool {
    matches!(err, Error::Domain(_) | Error::UnknownClaim(_))
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Verify {
            common,
            limit,
            claims,
            h_tolerance,
            band_lo,
            band_hi,
            checkpoint,
            resume,
        } => {
            let config = RunConfig {
                limit,
                segment_size: common.segment_size,
                parallelism: common.threads,
                h_tolerance,
                band_lo,
                band_hi,
                checkpoint_path: checkpoint.clone(),
                ..RunConfig::default()
            };
            let selected = parse_claims(&claims)?;
            let resumed = match &resume {
                Some(path) => Some(checkpoint_resume(path)?),
                None => None,
            };
            let (report, state) = run_verify(&config, &selected, resumed)?;
            if let Some(path) = &checkpoint {
                checkpoint_write(path, &state)?;
            }
            let mut body = report.to_json()?;
            body.push('\n');
            write_output(&common.out, &body)?;
            Ok(report.exit_code())
        }
        Command::Stats { common, limit, stride, format } => {
            let config = RunConfig {
                limit,
                segment_size: common.segment_size,
                parallelism: common.threads,
                stride,
                output_format: OutputFormat::from_str(&format)?,
                ..RunConfig::default()
            };
            let mut buf = Vec::new();
            run_stats(&config, &mut buf)?;
            write_output(&common.out, std::str::from_utf8(&buf).expect("utf8 rows"))?;
            Ok(0)
        }
        Command::Bounds { common, k_max, square_from_k1 } => {
            let report = check_bounds_with(
                k_max,
                BoundCheckOptions { square_from_k1, parallelism: common.threads },
            )?;
            let mut body = serde_json::to_string_pretty(&report)?;
            body.push('\n');
            write_output(&common.out, &body)?;
            Ok(0)
        }
        Command::General { common, x, limit } => {
            let analysis = threshold_n0(x)?;
            let mut value = serde_json::to_value(analysis)?;
            if limit >= 3 {
                let outcome = check_generalized(x, limit)?;
                value["claim"] = serde_json::to_value(&outcome)?;
            }
            let mut body = serde_json::to_string_pretty(&value)?;
            body.push('\n');
            write_output(&common.out, &body)?;
            Ok(0)
        }
        Command::Records { common, limit } => {
            let tracker = andrica_lab::records(andrica_lab::gap_records(limit)?)?;
            let fraction = andrica_lab::fraction_below_one(&tracker)?;
            let mut value = serde_json::to_value(&tracker)?;
            value["fraction_below_one"] = serde_json::to_value(fraction)?;
            value["limit"] = serde_json::to_value(limit)?;
            let mut body = serde_json::to_string_pretty(&value)?;
            body.push('\n');
            write_output(&common.out, &body)?;
            Ok(0)
        }
        Command::Catalog => {
            let rows: Vec<serde_json::Value> = claim_catalog()
                .into_iter()
                .map(|(id, source, status)| {
                    serde_json::json!({
                        "claim": id,
                        "inequality": source,
                        "expected": status,
                    })
                })
                .collect();
            let mut body = serde_json::to_string_pretty(&rows)?;
            body.push('\n');
            write_output(&None, &body)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            if is_usage_error(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
