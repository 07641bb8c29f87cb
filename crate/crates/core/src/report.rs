//! Run configuration, report emission, and checkpoint/resume for long
//! verification runs.
//!
//! A checkpoint carries every accumulator needed to continue the fold:
//! resuming and running to a limit L reproduces the uninterrupted run to L
//! bit-for-bit on integer fields and on the compensated h-sums (the fold is
//! sequential and its inputs are identical either way). Files are guarded by
//! a content hash over the serialized state.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::claims::{expected_status, ClaimEngine, ClaimId, ClaimOutcome, DEFAULT_BAND, LEDGER};
use crate::error::{Error, Result};
use crate::gaps::{fraction_below_one, GapRecords, RecordTracker, StatsAccumulator};
use crate::math::KahanSum;
use crate::sieve::{PrimeStream, DEFAULT_SEGMENT_SIZE};

/// Output format for emitted reports and row streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Domain(format!("unknown format: {other}"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Configuration for a verification or statistics run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub limit: u64,
    pub segment_size: usize,
    pub parallelism: usize,
    /// Allowed relative drift of the compensated h-sum from its closed form.
    pub h_tolerance: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    pub output_format: OutputFormat,
    pub checkpoint_path: Option<PathBuf>,
    /// Emit every stride-th statistics row.
    pub stride: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            limit: 100_000_000,
            segment_size: DEFAULT_SEGMENT_SIZE,
            parallelism: 1,
            h_tolerance: 1e-12,
            band_lo: DEFAULT_BAND.0,
            band_hi: DEFAULT_BAND.1,
            output_format: OutputFormat::Json,
            checkpoint_path: None,
            stride: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.limit < 3 {
            return Err(Error::Domain(format!(
                "limit must be at least 3, got {}",
                self.limit
            )));
        }
        if self.stride == 0 {
            return Err(Error::Domain("stride must be at least 1".into()));
        }
        if self.segment_size == 0 {
            return Err(Error::Domain("segment size must be positive".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Domain("parallelism must be at least 1".into()));
        }
        if !(self.band_lo < self.band_hi) {
            return Err(Error::Domain(format!(
                "band_lo must be below band_hi, got [{}, {}]",
                self.band_lo, self.band_hi
            )));
        }
        if !(self.h_tolerance > 0.0) {
            return Err(Error::Domain("h_tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn band(&self) -> (f64, f64) {
        (self.band_lo, self.band_hi)
    }
}

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Full fold state at a stream position; everything a resumed run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointState {
    /// 1-based prime index of the most recently consumed prime.
    pub last_index: u64,
    pub last_prime: u64,
    pub sum_g: u64,
    pub sum_h_value: f64,
    pub sum_h_compensation: f64,
    pub tracker: RecordTracker,
    pub claims: ClaimEngine,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointFile {
    schema_version: u32,
    sha256: String,
    state: CheckpointState,
}

fn state_digest(state: &CheckpointState) -> Result<String> {
    let body = serde_json::to_string(state)?;
    let digest = Sha256::digest(body.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Persist a checkpoint with an integrity hash.
pub fn checkpoint_write(path: &Path, state: &CheckpointState) -> Result<()> {
    let file = CheckpointFile {
        schema_version: CHECKPOINT_SCHEMA_VERSION,
        sha256: state_digest(state)?,
        state: state.clone(),
    };
    std::fs::write(path, serde_json::to_string(&file)?)?;
    Ok(())
}

/// Load a checkpoint, verifying schema version and content hash.
pub fn checkpoint_resume(path: &Path) -> Result<CheckpointState> {
    let raw = std::fs::read_to_string(path)?;
    let file: CheckpointFile = serde_json::from_str(&raw)?;
    if file.schema_version != CHECKPOINT_SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: file.schema_version,
            expected: CHECKPOINT_SCHEMA_VERSION,
        });
    }
    let expected = state_digest(&file.state)?;
    if expected != file.sha256 {
        return Err(Error::Corruption(format!(
            "hash {} does not match serialized state ({expected})",
            file.sha256
        )));
    }
    Ok(file.state)
}

/// Result of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub limit: u64,
    /// Number of gap records folded so far (cumulative across resumes).
    pub records: u64,
    pub fraction_below_one: f64,
    pub claims: Vec<ClaimOutcome>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Exit status under the catalog policy: 1 when a claim expected to hold
    /// was violated, 0 otherwise (expected counterexamples do not fail).
    pub fn exit_code(&self) -> i32 {
        let failed = self
            .claims
            .iter()
            .any(|o| o.violations > 0 && expected_status(o.claim).expected_true());
        i32::from(failed)
    }
}

/// Run the claim ledger over gap records up to `config.limit`.
///
/// `claims` selects the ledger subset on a fresh run; a resumed run continues
/// the checkpoint's own engine (claim set and band included). Returns the
/// report plus the final fold state, ready to checkpoint.
pub fn run_verify(
    config: &RunConfig,
    claims: &[ClaimId],
    resume: Option<CheckpointState>,
) -> Result<(VerifyReport, CheckpointState)> {
    config.validate()?;

    let (mut stats, mut tracker, mut engine, start_index, start_prime) = match resume {
        Some(state) => {
            let stats = StatsAccumulator::from_parts(
                state.last_index.saturating_sub(1),
                state.sum_g,
                KahanSum::from_parts(state.sum_h_value, state.sum_h_compensation),
                config.h_tolerance,
            );
            (stats, state.tracker, state.claims, state.last_index, state.last_prime)
        }
        None => {
            let engine = ClaimEngine::new(claims, config.band())?;
            (
                StatsAccumulator::new(config.h_tolerance),
                RecordTracker::new(),
                engine,
                0,
                0,
            )
        }
    };

    let (range_lo, records_stream) = if start_index == 0 {
        (2, None)
    } else {
        (start_prime + 1, Some((start_index, start_prime)))
    };
    let stream = PrimeStream::over_range(
        range_lo,
        config.limit,
        config.segment_size,
        config.parallelism,
        start_index,
    )?;
    let records = match records_stream {
        None => GapRecords::new(stream),
        Some((idx, prime)) => GapRecords::resume(stream, idx, prime),
    };

    let mut last = (start_index, start_prime);
    for rec in records {
        let prev = (stats.n() > 0).then(|| stats.h_bar());
        let row = stats.update(&rec)?;
        tracker.observe(&rec);
        engine.observe(&rec, prev, row.h_bar)?;
        last = (rec.n + 1, rec.p_next);
    }

    let fraction = if tracker.total == 0 {
        1.0
    } else {
        fraction_below_one(&tracker)?
    };
    let report = VerifyReport {
        limit: config.limit,
        records: stats.n(),
        fraction_below_one: fraction,
        claims: engine.outcomes(),
    };
    let state = CheckpointState {
        last_index: last.0,
        last_prime: last.1,
        sum_g: stats.sum_g(),
        sum_h_value: stats.sum_h().value(),
        sum_h_compensation: stats.sum_h().compensation(),
        tracker,
        claims: engine,
    };
    Ok((report, state))
}

/// Convenience wrapper running the full ledger with default claims.
pub fn run_verify_fresh(config: &RunConfig) -> Result<(VerifyReport, CheckpointState)> {
    run_verify(config, &LEDGER, None)
}

fn fmt_sig15(x: f64) -> String {
    format!("{x:.14e}")
}

/// One emitted statistics row.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StatsRow {
    pub n: u64,
    pub p_n: u64,
    pub p_next: u64,
    pub g: u64,
    pub h: f64,
    pub g_bar: f64,
    pub h_bar: f64,
}

/// CSV header matching the row schema.
pub const STATS_CSV_HEADER: &str = "n,p_n,p_next,g,h,g_bar,h_bar";

impl StatsRow {
    /// CSV line with h and h_bar at 15 significant digits.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.p_n,
            self.p_next,
            self.g,
            fmt_sig15(self.h),
            self.g_bar,
            fmt_sig15(self.h_bar),
        )
    }
}

/// Stream running-statistics rows (every stride-th) to a writer in the
/// configured format: CSV with a header line, or one JSON object per line.
pub fn run_stats<W: Write>(config: &RunConfig, out: &mut W) -> Result<()> {
    config.validate()?;
    if config.output_format == OutputFormat::Csv {
        writeln!(out, "{STATS_CSV_HEADER}")?;
    }
    let mut stats = StatsAccumulator::new(config.h_tolerance);
    for rec in crate::gaps::gap_records(config.limit)? {
        let row = stats.update(&rec)?;
        if rec.n % config.stride != 0 {
            continue;
        }
        let row = StatsRow {
            n: rec.n,
            p_n: rec.p_n,
            p_next: rec.p_next,
            g: rec.g,
            h: rec.h,
            g_bar: row.g_bar,
            h_bar: row.h_bar,
        };
        match config.output_format {
            OutputFormat::Csv => writeln!(out, "{}", row.to_csv())?,
            OutputFormat::Json => writeln!(out, "{}", serde_json::to_string(&row)?)?,
        }
    }
    Ok(())
}
