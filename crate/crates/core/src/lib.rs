//! Prime-gap analysis toolkit.
//!
//! Computes prime gaps g_n = p_{n+1} - p_n and their square-root companions
//! h_n = sqrt(p_{n+1}) - sqrt(p_n) at scale, maintains exact and compensated
//! running statistics, tracks record (maximal) gaps, evaluates explicit
//! bounds on the k-th prime, and runs an empirical claim ledger: every
//! inequality under study is an identified predicate with violation counts,
//! first counterexamples, and satisfaction fractions.
//!
//! # Layout
//!
//! - [`sieve`] — segmented odd-only sieve: indexed primes, nth prime, exact
//!   prime counting.
//! - [`gaps`] — gap records, Andrica values, running statistics with
//!   compensated summation, record tracking.
//! - [`bounds`] — explicit k-th-prime bounds with domain gating and a
//!   violation sweep.
//! - [`claims`] — the claim ledger and its single-pass evaluation engine.
//! - [`generalized`] — power-x generalization and its threshold solver.
//! - [`report`] — run configuration, checkpoint/resume, report emission.
//!
//! # Example
//!
//! ```
//! use andrica_lab::claims::{check_claim, ClaimId};
//!
//! let outcome = check_claim(ClaimId::Andrica, 100_000).unwrap();
//! assert_eq!(outcome.violations, 0);
//! ```

// negated comparisons are deliberate: NaN must land on the violating side
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// frozen oracle constants keep their full digits
#![allow(clippy::excessive_precision)]

pub mod bounds;
pub mod claims;
pub mod error;
pub mod gaps;
pub mod generalized;
pub mod math;
pub mod report;
pub mod sieve;

pub use bounds::{check_bounds, evaluate_bounds, BoundEvaluation, BoundId, BoundViolation};
pub use claims::{
    check_claim, claim_catalog, verify_all, ClaimId, ClaimOutcome, ExpectedStatus,
};
pub use error::{Error, Result};
pub use gaps::{
    fraction_below_one, gap_records, h_value, records, running_stats, GapRecord, RecordTracker,
    RunningStats,
};
pub use generalized::{check_generalized, h_general, threshold_n0, ExponentAnalysis};
pub use report::{checkpoint_resume, checkpoint_write, CheckpointState, RunConfig, VerifyReport};
pub use sieve::{
    nth_prime, pi_approx, prime_count, prime_stream, primes_up_to, PrimeEntry, SegmentPlan,
};
