//! Explicit two-sided bounds on the k-th prime, evaluated inside each
//! bound's published applicability domain and swept for violations.
//!
//! Bound expressions are evaluated in double precision. A violation is only
//! recorded when it clears the bound value by more than one ulp; anything
//! inside that window is reported as indeterminate rather than guessed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::ulp;
use crate::sieve::{prime_stream_parallel, SegmentPlan};

/// Identifies one bound expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundId {
    /// p_k > k ln k, valid for all k >= 1.
    #[serde(rename = "rosser_lower")]
    RosserLower,
    /// p_k > k(ln k + ln ln k - 1), valid for k >= 6.
    #[serde(rename = "bracket1999_lower")]
    Bracket1999Lower,
    /// p_k < k(ln k + ln ln k), valid for k >= 6.
    #[serde(rename = "bracket1999_upper")]
    Bracket1999Upper,
    /// p_k >= k(ln k + ln ln k - 1 + (ln ln k - 2.1)/ln k), valid for k >= 3.
    #[serde(rename = "dusart2010_lower")]
    Dusart2010Lower,
    /// p_k <= k(ln k + ln ln k - 1 + (ln ln k - 2)/ln k), valid for k >= 688383.
    #[serde(rename = "dusart2010_upper")]
    Dusart2010Upper,
    /// p_k < k^2, applied for k >= 2 (k = 1 is the documented exception).
    #[serde(rename = "k_squared")]
    KSquared,
}

/// Smallest k for which the refined upper bound is published.
pub const DUSART_UPPER_MIN_K: u64 = 688_383;

/// All bound expressions at one (k, p_k); expressions outside their domain
/// are left unevaluated rather than reported with misleading values.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundEvaluation {
    pub k: u64,
    pub p_k: u64,
    pub rosser_lower: f64,
    pub bracket1999_lower: Option<f64>,
    pub bracket1999_upper: Option<f64>,
    pub dusart_lower: Option<f64>,
    pub dusart_upper: Option<f64>,
    /// k^2; None when it no longer fits in 64 bits (the bound then holds
    /// trivially for any 64-bit prime).
    pub square_upper: Option<u64>,
    /// The asymptotic stand-in k ln k; identical to `rosser_lower` by
    /// construction, kept as a separate evaluator and asserted equal.
    pub simple: f64,
}

fn k_ln_k(k: u64) -> f64 {
    let kf = k as f64;
    kf * kf.ln()
}

fn asymptotic_simple(k: u64) -> f64 {
    let kf = k as f64;
    kf * kf.ln()
}

fn bracket1999(k: u64) -> (f64, f64) {
    let kf = k as f64;
    let t = kf.ln() + kf.ln().ln();
    (kf * (t - 1.0), kf * t)
}

fn dusart_lower(k: u64) -> f64 {
    let kf = k as f64;
    let lk = kf.ln();
    kf * (lk + lk.ln() - 1.0 + (lk.ln() - 2.1) / lk)
}

fn dusart_upper(k: u64) -> f64 {
    let kf = k as f64;
    let lk = kf.ln();
    kf * (lk + lk.ln() - 1.0 + (lk.ln() - 2.0) / lk)
}

/// Evaluate every bound expression at a caller-certified pair (k, p_k).
pub fn evaluate_bounds(k: u64, p_k: u64) -> Result<BoundEvaluation> {
    if k == 0 {
        return Err(Error::Domain("bounds are defined for k >= 1".into()));
    }
    let eval = BoundEvaluation {
        k,
        p_k,
        rosser_lower: k_ln_k(k),
        bracket1999_lower: (k >= 6).then(|| bracket1999(k).0),
        bracket1999_upper: (k >= 6).then(|| bracket1999(k).1),
        dusart_lower: (k >= 3).then(|| dusart_lower(k)),
        dusart_upper: (k >= DUSART_UPPER_MIN_K).then(|| dusart_upper(k)),
        square_upper: k.checked_mul(k),
        simple: asymptotic_simple(k),
    };
    debug_assert_eq!(eval.rosser_lower, eval.simple);
    Ok(eval)
}

/// Whether a reported entry is a clear violation or too close to call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Violation,
    Indeterminate,
}

/// One entry of the violation report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub bound_id: BoundId,
    pub k: u64,
    pub p_k: u64,
    pub bound_value: f64,
    pub kind: ViolationKind,
}

/// Options for the sweep.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheckOptions {
    /// Apply the k^2 bound from k = 1 to surface the documented exception
    /// p_1 = 2 >= 1.
    pub square_from_k1: bool,
    pub parallelism: usize,
}

impl Default for BoundCheckOptions {
    fn default() -> Self {
        Self { square_from_k1: false, parallelism: 1 }
    }
}

/// Classify a strict float bound with a one-ulp guard band.
///
/// `slack` is positive when the bound is satisfied. Returns `None` when the
/// verdict is clear and satisfied.
fn classify(slack: f64, bound_value: f64) -> Option<ViolationKind> {
    let guard = ulp(bound_value);
    if slack > guard {
        None
    } else if slack < -guard {
        Some(ViolationKind::Violation)
    } else {
        Some(ViolationKind::Indeterminate)
    }
}

/// Sweep every k <= k_max and report bound violations.
///
/// Inside published domains the report is expected to be empty. The k^2
/// bound is applied from k = 2 unless `square_from_k1` forces the k = 1
/// exception into view.
pub fn check_bounds_with(k_max: u64, opts: BoundCheckOptions) -> Result<Vec<BoundViolation>> {
    if k_max == 0 {
        return Err(Error::Domain("check_bounds requires k_max >= 1".into()));
    }
    let limit = sieve_limit_for_kth(k_max)?;
    let stream = prime_stream_parallel(
        limit,
        SegmentPlan::whole(limit),
        opts.parallelism,
    )?;

    let mut report = Vec::new();
    let mut push = |bound_id, k, p_k, bound_value, kind| {
        report.push(BoundViolation { bound_id, k, p_k, bound_value, kind })
    };

    for entry in stream.take_while(|e| e.index <= k_max) {
        let (k, p) = (entry.index, entry.value);
        let eval = evaluate_bounds(k, p)?;
        let pf = p as f64;

        // strict lower bounds: satisfied when p_k > bound
        if let Some(kind) = classify(pf - eval.rosser_lower, eval.rosser_lower) {
            push(BoundId::RosserLower, k, p, eval.rosser_lower, kind);
        }
        if let Some(b) = eval.bracket1999_lower {
            if let Some(kind) = classify(pf - b, b) {
                push(BoundId::Bracket1999Lower, k, p, b, kind);
            }
        }
        // strict upper bound: satisfied when p_k < bound
        if let Some(b) = eval.bracket1999_upper {
            if let Some(kind) = classify(b - pf, b) {
                push(BoundId::Bracket1999Upper, k, p, b, kind);
            }
        }
        // non-strict pair: p_k >= lower, p_k <= upper
        if let Some(b) = eval.dusart_lower {
            if let Some(kind) = classify(pf - b, b) {
                push(BoundId::Dusart2010Lower, k, p, b, kind);
            }
        }
        if let Some(b) = eval.dusart_upper {
            if let Some(kind) = classify(b - pf, b) {
                push(BoundId::Dusart2010Upper, k, p, b, kind);
            }
        }
        // exact integer bound p_k < k^2, checked from k = 2 (or 1 when forced)
        let square_applies = k >= 2 || opts.square_from_k1;
        if square_applies {
            let violated = match eval.square_upper {
                Some(sq) => p >= sq,
                None => false,
            };
            if violated {
                push(
                    BoundId::KSquared,
                    k,
                    p,
                    eval.square_upper.unwrap() as f64,
                    ViolationKind::Violation,
                );
            }
        }
    }
    Ok(report)
}

/// Sweep with default options (standard domains, sequential).
pub fn check_bounds(k_max: u64) -> Result<Vec<BoundViolation>> {
    check_bounds_with(k_max, BoundCheckOptions::default())
}

/// A sieve limit guaranteed to reach p_{k_max}.
fn sieve_limit_for_kth(k_max: u64) -> Result<u64> {
    if k_max < 6 {
        return Ok(13);
    }
    let kf = k_max as f64;
    let bound = kf * (kf.ln() + kf.ln().ln());
    if !bound.is_finite() || bound >= u64::MAX as f64 {
        return Err(Error::Overflow(format!(
            "sieve window for p_{k_max} exceeds the 64-bit range"
        )));
    }
    Ok(bound.ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_at_k6() {
        let eval = evaluate_bounds(6, 13).unwrap();
        let lo = eval.bracket1999_lower.unwrap();
        let hi = eval.bracket1999_upper.unwrap();
        assert!((lo - 8.249745300064286).abs() < 1e-12);
        assert!((hi - 14.249745300064286).abs() < 1e-12);
        assert!(lo < 13.0 && 13.0 < hi);
    }

    #[test]
    fn evaluation_at_k1() {
        let eval = evaluate_bounds(1, 2).unwrap();
        assert_eq!(eval.rosser_lower, 0.0);
        assert!(2.0 > eval.rosser_lower);
        assert_eq!(eval.bracket1999_lower, None);
        assert_eq!(eval.dusart_lower, None);
        assert_eq!(eval.square_upper, Some(1));
    }

    #[test]
    fn evaluation_at_k2() {
        let eval = evaluate_bounds(2, 3).unwrap();
        assert_eq!(eval.square_upper, Some(4));
        assert!(eval.p_k < eval.square_upper.unwrap());
        assert_eq!(eval.bracket1999_lower, None, "ln ln 2 < 0 must not leak");
    }

    #[test]
    fn zero_k_rejected() {
        assert!(matches!(evaluate_bounds(0, 2), Err(Error::Domain(_))));
        assert!(matches!(check_bounds(0), Err(Error::Domain(_))));
    }

    #[test]
    fn simple_equals_rosser_everywhere() {
        for k in [1u64, 2, 6, 100, 10_000, 688_383] {
            let eval = evaluate_bounds(k, 13).unwrap();
            assert_eq!(eval.rosser_lower, eval.simple);
        }
    }

    #[test]
    fn clean_sweep_to_100k() {
        let report = check_bounds(100_000).unwrap();
        assert!(report.is_empty(), "unexpected entries: {report:?}");
    }

    #[test]
    fn square_exception_at_k1_when_forced() {
        let report = check_bounds_with(
            1,
            BoundCheckOptions { square_from_k1: true, parallelism: 1 },
        )
        .unwrap();
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].bound_id, BoundId::KSquared);
        assert_eq!(report[0].k, 1);
        assert_eq!(report[0].p_k, 2);
        assert_eq!(report[0].kind, ViolationKind::Violation);
    }

    #[test]
    fn default_sweep_skips_k1_square() {
        assert!(check_bounds(1).unwrap().is_empty());
    }

    #[test]
    fn lower_bound_ordering() {
        // The two lower bounds cross at ln ln k = 1 (k = 16): below that the
        // bracket lower sits under k ln k, above it the chain
        // rosser < bracket_lower < p_k < bracket_upper holds.
        let primes = crate::sieve::primes_up_to(1_300_000).unwrap();
        for entry in primes.iter().filter(|e| e.index >= 6) {
            let eval = evaluate_bounds(entry.index, entry.value).unwrap();
            let p = entry.value as f64;
            let lo = eval.bracket1999_lower.unwrap();
            let hi = eval.bracket1999_upper.unwrap();
            assert!(eval.rosser_lower < p && lo < p && p < hi, "k = {}", entry.index);
            if entry.index >= 16 {
                assert!(eval.rosser_lower < lo, "k = {}", entry.index);
            } else {
                assert!(eval.rosser_lower > lo, "k = {}", entry.index);
            }
        }
    }

    #[test]
    fn dusart_pair_ordering_inside_domain() {
        // Dusart bracket is strictly inside the 1999 bracket once both apply.
        for k in [688_383u64, 700_000, 750_000] {
            let lo99 = bracket1999(k).0;
            let hi99 = bracket1999(k).1;
            let lo10 = dusart_lower(k);
            let hi10 = dusart_upper(k);
            assert!(lo99 < lo10 && lo10 < hi10 && hi10 < hi99, "k = {k}");
        }
    }

    #[test]
    fn dusart_window_clean_to_750k() {
        let report = check_bounds(750_000).unwrap();
        assert!(report.is_empty(), "unexpected entries: {report:?}");
    }

    #[test]
    fn report_serializes_with_snake_case_ids() {
        let v = BoundViolation {
            bound_id: BoundId::KSquared,
            k: 1,
            p_k: 2,
            bound_value: 1.0,
            kind: ViolationKind::Violation,
        };
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"bound_id\":\"k_squared\""));
        assert!(json.contains("\"kind\":\"violation\""));
    }
}
