//! The claim ledger: every inequality under study becomes an identified,
//! checkable predicate over the gap stream with exact violation accounting.
//!
//! The headline claim (h_n < 1) is never decided in floating point. Writing
//! s = sqrt(p_n), the inequality h_n < 1 is equivalent to g_n - 1 < 2s, and
//! since both sides are nonnegative that is exactly (g_n - 1)^2 < 4 p_n in
//! integer arithmetic. The gap form g_n < 1 + 2s gets an independent exact
//! route through isqrt, and the two verdicts are cross-checked on every
//! record.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaps::{gap_records, GapRecord, StatsAccumulator};
use crate::math::sqrt_u64;

/// Identifies one checkable claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    /// h_n < 1, decided in exact integer arithmetic.
    #[serde(rename = "ANDRICA")]
    Andrica,
    /// g_n < 1 + 2 sqrt(p_n), the same assertion in gap form, decided by an
    /// independent isqrt route.
    #[serde(rename = "ANDRICA_GAP_FORM")]
    AndricaGapForm,
    /// 0 < hbar_n < 1.
    #[serde(rename = "AVG_IN_UNIT")]
    AvgInUnit,
    /// hbar_n < hbar_{n-1}; compared from n = 3, the first index where two
    /// multi-record averages exist.
    #[serde(rename = "AVG_MONOTONE")]
    AvgMonotone,
    /// h_n < (sqrt(p_{n+1}) - sqrt(2)) / n, i.e. h_n < hbar_n.
    #[serde(rename = "H_LT_AVG")]
    HLtAvg,
    /// g_n < 2 ln n; n = 1 counts as a violation since 2 ln 1 = 0.
    #[serde(rename = "GAP_LT_2LN")]
    GapLt2Ln,
    /// hbar_n * sqrt(n / ln n) stays inside a configured band for n >= 1000.
    #[serde(rename = "AVG_ASYMPTOTIC")]
    AvgAsymptotic,
    /// Label for generalized power-x outcomes; not part of the fixed ledger.
    #[serde(rename = "GENERALIZED")]
    Generalized,
}

/// The seven ledger claims, in canonical order.
pub const LEDGER: [ClaimId; 7] = [
    ClaimId::Andrica,
    ClaimId::AndricaGapForm,
    ClaimId::AvgInUnit,
    ClaimId::AvgMonotone,
    ClaimId::HLtAvg,
    ClaimId::GapLt2Ln,
    ClaimId::AvgAsymptotic,
];

impl ClaimId {
    pub fn name(&self) -> &'static str {
        match self {
            ClaimId::Andrica => "ANDRICA",
            ClaimId::AndricaGapForm => "ANDRICA_GAP_FORM",
            ClaimId::AvgInUnit => "AVG_IN_UNIT",
            ClaimId::AvgMonotone => "AVG_MONOTONE",
            ClaimId::HLtAvg => "H_LT_AVG",
            ClaimId::GapLt2Ln => "GAP_LT_2LN",
            ClaimId::AvgAsymptotic => "AVG_ASYMPTOTIC",
            ClaimId::Generalized => "GENERALIZED",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LEDGER
            .iter()
            .find(|id| id.name() == s)
            .copied()
            .ok_or_else(|| Error::UnknownClaim(s.to_string()))
    }
}

/// Empirical expectation for a claim at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedStatus {
    HoldsAtDeskScale,
    FailsWithCounterexamples,
    BandCheck,
}

impl ExpectedStatus {
    /// Whether a violation of this claim should fail a verification run.
    pub fn expected_true(&self) -> bool {
        !matches!(self, ExpectedStatus::FailsWithCounterexamples)
    }
}

/// Static catalog mapping each ledger claim to the inequality it checks and
/// its expected empirical status.
pub fn claim_catalog() -> Vec<(ClaimId, &'static str, ExpectedStatus)> {
    vec![
        (
            ClaimId::Andrica,
            "sqrt(p[n+1]) - sqrt(p[n]) < 1 for every n",
            ExpectedStatus::HoldsAtDeskScale,
        ),
        (
            ClaimId::AndricaGapForm,
            "g[n] < 1 + 2 sqrt(p[n]) for every n",
            ExpectedStatus::HoldsAtDeskScale,
        ),
        (
            ClaimId::AvgInUnit,
            "0 < mean(h[1..n]) < 1 for every n",
            ExpectedStatus::HoldsAtDeskScale,
        ),
        (
            ClaimId::AvgMonotone,
            "mean(h[1..n]) strictly decreases in n",
            ExpectedStatus::FailsWithCounterexamples,
        ),
        (
            ClaimId::HLtAvg,
            "h[n] < (sqrt(p[n+1]) - sqrt(2)) / n for every n",
            ExpectedStatus::FailsWithCounterexamples,
        ),
        (
            ClaimId::GapLt2Ln,
            "g[n] < 2 ln(n) for every n",
            ExpectedStatus::FailsWithCounterexamples,
        ),
        (
            ClaimId::AvgAsymptotic,
            "mean(h[1..n]) * sqrt(n / ln n) stays in a fixed band for n >= 1000",
            ExpectedStatus::BandCheck,
        ),
    ]
}

/// Expected status of a single claim.
pub fn expected_status(id: ClaimId) -> ExpectedStatus {
    claim_catalog()
        .iter()
        .find(|(c, _, _)| *c == id)
        .map(|&(_, _, s)| s)
        .unwrap_or(ExpectedStatus::BandCheck)
}

/// First violating index with the two sides of the failed comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstViolation {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Violation accounting for one claim.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClaimAccumulator {
    pub checked_n: u64,
    pub violations: u64,
    pub first_violation: Option<FirstViolation>,
}

impl ClaimAccumulator {
    fn check(&mut self, holds: bool, n: u64, lhs: f64, rhs: f64) {
        self.checked_n += 1;
        if !holds {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(FirstViolation { n, lhs, rhs });
            }
        }
    }
}

/// Verdict for one claim over a checked range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub claim: ClaimId,
    pub checked_n: u64,
    pub violations: u64,
    pub first_violation: Option<FirstViolation>,
    pub satisfied_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub band: Option<(f64, f64)>,
}

impl ClaimOutcome {
    fn from_accumulator(claim: ClaimId, acc: &ClaimAccumulator, band: Option<(f64, f64)>) -> Self {
        let satisfied_fraction = if acc.checked_n == 0 {
            1.0
        } else {
            (acc.checked_n - acc.violations) as f64 / acc.checked_n as f64
        };
        Self {
            claim,
            checked_n: acc.checked_n,
            violations: acc.violations,
            first_violation: acc.first_violation,
            satisfied_fraction,
            band,
        }
    }
}

/// Default band for the asymptotic average check.
pub const DEFAULT_BAND: (f64, f64) = (0.9, 1.2);
/// First index at which the asymptotic band applies.
pub const ASYMPTOTIC_MIN_N: u64 = 1000;

/// Exact-integer verdict for h_n < 1: (g - 1)^2 < 4 p.
pub fn andrica_holds_exact(p: u64, g: u64) -> bool {
    debug_assert!(g >= 1);
    let d = (g - 1) as u128;
    d * d < 4 * p as u128
}

/// Exact-integer verdict for g < 1 + 2 sqrt(p), the independent isqrt route:
/// for square p = s^2 the bound is g <= 2s; otherwise g <= isqrt(4p) + 1.
pub fn gap_form_holds_exact(p: u64, g: u64) -> bool {
    let s = p.isqrt();
    if s * s == p {
        g <= 2 * s
    } else {
        g <= (4 * p as u128).isqrt() as u64 + 1
    }
}

/// Single-pass evaluator for a set of claims over an ordered record stream.
///
/// Serializable: a verification run can checkpoint mid-stream and resume with
/// identical accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimEngine {
    enabled: Vec<ClaimId>,
    accumulators: Vec<ClaimAccumulator>,
    band: (f64, f64),
}

impl ClaimEngine {
    pub fn new(claims: &[ClaimId], band: (f64, f64)) -> Result<Self> {
        for id in claims {
            if *id == ClaimId::Generalized {
                return Err(Error::UnknownClaim(
                    "GENERALIZED is evaluated per exponent, not as a ledger claim".into(),
                ));
            }
        }
        Ok(Self {
            enabled: claims.to_vec(),
            accumulators: vec![ClaimAccumulator::default(); claims.len()],
            band,
        })
    }

    pub fn enabled(&self) -> &[ClaimId] {
        &self.enabled
    }

    pub fn band(&self) -> (f64, f64) {
        self.band
    }

    /// Feed record n together with the running averages after records n and
    /// n - 1.
    pub fn observe(&mut self, rec: &GapRecord, hbar_prev: Option<f64>, hbar: f64) -> Result<()> {
        let n = rec.n;
        let nf = n as f64;

        let andrica = andrica_holds_exact(rec.p_n, rec.g);
        let gap_form = gap_form_holds_exact(rec.p_n, rec.g);
        if andrica != gap_form {
            return Err(Error::Invariant {
                n,
                detail: format!(
                    "exact Andrica routes disagree at p = {}, g = {}: {} vs {}",
                    rec.p_n, rec.g, andrica, gap_form
                ),
            });
        }

        for (id, acc) in self.enabled.iter().zip(self.accumulators.iter_mut()) {
            match id {
                ClaimId::Andrica => acc.check(andrica, n, rec.h, 1.0),
                ClaimId::AndricaGapForm => {
                    let rhs = 1.0 + 2.0 * sqrt_u64(rec.p_n);
                    acc.check(gap_form, n, rec.g as f64, rhs);
                }
                ClaimId::AvgInUnit => {
                    acc.check(hbar > 0.0 && hbar < 1.0, n, hbar, 1.0);
                }
                ClaimId::AvgMonotone => {
                    if n >= 3 {
                        let prev = hbar_prev.expect("n >= 3 implies a previous average");
                        let holds = hbar < prev;
                        acc.check(holds, n, hbar, prev);
                        // a failed decrease must trace back to h_n >= hbar_{n-1}
                        if !holds && !(rec.h >= prev) {
                            return Err(Error::Invariant {
                                n,
                                detail: format!(
                                    "monotone violation without h >= previous average: \
                                     h = {}, hbar_prev = {prev}",
                                    rec.h
                                ),
                            });
                        }
                    }
                }
                ClaimId::HLtAvg => acc.check(rec.h < hbar, n, rec.h, hbar),
                ClaimId::GapLt2Ln => {
                    let rhs = 2.0 * nf.ln();
                    acc.check((rec.g as f64) < rhs, n, rec.g as f64, rhs);
                }
                ClaimId::AvgAsymptotic => {
                    if n >= ASYMPTOTIC_MIN_N {
                        let ratio = hbar * (nf / nf.ln()).sqrt();
                        let holds = ratio >= self.band.0 && ratio <= self.band.1;
                        let rhs = if ratio > self.band.1 { self.band.1 } else { self.band.0 };
                        acc.check(holds, n, ratio, rhs);
                    }
                }
                ClaimId::Generalized => unreachable!("rejected at construction"),
            }
        }
        Ok(())
    }

    pub fn outcomes(&self) -> Vec<ClaimOutcome> {
        self.enabled
            .iter()
            .zip(self.accumulators.iter())
            .map(|(id, acc)| {
                let band = (*id == ClaimId::AvgAsymptotic).then_some(self.band);
                ClaimOutcome::from_accumulator(*id, acc, band)
            })
            .collect()
    }
}

/// Run the requested claims over all gap records with p_{n+1} <= limit.
pub fn run_claims(limit: u64, claims: &[ClaimId], band: (f64, f64)) -> Result<Vec<ClaimOutcome>> {
    let mut engine = ClaimEngine::new(claims, band)?;
    let mut stats = StatsAccumulator::new(1e-12);
    for rec in gap_records(limit)? {
        let prev = (stats.n() > 0).then(|| stats.h_bar());
        let row = stats.update(&rec)?;
        engine.observe(&rec, prev, row.h_bar)?;
    }
    Ok(engine.outcomes())
}

/// Evaluate one claim over the range.
pub fn check_claim(claim: ClaimId, limit: u64) -> Result<ClaimOutcome> {
    let outcomes = run_claims(limit, &[claim], DEFAULT_BAND)?;
    Ok(outcomes.into_iter().next().expect("one claim in, one outcome out"))
}

/// Evaluate the whole ledger in a single pass over the gap stream.
pub fn verify_all(limit: u64) -> Result<Vec<ClaimOutcome>> {
    run_claims(limit, &LEDGER, DEFAULT_BAND)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(outcomes: &[ClaimOutcome], id: ClaimId) -> &ClaimOutcome {
        outcomes.iter().find(|o| o.claim == id).unwrap()
    }

    #[test]
    fn andrica_clean_to_one_million() {
        let out = check_claim(ClaimId::Andrica, 1_000_000).unwrap();
        assert_eq!(out.violations, 0);
        assert!(out.first_violation.is_none());
        assert_eq!(out.satisfied_fraction, 1.0);
        assert_eq!(out.checked_n, 78_497); // pi(1e6) - 1 records
    }

    #[test]
    fn exact_routes_on_synthetic_pairs() {
        // equality case: p = 9 (square), q = 17 -> g = 8 > 1 + 2*3 fails;
        // g = 7 sits exactly on the boundary and must also fail (strict <)
        assert!(!andrica_holds_exact(9, 7));
        assert!(!gap_form_holds_exact(9, 7));
        assert!(andrica_holds_exact(9, 6));
        assert!(gap_form_holds_exact(9, 6));
        // non-square p = 7: 2 sqrt 7 = 5.29..., so g <= 6 holds, g >= 7 fails
        assert!(andrica_holds_exact(7, 6));
        assert!(gap_form_holds_exact(7, 6));
        assert!(!andrica_holds_exact(7, 7));
        assert!(!gap_form_holds_exact(7, 7));
    }

    #[test]
    fn exact_routes_agree_exhaustively() {
        for p in 2u64..3000 {
            for g in 1u64..200 {
                assert_eq!(
                    andrica_holds_exact(p, g),
                    gap_form_holds_exact(p, g),
                    "p = {p}, g = {g}"
                );
            }
        }
    }

    #[test]
    fn exact_routes_agree_near_u64_top() {
        let huge = u64::MAX - 58; // prime-sized magnitude, value itself irrelevant
        for p in [huge, u64::MAX - 1, (1u64 << 62) + 11] {
            for g in [1u64, 2, 1000, 4_000_000_000, u32::MAX as u64 * 4] {
                assert_eq!(andrica_holds_exact(p, g), gap_form_holds_exact(p, g));
            }
        }
    }

    #[test]
    fn avg_monotone_first_violation_at_4() {
        let out = check_claim(ClaimId::AvgMonotone, 100).unwrap();
        let first = out.first_violation.unwrap();
        assert_eq!(first.n, 4);
        assert!((first.lhs - 0.475602806995576200078311).abs() < 1e-12);
        assert!((first.rhs - 0.410512582897165180566642).abs() < 1e-12);
        // 24 records for primes <= 100; comparisons run for n = 3..=24
        assert_eq!(out.checked_n, 22);
        assert_eq!(out.violations, 8); // n = 4, 6, 8, 9, 11, 15, 16, 24
    }

    #[test]
    fn h_lt_avg_fails_at_1_by_equality_and_2_strictly() {
        let out = check_claim(ClaimId::HLtAvg, 100).unwrap();
        let first = out.first_violation.unwrap();
        assert_eq!(first.n, 1, "the one-record average equals h_1 exactly");
        assert_eq!(first.lhs, first.rhs);

        let out3 = check_claim(ClaimId::HLtAvg, 5).unwrap();
        assert_eq!(out3.violations, 2); // n = 1 (equality) and n = 2 (strict)
        let h2 = 0.504017169930912402881727; // sqrt 5 - sqrt 3
        let hbar2 = 0.410927207563347323803742; // (sqrt 5 - sqrt 2)/2
        let recs: Vec<_> = gap_records(5).unwrap().collect();
        assert!((recs[1].h - h2).abs() < 1e-15);
        assert!(recs[1].h > hbar2);
    }

    #[test]
    fn gap_lt_2ln_violation_set_limit_100() {
        let out = check_claim(ClaimId::GapLt2Ln, 100).unwrap();
        assert_eq!(out.first_violation.unwrap().n, 1);
        assert_eq!(out.violations, 10); // n = 1, 2, 4, 6, 9, 11, 15, 16, 18, 24
        assert_eq!(out.checked_n, 24);
        // n = 1: 1 < 2 ln 1 = 0 is false
        let first = out.first_violation.unwrap();
        assert_eq!(first.lhs, 1.0);
        assert_eq!(first.rhs, 0.0);
    }

    #[test]
    fn verify_all_matches_individual_runs() {
        let all = verify_all(10_000).unwrap();
        assert_eq!(all.len(), LEDGER.len());
        for id in LEDGER {
            let single = check_claim(id, 10_000).unwrap();
            assert_eq!(outcome(&all, id), &single, "{id}");
        }
    }

    #[test]
    fn verify_all_expected_statuses_at_10k() {
        let all = verify_all(10_000).unwrap();
        for id in [ClaimId::Andrica, ClaimId::AndricaGapForm, ClaimId::AvgInUnit] {
            assert_eq!(outcome(&all, id).violations, 0, "{id}");
        }
        for id in [ClaimId::AvgMonotone, ClaimId::HLtAvg, ClaimId::GapLt2Ln] {
            assert!(outcome(&all, id).violations > 0, "{id}");
        }
        // band applies from n = 1000; pi(1e4) = 1229 so some rows are checked
        let band = outcome(&all, ClaimId::AvgAsymptotic);
        assert!(band.checked_n > 0);
        assert_eq!(band.violations, 0);
        assert_eq!(band.band, Some(DEFAULT_BAND));
    }

    #[test]
    fn minimal_limit_checks_each_claim_once_where_defined() {
        let all = verify_all(3).unwrap();
        for o in &all {
            match o.claim {
                ClaimId::AvgMonotone | ClaimId::AvgAsymptotic => assert_eq!(o.checked_n, 0),
                _ => assert_eq!(o.checked_n, 1),
            }
        }
    }

    #[test]
    fn andrica_and_gap_form_have_identical_violation_sets() {
        let all = verify_all(100_000).unwrap();
        let a = outcome(&all, ClaimId::Andrica);
        let b = outcome(&all, ClaimId::AndricaGapForm);
        assert_eq!(a.violations, b.violations);
        assert_eq!(
            a.first_violation.map(|f| f.n),
            b.first_violation.map(|f| f.n)
        );
    }

    #[test]
    fn catalog_is_complete_and_typed() {
        let catalog = claim_catalog();
        assert_eq!(catalog.len(), LEDGER.len());
        assert_eq!(
            expected_status(ClaimId::Andrica),
            ExpectedStatus::HoldsAtDeskScale
        );
        assert_eq!(
            expected_status(ClaimId::AvgMonotone),
            ExpectedStatus::FailsWithCounterexamples
        );
        assert_eq!(
            expected_status(ClaimId::AvgAsymptotic),
            ExpectedStatus::BandCheck
        );
        assert!(!ExpectedStatus::FailsWithCounterexamples.expected_true());
        assert!(ExpectedStatus::HoldsAtDeskScale.expected_true());
    }

    #[test]
    fn claim_names_round_trip() {
        for id in LEDGER {
            assert_eq!(ClaimId::from_str(id.name()).unwrap(), id);
        }
        assert!(matches!(
            ClaimId::from_str("NOT_A_CLAIM"),
            Err(Error::UnknownClaim(_))
        ));
        assert!(matches!(
            ClaimId::from_str("GENERALIZED"),
            Err(Error::UnknownClaim(_))
        ));
    }

    #[test]
    fn engine_rejects_generalized_tag() {
        assert!(matches!(
            ClaimEngine::new(&[ClaimId::Generalized], DEFAULT_BAND),
            Err(Error::UnknownClaim(_))
        ));
    }

    #[test]
    fn json_shape_of_outcome() {
        let out = check_claim(ClaimId::GapLt2Ln, 100).unwrap();
        let json = serde_json::to_value(&out).unwrap();
        assert_eq!(json["claim"], "GAP_LT_2LN");
        assert!(json["first_violation"]["n"].is_u64());
        assert!(json.get("band").is_none());
        let clean = check_claim(ClaimId::Andrica, 100).unwrap();
        let json = serde_json::to_value(&clean).unwrap();
        assert!(json["first_violation"].is_null());
    }

    #[test]
    fn running_maxima_shrink_toward_zero() {
        // restatement of h_n -> 0: the record over [N, 2N] sits strictly
        // below the record over [1, N) for N = 1e3, 1e4, 1e5
        let recs: Vec<GapRecord> = gap_records(3_000_000).unwrap().collect();
        for scale in [1000usize, 10_000, 100_000] {
            let before: f64 = recs[..scale - 1].iter().map(|r| r.h).fold(0.0, f64::max);
            let window: f64 = recs[scale - 1..2 * scale]
                .iter()
                .map(|r| r.h)
                .fold(0.0, f64::max);
            assert!(window < before, "N = {scale}: {window} !< {before}");
        }
    }
}
