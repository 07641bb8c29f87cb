//! Gap records, Andrica values, running statistics, and record tracking over
//! the prime stream.
//!
//! The Andrica value h_n = sqrt(p_{n+1}) - sqrt(p_n) is never computed as a
//! difference of square roots: near 10^16 that loses ~8 digits to
//! cancellation. It is always evaluated as g_n / (sqrt(p_{n+1}) + sqrt(p_n)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{sqrt_u64, KahanSum};
use crate::sieve::{PrimeEntry, PrimeStream, SegmentPlan};

/// One consecutive-prime pair with its integer gap and Andrica value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    /// 1-based gap index; record n pairs p_n with p_{n+1}.
    pub n: u64,
    pub p_n: u64,
    pub p_next: u64,
    /// g_n = p_{n+1} - p_n, exact.
    pub g: u64,
    /// h_n = sqrt(p_{n+1}) - sqrt(p_n), cancellation-free evaluation.
    pub h: f64,
}

impl GapRecord {
    pub fn new(n: u64, p_n: u64, p_next: u64) -> Self {
        debug_assert!(p_next > p_n);
        let g = p_next - p_n;
        let h = g as f64 / (sqrt_u64(p_next) + sqrt_u64(p_n));
        Self { n, p_n, p_next, g, h }
    }
}

/// The Andrica value for one pair of primes `q > p >= 2`.
///
/// Evaluates `(q - p) / (sqrt q + sqrt p)`, algebraically equal to
/// `sqrt q - sqrt p` but stable for nearby arguments.
pub fn h_value(p: u64, q: u64) -> Result<f64> {
    if q <= p || p < 2 {
        return Err(Error::ArgumentOrder { p, q });
    }
    Ok((q - p) as f64 / (sqrt_u64(q) + sqrt_u64(p)))
}

/// Adapter turning an ordered prime stream into gap records.
pub struct GapRecords<I> {
    primes: I,
    prev: Option<(u64, u64)>,
}

impl<I: Iterator<Item = PrimeEntry>> GapRecords<I> {
    /// Records start at n = 1 with the pair (2, 3).
    pub fn new(primes: I) -> Self {
        Self { primes, prev: None }
    }

    /// Continue a stream mid-range: the next record pairs `last_prime` (whose
    /// 1-based prime index is `last_index`) with the first incoming prime.
    pub fn resume(primes: I, last_index: u64, last_prime: u64) -> Self {
        Self { primes, prev: Some((last_index, last_prime)) }
    }
}

impl<I: Iterator<Item = PrimeEntry>> Iterator for GapRecords<I> {
    type Item = GapRecord;

    fn next(&mut self) -> Option<GapRecord> {
        loop {
            let entry = self.primes.next()?;
            match self.prev.replace((entry.index, entry.value)) {
                Some((n, p)) => return Some(GapRecord::new(n, p, entry.value)),
                None => continue,
            }
        }
    }
}

/// One record per consecutive prime pair with `p_{n+1} <= limit`.
pub fn gap_records(limit: u64) -> Result<GapRecords<PrimeStream>> {
    if limit < 3 {
        return Err(Error::Domain(format!(
            "gap_records requires limit >= 3, got {limit}"
        )));
    }
    let stream = crate::sieve::prime_stream(limit, SegmentPlan::whole(limit))?;
    Ok(GapRecords::new(stream))
}

/// Running sums and averages after each record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunningStats {
    pub n: u64,
    /// Exact integer gap sum; telescopes to p_{n+1} - 2.
    pub sum_g: u64,
    /// Compensated Andrica sum; telescopes to sqrt(p_{n+1}) - sqrt(2).
    pub sum_h: KahanSum,
    pub g_bar: f64,
    pub h_bar: f64,
}

/// Sequential fold maintaining the running statistics with per-record
/// verification of the two telescoping identities and the unit-interval
/// bound on the running average.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsAccumulator {
    n: u64,
    sum_g: u64,
    sum_h: KahanSum,
    h_tolerance: f64,
}

impl StatsAccumulator {
    /// `h_tolerance` is the allowed relative drift between the compensated
    /// h-sum and its telescoped closed form.
    pub fn new(h_tolerance: f64) -> Self {
        Self { n: 0, sum_g: 0, sum_h: KahanSum::new(), h_tolerance }
    }

    pub fn from_parts(n: u64, sum_g: u64, sum_h: KahanSum, h_tolerance: f64) -> Self {
        Self { n, sum_g, sum_h, h_tolerance }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sum_g(&self) -> u64 {
        self.sum_g
    }

    pub fn sum_h(&self) -> KahanSum {
        self.sum_h
    }

    pub fn h_bar(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum_h.sum() / self.n as f64
        }
    }

    /// Fold in record `n`; errors on a skipped index, a broken telescoping
    /// identity, or a running average escaping (0, 1).
    pub fn update(&mut self, rec: &GapRecord) -> Result<RunningStats> {
        if rec.n != self.n + 1 {
            return Err(Error::Contiguity { expected: self.n + 1, got: rec.n });
        }
        self.n = rec.n;
        self.sum_g += rec.g;
        self.sum_h.add(rec.h);

        if self.sum_g + 2 != rec.p_next {
            return Err(Error::Invariant {
                n: rec.n,
                detail: format!(
                    "integer telescoping broke: sum_g + 2 = {} but p_next = {}",
                    self.sum_g + 2,
                    rec.p_next
                ),
            });
        }
        let sqrt_next = sqrt_u64(rec.p_next);
        let drift =
            (self.sum_h.sum() + std::f64::consts::SQRT_2 - sqrt_next).abs() / sqrt_next;
        if drift > self.h_tolerance {
            return Err(Error::Invariant {
                n: rec.n,
                detail: format!(
                    "h-sum drifted {drift:e} from sqrt(p_next) - sqrt(2), tolerance {:e}",
                    self.h_tolerance
                ),
            });
        }
        let n = rec.n as f64;
        let h_bar = self.sum_h.sum() / n;
        if !(h_bar > 0.0 && h_bar < 1.0) {
            return Err(Error::Invariant {
                n: rec.n,
                detail: format!("running average h_bar = {h_bar} left (0, 1)"),
            });
        }
        Ok(RunningStats {
            n: rec.n,
            sum_g: self.sum_g,
            sum_h: self.sum_h,
            g_bar: self.sum_g as f64 / n,
            h_bar,
        })
    }
}

/// Iterator adapter emitting [`RunningStats`] after each record of a
/// contiguous stream starting at n = 1.
pub fn running_stats<I>(records: I) -> impl Iterator<Item = Result<RunningStats>>
where
    I: IntoIterator<Item = GapRecord>,
{
    let mut acc = StatsAccumulator::new(1e-12);
    records.into_iter().map(move |rec| acc.update(&rec))
}

/// Record (maximal) gap and Andrica-value events, plus the count of records
/// with h below one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordTracker {
    /// (n, g) whenever g exceeds every earlier gap.
    pub max_g_events: Vec<(u64, u64)>,
    /// (n, h) whenever h exceeds every earlier Andrica value.
    pub max_h_events: Vec<(u64, f64)>,
    pub count_h_below_one: u64,
    pub total: u64,
}

impl RecordTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, rec: &GapRecord) {
        self.total += 1;
        if rec.h < 1.0 {
            self.count_h_below_one += 1;
        }
        if self.max_g_events.last().is_none_or(|&(_, g)| rec.g > g) {
            self.max_g_events.push((rec.n, rec.g));
        }
        if self.max_h_events.last().is_none_or(|&(_, h)| rec.h > h) {
            self.max_h_events.push((rec.n, rec.h));
        }
    }
}

/// Consume a contiguous record stream (from n = 1) into a tracker.
pub fn records<I>(stream: I) -> Result<RecordTracker>
where
    I: IntoIterator<Item = GapRecord>,
{
    let mut tracker = RecordTracker::new();
    for (i, rec) in stream.into_iter().enumerate() {
        let expected = i as u64 + 1;
        if rec.n != expected {
            return Err(Error::Contiguity { expected, got: rec.n });
        }
        tracker.observe(&rec);
    }
    Ok(tracker)
}

/// Fraction of observed records with h_n < 1.
pub fn fraction_below_one(tracker: &RecordTracker) -> Result<f64> {
    if tracker.total == 0 {
        return Err(Error::EmptyTracker);
    }
    Ok(tracker.count_h_below_one as f64 / tracker.total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ulp_distance;

    const H1: f64 = 0.317837245195782244725757617296; // sqrt 3 - sqrt 2
    const H4: f64 = 0.670873479290809258613317; // sqrt 11 - sqrt 7

    #[test]
    fn first_records_match_small_primes() {
        let recs: Vec<_> = gap_records(12).unwrap().collect();
        assert_eq!(recs.len(), 4);
        let expected = [(1, 2, 3, 1), (2, 3, 5, 2), (3, 5, 7, 2), (4, 7, 11, 4)];
        for (rec, (n, p, q, g)) in recs.iter().zip(expected) {
            assert_eq!((rec.n, rec.p_n, rec.p_next, rec.g), (n, p, q, g));
        }
        assert!((recs[3].h - H4).abs() < 1e-15);
    }

    #[test]
    fn single_record_at_limit_three() {
        let recs: Vec<_> = gap_records(3).unwrap().collect();
        assert_eq!(recs.len(), 1);
        assert_eq!((recs[0].n, recs[0].p_n, recs[0].p_next, recs[0].g), (1, 2, 3, 1));
        assert!((recs[0].h - H1).abs() < 1e-15);
    }

    #[test]
    fn limit_below_three_rejected() {
        assert!(matches!(gap_records(2), Err(Error::Domain(_))));
    }

    #[test]
    fn h_value_known_pairs() {
        assert!((h_value(2, 3).unwrap() - H1).abs() < 1e-15);
        assert!((h_value(7, 11).unwrap() - H4).abs() < 1e-15);
    }

    #[test]
    fn h_value_rejects_bad_order() {
        assert!(matches!(h_value(7, 7), Err(Error::ArgumentOrder { .. })));
        assert!(matches!(h_value(11, 7), Err(Error::ArgumentOrder { .. })));
        assert!(matches!(h_value(1, 5), Err(Error::ArgumentOrder { .. })));
    }

    #[test]
    fn gap_parity_structure() {
        for rec in gap_records(100_000).unwrap() {
            if rec.n == 1 {
                assert_eq!(rec.g, 1);
            } else {
                assert_eq!(rec.g % 2, 0, "odd gap at n = {}", rec.n);
            }
        }
    }

    #[test]
    fn identity_reconstructs_gap() {
        for rec in gap_records(100_000).unwrap() {
            let rebuilt = rec.h * (sqrt_u64(rec.p_next) + sqrt_u64(rec.p_n));
            assert!(
                ulp_distance(rebuilt, rec.g as f64) <= 4,
                "n = {}: {} vs {}",
                rec.n,
                rebuilt,
                rec.g
            );
        }
    }

    #[test]
    fn running_stats_first_rows() {
        let rows: Vec<_> = running_stats(gap_records(12).unwrap())
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(rows.len(), 4);
        // after n = 1 the average equals the single element
        assert_eq!(rows[0].h_bar, rows[0].sum_h.sum());
        // after n = 4: sum_g = 9 = p_5 - 2 and g_bar = 2.25
        assert_eq!(rows[3].sum_g, 9);
        assert_eq!(rows[3].g_bar, 2.25);
        assert!((rows[3].h_bar - 0.475602806995576200078311).abs() < 1e-15);
    }

    #[test]
    fn telescoping_exact_and_relative() {
        let mut acc = StatsAccumulator::new(1e-12);
        for rec in gap_records(1_000_000).unwrap() {
            let stats = acc.update(&rec).unwrap();
            assert_eq!(stats.sum_g + 2, rec.p_next);
        }
    }

    #[test]
    fn skipped_index_is_contiguity_error() {
        let mut acc = StatsAccumulator::new(1e-12);
        acc.update(&GapRecord::new(1, 2, 3)).unwrap();
        let err = acc.update(&GapRecord::new(3, 5, 7)).unwrap_err();
        assert!(matches!(err, Error::Contiguity { expected: 2, got: 3 }));
    }

    #[test]
    fn tracker_records_limit_12() {
        let tracker = records(gap_records(12).unwrap()).unwrap();
        assert_eq!(tracker.max_g_events, vec![(1, 1), (2, 2), (4, 4)]);
        let ns: Vec<u64> = tracker.max_h_events.iter().map(|&(n, _)| n).collect();
        assert_eq!(ns, vec![1, 2, 4]);
        assert_eq!(tracker.total, 4);
        assert_eq!(tracker.count_h_below_one, 4);
    }

    #[test]
    fn max_h_record_stands_at_n4_to_10k() {
        let tracker = records(gap_records(10_000).unwrap()).unwrap();
        let &(n, h) = tracker.max_h_events.last().unwrap();
        assert_eq!(n, 4);
        assert!((h - H4).abs() < 1e-15);
    }

    #[test]
    fn record_events_strictly_increasing() {
        let tracker = records(gap_records(200_000).unwrap()).unwrap();
        for w in tracker.max_g_events.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
        for w in tracker.max_h_events.windows(2) {
            assert!(w[0].0 < w[1].0 && w[0].1 < w[1].1);
        }
    }

    #[test]
    fn fraction_below_one_cases() {
        let tracker = records(gap_records(3).unwrap()).unwrap();
        assert_eq!(tracker.total, 1);
        assert_eq!(fraction_below_one(&tracker).unwrap(), 1.0);

        let synthetic = RecordTracker {
            count_h_below_one: 1,
            total: 2,
            ..RecordTracker::default()
        };
        assert_eq!(fraction_below_one(&synthetic).unwrap(), 0.5);

        assert!(matches!(
            fraction_below_one(&RecordTracker::new()),
            Err(Error::EmptyTracker)
        ));
    }

    #[test]
    fn resume_matches_uninterrupted() {
        let full: Vec<_> = gap_records(50_000).unwrap().collect();
        let cut = 25_013u64; // prime
        let head: Vec<_> = full.iter().filter(|r| r.p_next <= cut).cloned().collect();
        let last = head.last().unwrap();
        let rest = PrimeStream::over_range(
            last.p_next + 1,
            50_000,
            crate::sieve::DEFAULT_SEGMENT_SIZE,
            1,
            last.n + 1,
        )
        .unwrap();
        let tail: Vec<_> = GapRecords::resume(rest, last.n + 1, last.p_next).collect();
        let mut joined = head;
        joined.extend(tail);
        assert_eq!(joined, full);
    }
}
