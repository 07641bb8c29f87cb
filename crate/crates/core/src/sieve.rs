//! Segmented sieve of Eratosthenes producing indexed primes over large
//! ranges with bounded memory.
//!
//! The sieve is odd-only: each segment packs one bit per odd candidate, so a
//! segment of 2^16 candidates occupies 8 KiB and stays cache-resident.
//! Segments may be sieved in parallel; delivery is always in ascending order.

use std::collections::VecDeque;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of odd candidates per segment (span of 2^17 integers).
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 16;

/// Default memory budget for operations that collect all primes (4 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

/// An indexed prime: `index` is 1-based, so index 1 maps to value 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeEntry {
    pub index: u64,
    pub value: u64,
}

/// A tiling of the inclusive range `[lo, hi]` into fixed-width segments.
///
/// `segment_size` counts odd candidates per segment, so each tile spans
/// `2 * segment_size` integers. Tiles never overlap and never leave gaps;
/// an empty range (`hi < lo`) tiles to nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentPlan {
    pub lo: u64,
    pub hi: u64,
    pub segment_size: usize,
}

impl SegmentPlan {
    pub fn new(lo: u64, hi: u64, segment_size: usize) -> Result<Self> {
        if segment_size == 0 {
            return Err(Error::Domain("segment_size must be positive".into()));
        }
        Ok(Self { lo, hi, segment_size })
    }

    /// Plan covering `[2, limit]` with the default segment size.
    pub fn whole(limit: u64) -> Self {
        Self { lo: 2, hi: limit, segment_size: DEFAULT_SEGMENT_SIZE }
    }

    /// Integer span of one segment.
    fn span(&self) -> u64 {
        2 * self.segment_size as u64
    }

    /// Inclusive integer tiles covering `[lo, hi]`.
    pub fn tiles(&self) -> Vec<(u64, u64)> {
        let mut tiles = Vec::new();
        if self.hi < self.lo {
            return tiles;
        }
        let mut a = self.lo;
        loop {
            let b = a.saturating_add(self.span() - 1).min(self.hi);
            tiles.push((a, b));
            if b == self.hi {
                break;
            }
            a = b + 1;
        }
        tiles
    }
}

/// Simple odd-only sieve used for base primes up to `limit` (inclusive).
fn simple_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = ((limit - 3) / 2 + 1) as usize; // candidates 3, 5, 7, ...
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 0..n {
        if composite[i] {
            continue;
        }
        let p = 3 + 2 * i as u64;
        primes.push(p);
        let mut m = p * p;
        while m <= limit {
            composite[((m - 3) / 2) as usize] = true;
            m += 2 * p;
        }
    }
    primes
}

/// Sieve the odd primes inside the inclusive integer range `[lo, hi]`.
///
/// `base` must contain every odd prime `<= isqrt(hi)`.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let start = lo.max(3) | 1; // first odd candidate
    if start > hi {
        return Vec::new();
    }
    let nbits = ((hi - start) / 2 + 1) as usize;
    let mut mask = vec![0u64; nbits.div_ceil(64)];

    for &p in base {
        let p2 = match p.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
        if p2 > hi {
            break;
        }
        // first odd multiple of p that is >= max(p^2, start)
        let mut m = p2.max(start.div_ceil(p) * p);
        if m.is_multiple_of(2) {
            m += p;
        }
        while m <= hi {
            let bit = ((m - start) / 2) as usize;
            mask[bit / 64] |= 1 << (bit % 64);
            m += 2 * p;
        }
    }

    let mut out = Vec::with_capacity(nbits / 8);
    for (w, &word) in mask.iter().enumerate() {
        let mut unset = !word;
        if w == mask.len() - 1 && !nbits.is_multiple_of(64) {
            unset &= (1u64 << (nbits % 64)) - 1;
        }
        while unset != 0 {
            let bit = unset.trailing_zeros() as usize;
            unset &= unset - 1;
            out.push(start + 2 * (w * 64 + bit) as u64);
        }
    }
    out
}

/// Ordered stream of indexed primes over a range, sieved segment by segment.
///
/// With `parallelism > 1`, batches of segments are sieved concurrently and
/// then delivered in ascending order, so output is identical regardless of
/// the thread count.
pub struct PrimeStream {
    tiles: Vec<(u64, u64)>,
    base: Arc<Vec<u64>>,
    parallelism: usize,
    pool: Option<rayon::ThreadPool>,
    next_tile: usize,
    buf: VecDeque<u64>,
    index: u64,
}

impl PrimeStream {
    /// Stream the primes in `[lo, hi]`, assigning indices `start_index + 1, ...`.
    ///
    /// The caller asserts that exactly `start_index` primes exist below `lo`.
    pub fn over_range(
        lo: u64,
        hi: u64,
        segment_size: usize,
        parallelism: usize,
        start_index: u64,
    ) -> Result<Self> {
        let plan = SegmentPlan::new(lo, hi, segment_size)?;
        let base = if hi >= 9 { simple_odd_primes(hi.isqrt()) } else { Vec::new() };
        let mut buf = VecDeque::new();
        if lo <= 2 && hi >= 2 {
            buf.push_back(2);
        }
        let parallelism = parallelism.max(1);
        let pool = if parallelism > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(parallelism)
                    .build()
                    .map_err(|e| Error::Domain(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Self {
            tiles: plan.tiles(),
            base: Arc::new(base),
            parallelism,
            pool,
            next_tile: 0,
            buf,
            index: start_index,
        })
    }

    fn refill(&mut self) {
        if self.next_tile >= self.tiles.len() {
            return;
        }
        let batch = if self.parallelism > 1 { self.parallelism * 2 } else { 1 };
        let end = (self.next_tile + batch).min(self.tiles.len());
        let tiles = &self.tiles[self.next_tile..end];
        if let Some(pool) = self.pool.as_ref().filter(|_| tiles.len() > 1) {
            let base = Arc::clone(&self.base);
            let chunks: Vec<Vec<u64>> = pool.install(|| {
                tiles
                    .par_iter()
                    .map(|&(a, b)| sieve_segment(a, b, &base))
                    .collect()
            });
            for chunk in chunks {
                self.buf.extend(chunk);
            }
        } else {
            for &(a, b) in tiles {
                self.buf.extend(sieve_segment(a, b, &self.base));
            }
        }
        self.next_tile = end;
    }
}

impl Iterator for PrimeStream {
    type Item = PrimeEntry;

    fn next(&mut self) -> Option<PrimeEntry> {
        while self.buf.is_empty() && self.next_tile < self.tiles.len() {
            self.refill();
        }
        let value = self.buf.pop_front()?;
        self.index += 1;
        Some(PrimeEntry { index: self.index, value })
    }
}

/// All primes `<= limit`, in increasing order with 1-based indices.
pub fn primes_up_to(limit: u64) -> Result<Vec<PrimeEntry>> {
    primes_up_to_bounded(limit, DEFAULT_MEMORY_BUDGET)
}

/// As [`primes_up_to`] but refusing to collect past a memory budget in bytes.
pub fn primes_up_to_bounded(limit: u64, budget: u64) -> Result<Vec<PrimeEntry>> {
    let needed = estimated_prime_count(limit)
        .saturating_mul(std::mem::size_of::<PrimeEntry>() as u64);
    if needed > budget {
        return Err(Error::ResourceLimit { limit, needed, budget });
    }
    let stream = prime_stream(limit, SegmentPlan::whole(limit))?;
    Ok(stream.collect())
}

/// Generous overestimate of pi(limit) used for budgeting allocations.
fn estimated_prime_count(limit: u64) -> u64 {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.3 * x / x.ln()) as u64
}

/// The n-th prime (1-based): `nth_prime(1) = 2`.
///
/// For n >= 6 the sieve window is sized by the explicit upper bound
/// `n (ln n + ln ln n)`; below 6 a literal table answers directly.
pub fn nth_prime(n: u64) -> Result<u64> {
    const SMALL: [u64; 5] = [2, 3, 5, 7, 11];
    if n == 0 {
        return Err(Error::Domain("nth_prime requires n >= 1".into()));
    }
    if n <= 5 {
        return Ok(SMALL[(n - 1) as usize]);
    }
    let nf = n as f64;
    let bound = nf * (nf.ln() + nf.ln().ln());
    if !bound.is_finite() || bound >= u64::MAX as f64 {
        return Err(Error::Overflow(format!(
            "upper bound for p_{n} exceeds the 64-bit range"
        )));
    }
    let limit = bound.ceil() as u64;
    let stream = PrimeStream::over_range(2, limit, DEFAULT_SEGMENT_SIZE, 1, 0)?;
    for entry in stream {
        if entry.index == n {
            return Ok(entry.value);
        }
    }
    Err(Error::Invariant {
        n,
        detail: format!("sieve window {limit} did not reach p_{n}"),
    })
}

/// Exact count of primes `<= x`.
pub fn prime_count(x: u64) -> Result<u64> {
    let stream = PrimeStream::over_range(2, x, DEFAULT_SEGMENT_SIZE, 1, 0)?;
    Ok(stream.count() as u64)
}

/// The `x / ln x` approximation to the prime counting function.
pub fn pi_approx(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::Domain(format!("pi_approx requires x > 1, got {x}")));
    }
    Ok(x / x.ln())
}

/// Stream of indexed primes `<= limit` produced under an explicit plan.
///
/// The plan must tile `[2, limit]`: `lo <= 2` and `hi == limit`.
pub fn prime_stream(limit: u64, plan: SegmentPlan) -> Result<PrimeStream> {
    if plan.lo > 2 || plan.hi != limit {
        return Err(Error::PlanMismatch { lo: plan.lo, hi: plan.hi, limit });
    }
    PrimeStream::over_range(plan.lo, plan.hi, plan.segment_size, 1, 0)
}

/// Parallel variant of [`prime_stream`]; output is identical, segments are
/// sieved `parallelism` at a time.
pub fn prime_stream_parallel(
    limit: u64,
    plan: SegmentPlan,
    parallelism: usize,
) -> Result<PrimeStream> {
    if plan.lo > 2 || plan.hi != limit {
        return Err(Error::PlanMismatch { lo: plan.lo, hi: plan.hi, limit });
    }
    PrimeStream::over_range(plan.lo, plan.hi, plan.segment_size, parallelism, 0)
}
