//! Small numeric helpers shared across the crate: exact square roots of
//! 64-bit integers, ulp measurement, and compensated summation.

use serde::{Deserialize, Serialize};

/// Largest integer exactly representable in an `f64` (2^53).
pub const F64_EXACT_MAX: u64 = 1 << 53;

/// Square root of a 64-bit unsigned integer in double precision.
///
/// Below 2^53 the conversion to `f64` is exact and `sqrt` is correctly
/// rounded. Above it, the conversion itself rounds, so one Newton step with
/// a fused multiply-add residual pulls the result back to within ~1 ulp of
/// the true square root.
pub fn sqrt_u64(x: u64) -> f64 {
    let xf = x as f64;
    let y = xf.sqrt();
    if x < F64_EXACT_MAX {
        return y;
    }
    let residual = (-y).mul_add(y, xf);
    y + residual / (2.0 * y)
}

/// True when `x` is a perfect square.
pub fn is_perfect_square(x: u64) -> bool {
    let s = x.isqrt();
    s * s == x
}

/// Distance to the next representable `f64` above `x` (x finite, > 0).
pub fn ulp(x: f64) -> f64 {
    debug_assert!(x.is_finite());
    let a = x.abs();
    a.next_up() - a
}

/// ULP distance between two finite doubles of the same sign.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    let ia = a.to_bits() as i64;
    let ib = b.to_bits() as i64;
    ia.abs_diff(ib)
}

/// Kahan–Neumaier compensated accumulator.
///
/// Keeps the running error term separate so that millions of additions stay
/// within a few ulps of the exact sum. The two fields serialize separately so
/// that a checkpointed sum resumes bit-identically.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct KahanSum {
    value: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(value: f64, compensation: f64) -> Self {
        Self { value, compensation }
    }

    pub fn add(&mut self, x: f64) {
        let s = self.value + x;
        self.compensation += if self.value.abs() >= x.abs() {
            (self.value - s) + x
        } else {
            (x - s) + self.value
        };
        self.value = s;
    }

    pub fn sum(&self) -> f64 {
        self.value + self.compensation
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn compensation(&self) -> f64 {
        self.compensation
    }
}
