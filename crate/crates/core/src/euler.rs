//! Truncated Euler products with a certified tail bound.
//!
//! Each product is evaluated as `exp(Σ_{p ≤ P} log f(p))`. The logs are
//! summed in double-double arithmetic over fixed blocks of primes, so the
//! result does not depend on how the blocks are scheduled.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::arith::primes_up_to;
use crate::error::{Error, Result};

/// Primes per summation block.
const BLOCK: usize = 4096;

/// Smallest accepted prime cutoff; the per-factor bounds assume `p > 5`
/// beyond the cutoff.
pub const MIN_CUTOFF: u64 = 5;

#[derive(Clone, Debug, Serialize)]
pub struct EulerProductValue {
    pub value: f64,
    pub prime_cutoff: u64,
    /// `|true product − value|` is at most this.
    pub tail_bound: f64,
    /// The truncated product as an exact fraction, when requested.
    #[serde(
        serialize_with = "crate::serde_util::opt_rational_str",
        skip_serializing_if = "Option::is_none"
    )]
    pub exact_rational: Option<BigRational>,
}

impl EulerProductValue {
    pub fn interval(&self) -> (f64, f64) {
        (self.value - self.tail_bound, self.value + self.tail_bound)
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.tail_bound
    }
}

/// Bound `|log f(p)| ≤ C p^{−s}` holding for every prime `p > 5`.
#[derive(Clone, Copy, Debug)]
pub struct LogBound {
    pub c: f64,
    pub s: f64,
}

impl LogBound {
    /// `Σ_{p > P} C p^{−s} ≤ C ∫_P^∞ x^{−s} dx = C P^{1−s} / (s − 1)`
    pub fn tail(&self, cutoff: u64) -> f64 {
        self.c * (cutoff as f64).powf(1.0 - self.s) / (self.s - 1.0)
    }
}

fn check_cutoff(cutoff: u64) -> Result<()> {
    if cutoff < MIN_CUTOFF {
        return Err(Error::Domain(format!("prime cutoff must be at least {MIN_CUTOFF}, got {cutoff}")));
    }
    Ok(())
}

/// `Π_{p ≤ cutoff} f(p)` where `log_factor(p)` returns `log f(p)`.
/// `bounds` cover `|log f(p)|` for `p > cutoff`; their tails are added.
pub fn euler_product<F>(cutoff: u64, bounds: &[LogBound], log_factor: F) -> Result<EulerProductValue>
where
    F: Fn(u64) -> f64 + Sync,
{
    check_cutoff(cutoff)?;
    let primes = primes_up_to(cutoff);
    let blocks: Vec<TwoFloat> = primes
        .par_chunks(BLOCK)
        .map(|chunk| chunk.iter().fold(TwoFloat::from(0.0), |acc, &p| acc + log_factor(p)))
        .collect();
    let log_sum = blocks.into_iter().fold(TwoFloat::from(0.0), |a, b| a + b);
    let value = f64::from(log_sum).exp();
    let log_tail: f64 = bounds.iter().map(|b| b.tail(cutoff)).sum();
    // truncation, plus a few ulps for the final exponential
    let tail_bound = value * log_tail.exp_m1() + value.abs() * 4.0 * f64::EPSILON;
    Ok(EulerProductValue {
        value,
        prime_cutoff: cutoff,
        tail_bound,
        exact_rational: None,
    })
}

/// Exact `Π_{p ≤ cutoff} f(p)`.
pub fn exact_product<F>(cutoff: u64, factor: F) -> Result<BigRational>
where
    F: Fn(u64) -> Result<BigRational>,
{
    primes_up_to(cutoff)
        .into_iter()
        .try_fold(BigRational::from_integer(1.into()), |a, p| Ok(a * factor(p)?))
}
