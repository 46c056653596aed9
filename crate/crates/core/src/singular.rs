//! The prime-pair singular series
//!
//! ```text
//! 𝔖₂(Δ) = 2·C₂·∏_{p | Δ, p > 2} (p − 1)/(p − 2)   for even Δ,   0 for odd Δ,
//! C₂    = ∏_{p > 2} (1 − 1/(p − 1)²),
//! ```
//!
//! its average over differences of a lacunary set, and direct prime-pair
//! counts in short intervals set against the upper-bound-sieve shape
//! `h/(log h)²·𝔖₂(Δ) + 1`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lacunary::LacunarySet;
use crate::par;
use crate::primes::{distinct_prime_factors, map_chunks, sieve_segment, DEFAULT_SEGMENT_LIMIT};

/// Truncation point giving a certified tail bound of `2/P = 10⁻⁸`.
pub const DEFAULT_TWIN_PRIME_BOUND: u64 = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwinPrimeConstant {
    pub value: f64,
    /// Largest prime bound `P` included in the product.
    pub truncation_bound: u64,
    /// Upper bound on `value − C₂`.
    pub tail_bound: f64,
}

/// `∏_{2 < p <= P} (1 − 1/(p − 1)²)`.
///
/// The omitted factors satisfy `1 >= ∏_{p>P}(1 − u_p) >= 1 − Σ_{p>P} u_p`
/// and `Σ_{p>P} 1/(p − 1)² <= 2/P`, so the truncation overshoots the full
/// product by at most `2/P`.
pub fn twin_prime_constant(bound: u64) -> Result<TwinPrimeConstant> {
    if bound < 1000 {
        return Err(Error::arg(format!(
            "prime bound P = {bound} must be at least 1000"
        )));
    }
    let partials = map_chunks(3, bound + 1, |seg| {
        seg.primes().fold(1.0f64, |acc, p| {
            let q = (p - 1) as f64;
            acc * (1.0 - 1.0 / (q * q))
        })
    });
    let value = partials.into_iter().product();
    Ok(TwinPrimeConstant {
        value,
        truncation_bound: bound,
        tail_bound: 2.0 / bound as f64,
    })
}

static DEFAULT_C2: OnceLock<TwinPrimeConstant> = OnceLock::new();

/// `C₂` at [`DEFAULT_TWIN_PRIME_BOUND`], computed once per process.
pub fn default_twin_prime_constant() -> TwinPrimeConstant {
    *DEFAULT_C2.get_or_init(|| {
        twin_prime_constant(DEFAULT_TWIN_PRIME_BOUND).expect("default bound is valid")
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularValue {
    pub delta: i64,
    pub value: f64,
}

/// `∏_{p | Δ, p > 2} (p − 1)/(p − 2)`.
fn odd_prime_factor_weight(delta: u64) -> f64 {
    distinct_prime_factors(delta)
        .into_iter()
        .filter(|&p| p > 2)
        .map(|p| (p - 1) as f64 / (p - 2) as f64)
        .product()
}

/// `𝔖₂(Δ)` with the default `C₂`. `Δ = 0` is rejected.
pub fn singular_series(delta: i64) -> Result<SingularValue> {
    singular_series_with(delta, default_twin_prime_constant().value)
}

pub fn singular_series_with(delta: i64, c2: f64) -> Result<SingularValue> {
    if delta == 0 {
        return Err(Error::arg("singular series is undefined at shift 0"));
    }
    let abs = delta.unsigned_abs();
    let value = if abs % 2 == 1 {
        0.0
    } else {
        2.0 * c2 * odd_prime_factor_weight(abs)
    };
    Ok(SingularValue { delta, value })
}

/// `Σ μ²(d)/d` over odd `d | Δ` with `P⁺(d) < threshold`, taking `P⁺(1) = 1`.
///
/// Evaluated as `∏ (1 + 1/p)` over the odd primes `p | Δ` below the threshold.
pub fn small_prime_divisor_sum(delta: u64, threshold: f64) -> Result<f64> {
    if delta == 0 {
        return Err(Error::arg("divisor sum needs delta >= 1"));
    }
    if threshold <= 1.0 {
        return Ok(0.0);
    }
    Ok(distinct_prime_factors(delta)
        .into_iter()
        .filter(|&p| p > 2 && (p as f64) < threshold)
        .map(|p| 1.0 + 1.0 / p as f64)
        .product())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceAverage {
    /// Number of unordered pairs `a₁ < a₂`.
    pub pairs: usize,
    /// `Σ_{a₁ ≠ a₂} 𝔖₂(a₁ − a₂)` over ordered pairs.
    pub total: f64,
    /// `total / (ln X)²`.
    pub normalized: f64,
    /// `Σ_{a₁ < a₂}` of the small-prime divisor sum of `a₂ − a₁` at threshold `ln 2X`.
    pub divisor_sum_aggregate: f64,
}

pub fn average_over_differences(set: &LacunarySet) -> Result<DifferenceAverage> {
    average_over_differences_with(set, default_twin_prime_constant().value)
}

pub fn average_over_differences_with(set: &LacunarySet, c2: f64) -> Result<DifferenceAverage> {
    if set.len() < 2 {
        return Err(Error::arg(format!(
            "need at least two elements, set has {}",
            set.len()
        )));
    }
    let threshold = (2.0 * set.scale() as f64).ln();
    let diffs: Vec<u64> = set.differences().collect();
    let terms = par::map(&diffs, |&d| -> Result<(f64, f64)> {
        let delta =
            i64::try_from(d).map_err(|_| Error::arg(format!("difference {d} exceeds i64")))?;
        Ok((
            singular_series_with(delta, c2)?.value,
            small_prime_divisor_sum(d, threshold)?,
        ))
    });
    let (mut unordered, mut aggregate) = (0.0, 0.0);
    for t in terms {
        let (s, a) = t?;
        unordered += s;
        aggregate += a;
    }
    let total = 2.0 * unordered;
    let log_x = (set.scale() as f64).ln();
    Ok(DifferenceAverage {
        pairs: diffs.len(),
        total,
        normalized: total / (log_x * log_x),
        divisor_sum_aggregate: aggregate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    pub count: u64,
    pub prediction: f64,
    pub ratio: f64,
}

/// `#{y < m <= y + h : m and m + Δ both prime}` against `h/(ln h)²·𝔖₂(Δ) + 1`.
pub fn pair_count_vs_prediction(y: u64, h: u64, delta: i64) -> Result<PairCount> {
    if h < 2 {
        return Err(Error::arg(format!(
            "window length h = {h} must be at least 2"
        )));
    }
    if delta == 0 {
        return Err(Error::arg(
            "shift 0 is the diagonal; count single primes instead",
        ));
    }
    let top = y
        .checked_add(h)
        .and_then(|t| t.checked_add(delta.unsigned_abs()))
        .filter(|&t| t < u64::MAX / 2)
        .ok_or_else(|| Error::arg("window exceeds 64-bit range"))?;
    debug_assert!(top > y);

    let step = DEFAULT_SEGMENT_LIMIT;
    let mut count = 0u64;
    let mut lo = y + 1;
    let end = y + h + 1;
    while lo < end {
        let hi = (lo + step).min(end);
        let base = sieve_segment(lo, hi)?;
        // shifted range [lo + Δ, hi + Δ) clipped at 0
        let s_lo = lo.saturating_add_signed(delta);
        let s_hi = hi.saturating_add_signed(delta);
        if s_hi > s_lo {
            let shifted = sieve_segment(s_lo, s_hi)?;
            count += base
                .primes()
                .filter(|&m| {
                    m.checked_add_signed(delta)
                        .is_some_and(|t| t >= s_lo && shifted.is_prime(t))
                })
                .count() as u64;
        }
        lo = hi;
    }

    let log_h = (h as f64).ln();
    let prediction = h as f64 / (log_h * log_h) * singular_series(delta)?.value + 1.0;
    Ok(PairCount {
        count,
        prediction,
        ratio: count as f64 / prediction,
    })
}
