//! The lacunary set built from sums of powers of two with polynomially
//! growing exponents:
//!
//! ```text
//! 2^⌊k_1^{r_1}⌋ + … + 2^⌊k_{s-1}^{r_{s-1}}⌋ + 2^⌊⌊k_s^λ⌋^{r_s}⌋,   k_i ≥ 1,
//! ```
//!
//! where `λ` balances `1/r_1 + … + 1/r_{s-1} + 1/(λ r_s) = 1`. A
//! [`LacunarySet`] is the truncation of this set to `[1, 2X]`, stored sorted
//! and deduplicated.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

/// Absolute tolerance on the balancing identity and on `Σ 1/r_i ≥ 1`.
pub const BALANCE_TOLERANCE: f64 = 1e-12;

/// Floors of real powers closer than this to an integer are rechecked exactly.
const NEAR_INTEGER: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParamViolation {
    #[error("need at least two exponents, got {0}")]
    TooFewExponents(usize),
    #[error("r_{index} = {value} is not a finite real > 1")]
    ExponentNotAboveOne { index: usize, value: f64 },
    #[error("1/r_1 + … + 1/r_(s-1) = {sum} must be < 1")]
    LeadingSumTooLarge { sum: f64 },
    #[error("1/r_1 + … + 1/r_s = {sum} must be >= 1")]
    TotalSumBelowOne { sum: f64 },
    #[error("lambda = {lambda} leaves balance residual {residual}")]
    Unbalanced { lambda: f64, residual: f64 },
}

/// Checks `r_i > 1` and `Σ_{i<s} 1/r_i < 1 <= Σ_{i<=s} 1/r_i`.
pub fn validate_params(r: &[f64]) -> Result<(), ParamViolation> {
    if r.len() < 2 {
        return Err(ParamViolation::TooFewExponents(r.len()));
    }
    if let Some((i, &v)) = r
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 1.0))
    {
        return Err(ParamViolation::ExponentNotAboveOne {
            index: i + 1,
            value: v,
        });
    }
    let leading: f64 = r[..r.len() - 1].iter().map(|v| 1.0 / v).sum();
    if leading >= 1.0 {
        return Err(ParamViolation::LeadingSumTooLarge { sum: leading });
    }
    let total = leading + 1.0 / r[r.len() - 1];
    if total < 1.0 - BALANCE_TOLERANCE {
        return Err(ParamViolation::TotalSumBelowOne { sum: total });
    }
    Ok(())
}

/// `λ = 1 / (r_s (1 - Σ_{i<s} 1/r_i))`.
pub fn solve_lambda(r: &[f64]) -> Result<f64, ParamViolation> {
    validate_params(r)?;
    let leading: f64 = r[..r.len() - 1].iter().map(|v| 1.0 / v).sum();
    let lambda = 1.0 / (r[r.len() - 1] * (1.0 - leading));
    // Σ 1/r_i = 1 up to rounding means λ = 1 exactly.
    Ok(if lambda < 1.0 { 1.0 } else { lambda })
}

fn balance_residual(r: &[f64], lambda: f64) -> f64 {
    let leading: f64 = r[..r.len() - 1].iter().map(|v| 1.0 / v).sum();
    leading + 1.0 / (lambda * r[r.len() - 1]) - 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunaryParams {
    r: Vec<f64>,
    lambda: f64,
}

impl LacunaryParams {
    /// Validates `r` and solves the balancing relation for `λ`.
    pub fn new(r: Vec<f64>) -> Result<Self, ParamViolation> {
        let lambda = solve_lambda(&r)?;
        Ok(LacunaryParams { r, lambda })
    }

    /// Uses a caller-supplied `λ`, which must satisfy the balancing relation.
    pub fn with_lambda(r: Vec<f64>, lambda: f64) -> Result<Self, ParamViolation> {
        validate_params(&r)?;
        let residual = balance_residual(&r, lambda);
        if lambda.is_nan() || lambda <= 0.0 || residual.abs() > BALANCE_TOLERANCE {
            return Err(ParamViolation::Unbalanced { lambda, residual });
        }
        Ok(LacunaryParams { r, lambda })
    }

    pub fn s(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Exponent attached to `k` in coordinate `i` (0-based).
    fn exponent(&self, i: usize, k: u64) -> u64 {
        if i + 1 < self.s() {
            floor_pow(k, self.r[i])
        } else {
            floor_pow(floor_pow(k, self.lambda), self.r[i])
        }
    }

    /// Distinct exponents `e` reachable in coordinate `i` with `e <= max_exp`.
    fn exponents_up_to(&self, i: usize, max_exp: u64) -> Vec<u64> {
        let mut out = Vec::new();
        for k in 1u64.. {
            let e = self.exponent(i, k);
            if e > max_exp {
                break;
            }
            if out.last() != Some(&e) {
                out.push(e);
            }
        }
        out
    }
}

/// `⌊base^exp⌋`, saturating at `u64::MAX`.
///
/// Results within `1e-9` of an integer are rechecked: exactly with big
/// integers when `exp` is a rational with denominator at most 1000, and
/// otherwise by an ulp-scale distance test on the `f64` value.
pub(crate) fn floor_pow(base: u64, exp: f64) -> u64 {
    if base <= 1 {
        return base;
    }
    let v = (base as f64).powf(exp);
    if !v.is_finite() || v >= 9.0e18 {
        return u64::MAX;
    }
    let nearest = v.round();
    if (v - nearest).abs() > NEAR_INTEGER {
        return v.floor() as u64;
    }
    let m = nearest as u64;
    match small_rational(exp) {
        Some((p, q)) => {
            // ⌊base^{p/q}⌋ >= m  ⇔  m^q <= base^p
            let lhs = BigUint::from(m).pow(q);
            let rhs = BigUint::from(base).pow(p);
            if lhs <= rhs {
                m
            } else {
                m - 1
            }
        }
        None => {
            let ulps = 16.0 * f64::EPSILON * v;
            if v < nearest - ulps {
                m - 1
            } else {
                m
            }
        }
    }
}

/// `exp = p/q` with `q <= 1000`, found by continued fractions.
fn small_rational(exp: f64) -> Option<(u32, u32)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut x = exp;
    for _ in 0..40 {
        let a = x.floor();
        if a > 1e9 {
            return None;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > 1000 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - exp).abs() <= 1e-14 * exp.abs() {
            return Some((u32::try_from(h1).ok()?, k1 as u32));
        }
        let frac = x - a as f64;
        if frac == 0.0 {
            return None;
        }
        x = 1.0 / frac;
    }
    None
}

/// All distinct elements `<= limit`, ascending.
pub fn elements_up_to(params: &LacunaryParams, limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let max_exp = u64::from(63 - limit.leading_zeros());
    let lists: Vec<Vec<u64>> = (0..params.s())
        .map(|i| params.exponents_up_to(i, max_exp))
        .collect();
    let mut values = Vec::new();
    collect_sums(&lists, 0, 0, u128::from(limit), &mut values);
    values.sort_unstable();
    values.dedup();
    values
}

fn collect_sums(lists: &[Vec<u64>], depth: usize, partial: u128, limit: u128, out: &mut Vec<u64>) {
    if depth == lists.len() {
        out.push(partial as u64);
        return;
    }
    // each list is ascending, so the first overflow ends the coordinate
    for &e in &lists[depth] {
        let next = partial + (1u128 << e);
        if next > limit {
            break;
        }
        collect_sums(lists, depth + 1, next, limit, out);
    }
}

/// The truncation of the lacunary set to `[1, 2X]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LacunarySet {
    params: LacunaryParams,
    scale: u64,
    values: Vec<u64>,
}

impl LacunarySet {
    /// Enumerates every element of `[1, 2X]`. Requires `X >= 3` and `2X < 2^64`.
    pub fn generate(params: LacunaryParams, scale: u64) -> Result<Self> {
        if scale < 3 {
            return Err(Error::arg(format!("scale X = {scale} must be at least 3")));
        }
        let limit = scale
            .checked_mul(2)
            .ok_or_else(|| Error::arg(format!("2X overflows 64 bits for X = {scale}")))?;
        let values = elements_up_to(&params, limit);
        Ok(LacunarySet {
            params,
            scale,
            values,
        })
    }

    /// A set with explicit elements, used for experiments on hand-picked
    /// shifts. Values are sorted and deduplicated; all must lie in `[1, 2X]`.
    pub fn from_values(params: LacunaryParams, scale: u64, mut values: Vec<u64>) -> Result<Self> {
        values.sort_unstable();
        values.dedup();
        let limit = scale.saturating_mul(2);
        if values.first() == Some(&0) || values.last().is_some_and(|&v| v > limit) {
            return Err(Error::arg(format!("values must lie in [1, {limit}]")));
        }
        Ok(LacunarySet {
            params,
            scale,
            values,
        })
    }

    pub fn params(&self) -> &LacunaryParams {
        &self.params
    }

    /// The scale `X`.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.values.last().copied()
    }

    pub fn min(&self) -> Option<u64> {
        self.values.first().copied()
    }

    /// `A_λ(x)`: the number of elements `<= x`, for `1 <= x <= 2X`.
    pub fn counting_function(&self, x: f64) -> Result<usize> {
        let top = 2.0 * self.scale as f64;
        if !(1.0..=top).contains(&x) {
            return Err(Error::arg(format!("x = {x} outside [1, {top}]")));
        }
        let cut = x.floor() as u64;
        Ok(self.values.partition_point(|&v| v <= cut))
    }

    /// Positive differences `a_j - a_i` over pairs `i < j`, outer index first.
    pub fn differences(&self) -> impl Iterator<Item = u64> + '_ {
        self.values
            .iter()
            .enumerate()
            .flat_map(move |(i, &a)| self.values[i + 1..].iter().map(move |&b| b - a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_params() -> LacunaryParams {
        LacunaryParams::new(vec![2.0, 2.0]).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(validate_params(&[2.0, 2.0]), Ok(()));
        assert!(matches!(
            validate_params(&[3.0, 3.0]),
            Err(ParamViolation::TotalSumBelowOne { .. })
        ));
        assert!(matches!(
            validate_params(&[1.0, 2.0]),
            Err(ParamViolation::ExponentNotAboveOne { index: 1, .. })
        ));
        assert!(matches!(
            validate_params(&[1.5, 1.5, 2.0]),
            Err(ParamViolation::LeadingSumTooLarge { .. })
        ));
        assert!(matches!(
            validate_params(&[2.0]),
            Err(ParamViolation::TooFewExponents(1))
        ));
        assert!(matches!(
            validate_params(&[2.0, f64::NAN]),
            Err(ParamViolation::ExponentNotAboveOne { index: 2, .. })
        ));
        assert_eq!(validate_params(&[3.0, 3.0, 3.0]), Ok(()));
    }

    #[test]
    fn lambda_solutions() {
        assert_eq!(solve_lambda(&[2.0, 2.0]).unwrap(), 1.0);
        let l = solve_lambda(&[1.5, 2.0]).unwrap();
        assert!((l - 1.5).abs() < 1e-12);
        assert!(balance_residual(&[1.5, 2.0], l).abs() < BALANCE_TOLERANCE);
        assert_eq!(solve_lambda(&[3.0, 3.0, 3.0]).unwrap(), 1.0);
        assert_eq!(solve_lambda(&[4.0, 4.0 / 3.0]).unwrap(), 1.0);
        assert!(solve_lambda(&[3.0, 3.0]).is_err());
    }

    #[test]
    fn explicit_lambda_must_balance() {
        assert!(LacunaryParams::with_lambda(vec![1.5, 2.0], 1.5).is_ok());
        assert!(matches!(
            LacunaryParams::with_lambda(vec![1.5, 2.0], 1.4),
            Err(ParamViolation::Unbalanced { .. })
        ));
    }

    #[test]
    fn floor_pow_exact_cases() {
        assert_eq!(floor_pow(1, 2.5), 1);
        assert_eq!(floor_pow(3, 2.0), 9);
        assert_eq!(floor_pow(4, 1.5), 8);
        assert_eq!(floor_pow(8, 1.0 / 3.0 + 1.0), 16);
        assert_eq!(floor_pow(9, 1.5), 27);
        assert_eq!(floor_pow(2, 1.5), 2);
        assert_eq!(floor_pow(10, 0.5 + 1.0), 31);
    }

    #[test]
    fn small_rationals() {
        assert_eq!(small_rational(1.5), Some((3, 2)));
        assert_eq!(small_rational(2.0), Some((2, 1)));
        assert_eq!(small_rational(4.0 / 3.0), Some((4, 3)));
        assert_eq!(small_rational(std::f64::consts::PI), None);
    }

    #[test]
    fn generate_x16() {
        let set = LacunarySet::generate(square_params(), 16).unwrap();
        // exponents k^2 <= log2(32) = 5 are {1, 4}: sums 2+2, 2+16, 16+16
        assert_eq!(set.values(), &[4, 18, 32]);
        assert_eq!(set.counting_function(3.0).unwrap(), 0);
        assert_eq!(set.counting_function(18.0).unwrap(), 2);
        assert_eq!(set.counting_function(32.0).unwrap(), 3);
        assert!(set.counting_function(0.5).is_err());
        assert!(set.counting_function(33.0).is_err());
    }

    #[test]
    fn tiny_limit_and_small_scale() {
        assert_eq!(elements_up_to(&square_params(), 4), vec![4]);
        assert!(LacunarySet::generate(square_params(), 2).is_err());
        assert!(LacunarySet::generate(square_params(), u64::MAX / 2 + 1).is_err());
    }

    #[test]
    fn brute_force_squares() {
        for x in [3u64, 16, 100, 1 << 20, 1 << 33, (1 << 62) - 1] {
            let set = LacunarySet::generate(square_params(), x).unwrap();
            let limit = 2 * x as u128;
            let top = ((128 - limit.leading_zeros()) as f64).sqrt().ceil() as u32 + 1;
            let mut brute = Vec::new();
            for i in 1..=top {
                for j in 1..=top {
                    let v = (1u128 << (i * i).min(127)) + (1u128 << (j * j).min(127));
                    if v <= limit {
                        brute.push(v as u64);
                    }
                }
            }
            brute.sort_unstable();
            brute.dedup();
            assert_eq!(set.values(), brute.as_slice(), "X = {x}");
            assert_eq!(set.counting_function(2.0 * x as f64).unwrap(), set.len());
        }
    }

    #[test]
    fn lambda_coordinate_dedups_exponents() {
        // λ = 3/2: ⌊k^{3/2}⌋ = 1, 2, 5, 8, … squared gives 1, 4, 25, 64
        let p = LacunaryParams::new(vec![1.5, 2.0]).unwrap();
        assert_eq!(p.exponents_up_to(1, 63), vec![1, 4, 25]);
        // ⌊k^{3/2}⌋ = 1, 2, 5, 8, 11, 14, 18, 22, 27, 31, 36, 41, 46, 52, 58, 64
        assert_eq!(
            p.exponents_up_to(0, 63),
            vec![1, 2, 5, 8, 11, 14, 18, 22, 27, 31, 36, 41, 46, 52, 58]
        );
    }

    #[test]
    fn differences_stream() {
        let set = LacunarySet::generate(square_params(), 16).unwrap();
        assert_eq!(set.differences().collect::<Vec<_>>(), vec![14, 28, 14]);
        let single = LacunarySet::generate(square_params(), 3).unwrap();
        assert_eq!(single.values(), &[4]);
        assert_eq!(single.differences().count(), 0);
        let big = LacunarySet::generate(square_params(), 1 << 30).unwrap();
        let n = big.len();
        assert_eq!(big.differences().count(), n * (n - 1) / 2);
        assert!(big.differences().all(|d| d >= 1 && d % 2 == 0));
    }
}
