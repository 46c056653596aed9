//! Window statistics of the representation function
//! `f(n) = #{a ∈ A : n - a prime}` over short intervals `(x, x + h]`:
//!
//! * `R(x) = Σ f(n)`, the number of representations;
//! * `Q(x) = Σ f(n)²`, the local second moment;
//! * `S(x) = #{n : f(n) >= 1}`, the number of sumset elements.
//!
//! Cauchy–Schwarz gives `R² <= S·Q`, so `S >= R²/Q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lacunary::LacunarySet;
use crate::par;
use crate::primes::PrimeSegment;
use crate::primes::{base_primes, count_primes_in, is_prime, DEFAULT_SEGMENT_LIMIT};
use crate::sampling::uniform_integers;
use crate::stats::{quantile, Summary};

pub(crate) const SCAN_STREAM: &str = "scan";
pub(crate) const PRIME_DEV_STREAM: &str = "prime-dev";

/// `⌊X^θ⌋`, snapping to the nearest integer when the float lands within `1e-9` of it.
pub fn window_length(scale: u64, theta: f64) -> u64 {
    let v = (scale as f64).powf(theta);
    let r = v.round();
    if (v - r).abs() <= 1e-9 * v.max(1.0) {
        r as u64
    } else {
        v.floor() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    scale: u64,
    theta: f64,
    h: u64,
    sample_count: usize,
    seed: u64,
}

impl ScanConfig {
    pub fn new(scale: u64, theta: f64, sample_count: usize, seed: u64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::arg(format!("theta = {theta} must lie in (0, 1)")));
        }
        if sample_count == 0 {
            return Err(Error::arg("sample_count must be at least 1"));
        }
        if scale.checked_mul(3).is_none() {
            return Err(Error::arg(format!("scale X = {scale} too large")));
        }
        let h = window_length(scale, theta);
        if h < 2 || h > scale {
            return Err(Error::arg(format!(
                "h = {h} must satisfy 2 <= h <= X = {scale}"
            )));
        }
        Ok(ScanConfig {
            scale,
            theta,
            h,
            sample_count,
            seed,
        })
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The sampled left endpoints, uniform over integers of `[X, 2X]`.
    pub fn sample_points(&self) -> Vec<u64> {
        uniform_integers(
            self.seed,
            SCAN_STREAM,
            self.scale,
            2 * self.scale,
            self.sample_count,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub x: u64,
    pub h: u64,
    #[serde(rename = "R")]
    pub r: u64,
    #[serde(rename = "Q")]
    pub q: u64,
    #[serde(rename = "S")]
    pub s: u64,
}

impl WindowRecord {
    /// `R²/Q`, or 0 when `Q = 0`.
    pub fn cs_bound(&self) -> f64 {
        if self.q == 0 {
            0.0
        } else {
            (self.r as f64).powi(2) / self.q as f64
        }
    }

    /// `R² <= S·Q` in exact integer arithmetic.
    pub fn satisfies_cauchy_schwarz(&self) -> bool {
        u128::from(self.r) * u128::from(self.r) <= u128::from(self.s) * u128::from(self.q)
    }

    /// `S <= R <= Q`, `S <= h` and `R² <= S·Q`.
    pub fn is_consistent(&self) -> bool {
        self.s <= self.h && self.s <= self.r && self.r <= self.q && self.satisfies_cauchy_schwarz()
    }
}

/// `f(n)`: the number of `a` in the set with `n - a` prime.
pub fn rep_function(n: u64, set: &LacunarySet) -> u64 {
    set.values()
        .iter()
        .take_while(|&&a| a + 2 <= n)
        .filter(|&&a| is_prime(n - a))
        .count() as u64
}

/// `f(n)` for `n = x+1, …, x+h`, one sieved segment per set element.
pub fn window_profile(x: u64, h: u64, set: &LacunarySet) -> Vec<u32> {
    let mut f = vec![0u32; h as usize];
    if h == 0 {
        return f;
    }
    let top = x + h;
    let base = base_primes(top + 1);
    for &a in set.values() {
        // p = n - a ranges over (x - a, x + h - a]
        if top < a + 2 {
            break;
        }
        let p_hi = top - a;
        let p_lo = (x + 1).saturating_sub(a);
        let mut lo = p_lo;
        while lo <= p_hi {
            let hi = (lo + DEFAULT_SEGMENT_LIMIT).min(p_hi + 1);
            let seg: PrimeSegment = crate::primes::segment_from_base(lo, hi, &base);
            for p in seg.primes() {
                f[(p + a - x - 1) as usize] += 1;
            }
            lo = hi;
        }
    }
    f
}

fn record_from_profile(x: u64, h: u64, f: &[u32]) -> WindowRecord {
    let (mut r, mut q, mut s) = (0u64, 0u64, 0u64);
    for &v in f {
        let v = u64::from(v);
        r += v;
        q += v * v;
        s += u64::from(v > 0);
    }
    WindowRecord { x, h, r, q, s }
}

/// `R`, `Q` and `S` over `(x, x + h]`.
pub fn window_record(x: u64, h: u64, set: &LacunarySet) -> Result<WindowRecord> {
    if x.checked_add(h).is_none_or(|t| t == u64::MAX) {
        return Err(Error::arg("window end overflows 64 bits"));
    }
    Ok(record_from_profile(x, h, &window_profile(x, h, set)))
}

/// `Σ_{a <= h/2} (π(x + h - a) - π(x - a))`, a lower bound for `R(x)`.
pub fn restricted_first_moment(x: u64, h: u64, set: &LacunarySet) -> Result<u64> {
    let mut total = 0;
    for &a in set.values().iter().take_while(|&&a| 2 * a <= h) {
        let hi = (x + h).saturating_sub(a);
        let lo = x.saturating_sub(a);
        total += count_primes_in(lo, hi)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub windows: usize,
    pub h: u64,
    pub r_over_h: Summary,
    pub q_over_h: Summary,
    pub s_over_h: Summary,
    /// Fraction of windows with `S >= 0.999·R²/Q`.
    pub cs_guard_fraction: f64,
}

impl ScanSummary {
    pub fn of(records: &[WindowRecord]) -> Option<ScanSummary> {
        let first = records.first()?;
        let h = first.h as f64;
        let column = |g: fn(&WindowRecord) -> u64| -> Summary {
            let v: Vec<f64> = records.iter().map(|r| g(r) as f64 / h).collect();
            Summary::of(&v).expect("non-empty")
        };
        let guarded = records
            .iter()
            .filter(|r| r.s as f64 >= 0.999 * r.cs_bound())
            .count();
        Some(ScanSummary {
            windows: records.len(),
            h: first.h,
            r_over_h: column(|r| r.r),
            q_over_h: column(|r| r.q),
            s_over_h: column(|r| r.s),
            cs_guard_fraction: guarded as f64 / records.len() as f64,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub records: Vec<WindowRecord>,
    pub summary: ScanSummary,
}

/// One record per sampled window, in sampling order regardless of worker count.
pub fn scan(config: &ScanConfig, set: &LacunarySet) -> ScanResult {
    let xs = config.sample_points();
    let h = config.h;
    let records = par::map(&xs, |&x| {
        record_from_profile(x, h, &window_profile(x, h, set))
    });
    let summary = ScanSummary::of(&records).expect("sample_count >= 1");
    ScanResult { records, summary }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationSummary {
    pub scale: u64,
    pub y: u64,
    pub samples: usize,
    pub seed: u64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
    pub mean: f64,
    /// Fraction of sampled `t` with relative deviation above 0.5.
    pub exceptional_fraction: f64,
}

/// Relative deviation `|π(t+y) - π(t) - y/ln t| / (y/ln t)`.
pub fn relative_prime_deviation(t: u64, y: u64) -> Result<f64> {
    let expected = y as f64 / (t as f64).ln();
    let actual = count_primes_in(t, t + y)? as f64;
    Ok((actual - expected).abs() / expected)
}

/// Samples `t ∈ [X, 2X]` and summarizes the relative deviation of prime
/// counts in `(t, t + y]` from `y / ln t`.
pub fn prime_window_deviation(
    scale: u64,
    y: u64,
    sample_count: usize,
    seed: u64,
) -> Result<DeviationSummary> {
    if y < 3 || y > scale {
        return Err(Error::arg(format!(
            "need 3 <= y <= X, got y = {y}, X = {scale}"
        )));
    }
    if sample_count == 0 {
        return Err(Error::arg("sample_count must be at least 1"));
    }
    if scale.checked_mul(3).is_none() {
        return Err(Error::arg(format!("scale X = {scale} too large")));
    }
    let ts = uniform_integers(seed, PRIME_DEV_STREAM, scale, 2 * scale, sample_count);
    let deltas = par::map(&ts, |&t| relative_prime_deviation(t, y))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let exceptional = deltas.iter().filter(|&&d| d > 0.5).count();
    let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
    let mut sorted = deltas;
    sorted.sort_by(f64::total_cmp);
    Ok(DeviationSummary {
        scale,
        y,
        samples: sample_count,
        seed,
        p50: quantile(&sorted, 0.5),
        p90: quantile(&sorted, 0.9),
        p99: quantile(&sorted, 0.99),
        max: sorted[sorted.len() - 1],
        mean,
        exceptional_fraction: exceptional as f64 / sample_count as f64,
    })
}
