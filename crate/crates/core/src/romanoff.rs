//! The Romanoff model `n = p + 2^k`: the representation count `f_Rom`,
//! constructive searches for large multiplicities over multiples of a smooth
//! odd modulus, admissible power-of-two shift sets, and the representable
//! odd numbers with their gaps.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::primes::{is_prime, small_primes, PrimeTable};
use crate::sampling::uniform_integers;
use crate::stats::Summary;

pub(crate) const PROPORTION_STREAM: &str = "proportion";

/// Smallest admissible power of two: `k >= k_min`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RomanoffConvention {
    k_min: u32,
}

impl Default for RomanoffConvention {
    fn default() -> Self {
        RomanoffConvention::POSITIVE
    }
}

impl RomanoffConvention {
    /// `k ∈ {1, 2, …}`.
    pub const POSITIVE: RomanoffConvention = RomanoffConvention { k_min: 1 };
    /// `k ∈ {0, 1, …}`, admitting `2⁰ = 1`.
    pub const NONNEGATIVE: RomanoffConvention = RomanoffConvention { k_min: 0 };

    pub fn new(k_min: u32) -> Result<Self> {
        match k_min {
            0 => Ok(Self::NONNEGATIVE),
            1 => Ok(Self::POSITIVE),
            _ => Err(Error::arg(format!("k_min must be 0 or 1, got {k_min}"))),
        }
    }

    pub fn k_min(&self) -> u32 {
        self.k_min
    }
}

/// Powers `2^k`, `k >= k_min`, strictly below `n`.
fn powers_below(n: u64, conv: RomanoffConvention) -> impl Iterator<Item = u64> {
    (conv.k_min..64)
        .map(|k| 1u64 << k)
        .take_while(move |&t| t < n)
}

/// `f_Rom(n) = #{k >= k_min : 2^k < n, n − 2^k prime}`.
pub fn romanoff_rep(n: u64, conv: RomanoffConvention) -> u64 {
    powers_below(n, conv).filter(|&t| is_prime(n - t)).count() as u64
}

/// `⌊log n / log 2⌋`, the trivial pointwise ceiling of `f_Rom(n)`.
pub fn trivial_bound(n: u64) -> u64 {
    u64::from(63 - n.max(1).leading_zeros())
}

/// Squarefree odd modulus `d = ∏ p` with its totient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothModulus {
    pub d: u64,
    pub primes: Vec<u64>,
    pub phi: u64,
    /// `d / φ(d)`.
    pub ratio: f64,
}

/// Product of the odd primes `3 <= p <= prime_bound` not in `excluded`.
pub fn build_modulus(prime_bound: f64, excluded: &[u64]) -> Result<SmoothModulus> {
    if !prime_bound.is_finite() || prime_bound < 3.0 {
        return Err(Error::arg(format!(
            "prime bound {prime_bound} must be at least 3"
        )));
    }
    let primes: Vec<u64> = small_primes(prime_bound.floor() as u64)
        .into_iter()
        .filter(|&p| p > 2 && !excluded.contains(&p))
        .collect();
    let mut d = 1u64;
    let mut phi = 1u64;
    let mut ratio = 1.0;
    for &p in &primes {
        d = d.checked_mul(p).ok_or_else(|| {
            Error::Overflow(format!(
                "modulus over primes <= {prime_bound} exceeds 64 bits; use a smaller prime bound"
            ))
        })?;
        phi *= p - 1;
        ratio *= p as f64 / (p - 1) as f64;
    }
    Ok(SmoothModulus {
        d,
        primes,
        phi,
        ratio,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hunt {
    /// Smallest maximizer of `f_Rom` among the scanned multiples.
    pub n: u64,
    pub multiplicity: u64,
    /// Mean of `f_Rom` over all scanned multiples.
    pub window_average: f64,
    pub multiples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HuntOutcome {
    Found(Hunt),
    NoMultiple,
}

/// Multiples of `d` in `(lo, hi]`.
fn multiples_in(lo: u64, hi: u64, d: u64) -> Vec<u64> {
    let first = (lo / d + 1) * d;
    (0..)
        .map(|i| first + i * d)
        .take_while(|&n| n <= hi)
        .collect()
}

/// Scans every multiple of `d` in `(X, X + window_length]` for the largest `f_Rom`.
pub fn hunt_large_multiplicity(
    scale: u64,
    window_length: u64,
    modulus: &SmoothModulus,
    conv: RomanoffConvention,
) -> Result<HuntOutcome> {
    if window_length < modulus.d {
        return Err(Error::arg(format!(
            "window length {window_length} shorter than modulus {}",
            modulus.d
        )));
    }
    let end = scale
        .checked_add(window_length)
        .ok_or_else(|| Error::arg("window end overflows 64 bits"))?;
    let ns = multiples_in(scale, end, modulus.d);
    if ns.is_empty() {
        return Ok(HuntOutcome::NoMultiple);
    }
    let reps = par::map(&ns, |&n| romanoff_rep(n, conv));
    let mut best = 0;
    for (i, &r) in reps.iter().enumerate() {
        if r > reps[best] {
            best = i;
        }
    }
    Ok(HuntOutcome::Found(Hunt {
        n: ns[best],
        multiplicity: reps[best],
        window_average: reps.iter().sum::<u64>() as f64 / reps.len() as f64,
        multiples: ns.len(),
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionReport {
    pub h: u64,
    pub samples: usize,
    pub threshold: u64,
    /// Windows containing a multiple `n` of `d` with `f_Rom(n) >= threshold`.
    pub hits: usize,
    pub fraction: f64,
    /// `S_d(x) = Σ_{x < n <= x+h, d | n} f_Rom(n)` over the sampled windows.
    pub window_sums: Summary,
    /// Largest `f_Rom` over multiples of `d` in each sampled window.
    pub window_maxima: Summary,
}

/// Samples `x ∈ (X, 2X]` and checks each window `(x, x + h]`, `h = ⌊X^θ⌋`,
/// for a multiple of `d` reaching `threshold`.
#[allow(clippy::too_many_arguments)]
pub fn positive_proportion_scan(
    scale: u64,
    theta: f64,
    modulus: &SmoothModulus,
    threshold: u64,
    sample_count: usize,
    seed: u64,
    conv: RomanoffConvention,
) -> Result<ProportionReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::arg(format!("theta = {theta} must lie in (0, 1)")));
    }
    if sample_count == 0 {
        return Err(Error::arg("sample_count must be at least 1"));
    }
    if scale < 1 || scale.checked_mul(3).is_none() {
        return Err(Error::arg(format!("scale X = {scale} out of range")));
    }
    let h = crate::window::window_length(scale, theta);
    if h < modulus.d {
        return Err(Error::arg(format!(
            "h = {h} is shorter than the modulus d = {}; no multiple is guaranteed",
            modulus.d
        )));
    }
    let xs = uniform_integers(seed, PROPORTION_STREAM, scale + 1, 2 * scale, sample_count);
    let per_window = par::map(&xs, |&x| {
        let reps: Vec<u64> = multiples_in(x, x + h, modulus.d)
            .into_iter()
            .map(|n| romanoff_rep(n, conv))
            .collect();
        (
            reps.iter().sum::<u64>(),
            reps.iter().copied().max().unwrap_or(0),
        )
    });
    let hits = per_window.iter().filter(|&&(_, m)| m >= threshold).count();
    let sums: Vec<f64> = per_window.iter().map(|&(s, _)| s as f64).collect();
    let maxima: Vec<f64> = per_window.iter().map(|&(_, m)| m as f64).collect();
    Ok(ProportionReport {
        h,
        samples: sample_count,
        threshold,
        hits,
        fraction: hits as f64 / sample_count as f64,
        window_sums: Summary::of(&sums).expect("non-empty"),
        window_maxima: Summary::of(&maxima).expect("non-empty"),
    })
}

/// The shift `−2^e`, kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegPowerOfTwo(pub u64);

impl NegPowerOfTwo {
    pub fn residue(&self, p: u64) -> u64 {
        let pos = crate::primes::pow_mod(2, self.0, p);
        (p - pos) % p
    }
}

impl fmt::Display for NegPowerOfTwo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-2^{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub p: u64,
    /// Distinct residues of the shifts mod `p`, ascending.
    pub residues: Vec<u64>,
    /// Some residue class mod `p` is missed.
    pub admissible: bool,
}

fn residue_check(shifts: &[NegPowerOfTwo], p: u64) -> ResidueCheck {
    let mut hit = vec![false; p as usize];
    for s in shifts {
        hit[s.residue(p) as usize] = true;
    }
    let residues: Vec<u64> = (0..p).filter(|&c| hit[c as usize]).collect();
    ResidueCheck {
        p,
        admissible: residues.len() < p as usize,
        residues,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleShifts {
    pub r: u64,
    /// `L = lcm_{p <= r} (p − 1)`.
    pub lcm: u64,
    pub exponents: Vec<u64>,
    pub shifts: Vec<NegPowerOfTwo>,
    /// One check per prime `p <= r`.
    pub checks: Vec<ResidueCheck>,
    /// The next few primes above `r`, for information only.
    pub extra_checks: Vec<ResidueCheck>,
    pub verified: bool,
}

const EXTRA_PRIMES: usize = 3;

/// Exponents `L, 2L, …, count·L` and a brute-force admissibility check of the
/// shifts `−2^{iL}` modulo every prime `p <= r`.
pub fn admissible_shift_set(r: u64, count: usize) -> Result<AdmissibleShifts> {
    if r < 2 {
        return Err(Error::arg(format!("r = {r} must be at least 2")));
    }
    if count == 0 {
        return Err(Error::arg("count must be at least 1"));
    }
    if r > 1 << 20 {
        return Err(Error::arg(format!("r = {r} too large for a residue check")));
    }
    let primes = small_primes(r);
    let mut lcm = 1u64;
    for &p in &primes {
        let g = lcm.gcd(&(p - 1));
        lcm = (lcm / g).checked_mul(p - 1).ok_or_else(|| {
            Error::Overflow(format!("lcm of p - 1 over p <= {r} exceeds 64 bits"))
        })?;
    }
    let exponents = (1..=count as u64)
        .map(|i| {
            i.checked_mul(lcm)
                .ok_or_else(|| Error::Overflow(format!("exponent {i}·{lcm} exceeds 64 bits")))
        })
        .collect::<Result<Vec<u64>>>()?;
    let shifts: Vec<NegPowerOfTwo> = exponents.iter().map(|&e| NegPowerOfTwo(e)).collect();
    let checks: Vec<ResidueCheck> = primes.iter().map(|&p| residue_check(&shifts, p)).collect();
    let extra_checks = (r + 1..)
        .filter(|&p| is_prime(p))
        .take(EXTRA_PRIMES)
        .map(|p| residue_check(&shifts, p))
        .collect();
    let verified = checks.iter().all(|c| c.admissible);
    Ok(AdmissibleShifts {
        r,
        lcm,
        exponents,
        shifts,
        checks,
        extra_checks,
        verified,
    })
}

/// Odd numbers up to `limit` that are `p + 2^k`, with the gaps between them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentableSequence {
    pub limit: u64,
    pub convention: RomanoffConvention,
    pub values: Vec<u64>,
    pub gaps: Vec<u64>,
    /// Odd `3 <= n <= limit` with no representation.
    pub non_representable: Vec<u64>,
}

const ODD_CHUNK: u64 = 1 << 20;

pub fn enumerate_representable_odds(
    limit: u64,
    conv: RomanoffConvention,
) -> Result<RepresentableSequence> {
    if limit < 5 {
        return Err(Error::arg(format!("limit = {limit} must be at least 5")));
    }
    let table = PrimeTable::up_to(limit)?;
    let chunks = limit.div_ceil(ODD_CHUNK) as usize;
    let parts = par::map_range(chunks, |c| {
        let lo = c as u64 * ODD_CHUNK;
        let hi = (lo + ODD_CHUNK).min(limit + 1);
        let (mut yes, mut no) = (Vec::new(), Vec::new());
        for n in (lo | 1..hi).step_by(2).filter(|&n| n >= 3) {
            if powers_below(n, conv).any(|t| table.is_prime(n - t)) {
                yes.push(n);
            } else {
                no.push(n);
            }
        }
        (yes, no)
    });
    let (mut values, mut non_representable) = (Vec::new(), Vec::new());
    for (yes, no) in parts {
        values.extend(yes);
        non_representable.extend(no);
    }
    let gaps = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(RepresentableSequence {
        limit,
        convention: conv,
        values,
        gaps,
        non_representable,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    /// 1-based index `m`.
    pub m: usize,
    pub s_m: u64,
    /// `s_{m+1} − s_m`.
    pub gap: u64,
    /// `gap / (ln s_m)²`.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapStatistics {
    pub max_gap: u64,
    /// `s_m` starting the first maximal gap.
    pub argmax: u64,
    pub rows: Vec<GapRow>,
}

/// Gap statistics of an ascending sequence with at least two terms, all `>= 2`.
pub fn gap_statistics(values: &[u64]) -> Result<GapStatistics> {
    if values.len() < 2 {
        return Err(Error::arg("gap statistics need at least two values"));
    }
    if values[0] < 2 || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg(
            "values must be strictly increasing and at least 2",
        ));
    }
    let rows: Vec<GapRow> = values
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let gap = w[1] - w[0];
            let l = (w[0] as f64).ln();
            GapRow {
                m: i + 1,
                s_m: w[0],
                gap,
                normalized: gap as f64 / (l * l),
            }
        })
        .collect();
    let best = rows
        .iter()
        .fold(rows[0], |b, r| if r.gap > b.gap { *r } else { b });
    Ok(GapStatistics {
        max_gap: best.gap,
        argmax: best.s_m,
        rows,
    })
}

impl RepresentableSequence {
    pub fn gap_statistics(&self) -> Result<GapStatistics> {
        gap_statistics(&self.values)
    }
}
