use std::borrow::Cow;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default maximum number of integers covered by one segment (2^25).
pub const DEFAULT_SEGMENT_LIMIT: u64 = 1 << 25;

/// Base primes below this bound are cached for the lifetime of the process,
/// which covers every segment ending below 2^40.
const CACHED_BASE_BOUND: u64 = 1 << 20;

static CACHED_BASE: OnceLock<Vec<u32>> = OnceLock::new();

/// All primes `p <= bound`, by a plain odd-only sieve of Eratosthenes.
pub fn small_primes(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    // index i <-> 2i + 1
    let n = (bound as usize - 1) / 2 + 1;
    let mut composite = vec![false; n];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= bound as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < n {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(n / 8 + 1);
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 1),
    );
    primes
}

fn cached_base() -> &'static [u32] {
    CACHED_BASE.get_or_init(|| {
        small_primes(CACHED_BASE_BOUND - 1)
            .into_iter()
            .map(|p| p as u32)
            .collect()
    })
}

/// Primes `p` with `p * p < hi`, i.e. enough to sieve anything below `hi`.
pub(crate) fn base_primes(hi: u64) -> Cow<'static, [u32]> {
    let root = hi.saturating_sub(1).isqrt();
    if root < CACHED_BASE_BOUND {
        let table = cached_base();
        let end = table.partition_point(|&p| u64::from(p) <= root);
        Cow::Borrowed(&table[..end])
    } else {
        Cow::Owned(small_primes(root).into_iter().map(|p| p as u32).collect())
    }
}

/// Primality flags for the integers of `[lo, hi)`.
///
/// Only odd integers are stored, one bit each; 2 is tracked separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSegment {
    lo: u64,
    hi: u64,
    first_odd: u64,
    odd_count: u64,
    has_two: bool,
    bits: Vec<u64>,
}

impl PrimeSegment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    /// Whether `m` is prime. Panics when `m` lies outside `[lo, hi)`.
    #[inline]
    pub fn is_prime(&self, m: u64) -> bool {
        assert!(
            (self.lo..self.hi).contains(&m),
            "{m} outside segment [{}, {})",
            self.lo,
            self.hi
        );
        if m & 1 == 0 {
            return m == 2 && self.has_two;
        }
        let i = (m - self.first_odd) / 2;
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    /// Number of primes in the segment.
    pub fn count(&self) -> u64 {
        let odd: u64 = self.bits.iter().map(|w| u64::from(w.count_ones())).sum();
        odd + u64::from(self.has_two)
    }

    /// Primes of the segment in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let first_odd = self.first_odd;
        let two = self.has_two.then_some(2);
        let odd = self.bits.iter().enumerate().flat_map(move |(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(first_odd + 2 * (wi as u64 * 64 + b))
            })
        });
        two.into_iter().chain(odd)
    }
}

/// Segment builder with a configurable size limit.
#[derive(Clone, Copy, Debug)]
pub struct SegmentSieve {
    limit: u64,
}

impl Default for SegmentSieve {
    fn default() -> Self {
        SegmentSieve {
            limit: DEFAULT_SEGMENT_LIMIT,
        }
    }
}

impl SegmentSieve {
    pub fn with_limit(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::arg("segment limit must be positive"));
        }
        Ok(SegmentSieve { limit })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn sieve(&self, lo: u64, hi: u64) -> Result<PrimeSegment> {
        if lo >= hi {
            return Err(Error::arg(format!("empty segment: lo = {lo} >= hi = {hi}")));
        }
        let len = hi - lo;
        if len > self.limit {
            return Err(Error::SegmentTooLarge {
                lo,
                hi,
                len,
                limit: self.limit,
            });
        }
        Ok(sieve_unchecked(lo, hi, &base_primes(hi)))
    }
}

/// Sieves `[lo, hi)` with the default segment limit.
pub fn sieve_segment(lo: u64, hi: u64) -> Result<PrimeSegment> {
    SegmentSieve::default().sieve(lo, hi)
}

/// `base` must contain every odd prime `p` with `p * p < hi` (2 is skipped).
pub(crate) fn sieve_unchecked(lo: u64, hi: u64, base: &[u32]) -> PrimeSegment {
    debug_assert!(lo < hi);
    let first_odd = lo | 1;
    let odd_count = if first_odd >= hi {
        0
    } else {
        (hi - first_odd).div_ceil(2)
    };
    let words = odd_count.div_ceil(64) as usize;
    let mut bits = vec![u64::MAX; words];
    if odd_count % 64 != 0 {
        bits[words - 1] = (1u64 << (odd_count % 64)) - 1;
    }
    if first_odd == 1 && odd_count > 0 {
        bits[0] &= !1;
    }

    for &p in base {
        let p = u64::from(p);
        if p == 2 {
            continue;
        }
        let sq = p * p;
        if sq >= hi {
            break;
        }
        let mut start = if sq >= lo { sq } else { lo.div_ceil(p) * p };
        if start & 1 == 0 {
            start += p;
        }
        let mut i = (start - first_odd) / 2;
        while i < odd_count {
            bits[(i / 64) as usize] &= !(1u64 << (i % 64));
            i += p;
        }
    }

    PrimeSegment {
        lo,
        hi,
        first_odd,
        odd_count,
        has_two: lo <= 2 && 2 < hi,
        bits,
    }
}
