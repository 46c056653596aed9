use num_integer::Integer;

use super::segment::{base_primes, sieve_unchecked, PrimeSegment};
use crate::error::{Error, Result};
use crate::par;

// Counting works on L2-sized pieces independently of the segment limit.
const COUNT_CHUNK: u64 = 1 << 21;

/// Splits `[lo, hi)` into sieved chunks and applies `f` to each, in order.
pub(crate) fn map_chunks<R, F>(lo: u64, hi: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(&PrimeSegment) -> R + Sync + Send,
{
    if lo >= hi {
        return Vec::new();
    }
    let base = base_primes(hi);
    let chunks = (hi - lo).div_ceil(COUNT_CHUNK) as usize;
    par::map_range(chunks, |c| {
        let a = lo + c as u64 * COUNT_CHUNK;
        let b = (a + COUNT_CHUNK).min(hi);
        f(&sieve_unchecked(a, b, &base))
    })
}

fn check_interval(lo: u64, hi: u64) -> Result<()> {
    if lo > hi {
        return Err(Error::arg(format!(
            "interval (lo, hi] with lo = {lo} > hi = {hi}"
        )));
    }
    if hi == u64::MAX {
        return Err(Error::arg("hi must be below 2^64 - 1"));
    }
    Ok(())
}

/// Primality lookups over `[0, limit]`, held as consecutive segments.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    segments: Vec<PrimeSegment>,
}

impl PrimeTable {
    pub fn up_to(limit: u64) -> Result<Self> {
        if limit >= u64::MAX - COUNT_CHUNK {
            return Err(Error::arg("prime table limit too large"));
        }
        Ok(PrimeTable {
            limit,
            segments: map_chunks(0, limit + 1, PrimeSegment::clone),
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Panics when `m > limit`.
    #[inline]
    pub fn is_prime(&self, m: u64) -> bool {
        assert!(
            m <= self.limit,
            "{m} beyond prime table limit {}",
            self.limit
        );
        self.segments[(m / COUNT_CHUNK) as usize].is_prime(m)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.segments.iter().flat_map(PrimeSegment::primes)
    }
}

/// Number of primes `p` with `lo < p <= hi`, i.e. `pi(hi) - pi(lo)`.
pub fn count_primes_in(lo: u64, hi: u64) -> Result<u64> {
    check_interval(lo, hi)?;
    Ok(map_chunks(lo + 1, hi + 1, PrimeSegment::count)
        .into_iter()
        .sum())
}

/// All primes in `(lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    check_interval(lo, hi)?;
    Ok(
        map_chunks(lo + 1, hi + 1, |s| s.primes().collect::<Vec<_>>())
            .into_iter()
            .flatten()
            .collect(),
    )
}

/// Prime counts in `(lo, hi]` tallied by residue mod `k`; entry `l` counts `p ≡ l (mod k)`.
pub fn count_primes_by_residue(lo: u64, hi: u64, k: u64) -> Result<Vec<u64>> {
    check_interval(lo, hi)?;
    if k == 0 {
        return Err(Error::arg("modulus must be at least 1"));
    }
    if k > 1 << 24 {
        return Err(Error::arg(format!(
            "modulus {k} too large for a residue table"
        )));
    }
    let tallies = map_chunks(lo + 1, hi + 1, |s| {
        let mut t = vec![0u64; k as usize];
        for p in s.primes() {
            t[(p % k) as usize] += 1;
        }
        t
    });
    let mut total = vec![0u64; k as usize];
    for t in tallies {
        for (acc, v) in total.iter_mut().zip(t) {
            *acc += v;
        }
    }
    Ok(total)
}

/// Number of primes `p ≡ residue (mod k)` with `lo < p <= hi`.
pub fn count_primes_in_ap(lo: u64, hi: u64, k: u64, residue: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::arg("modulus must be at least 1"));
    }
    if residue >= k {
        return Err(Error::arg(format!("residue {residue} not reduced mod {k}")));
    }
    if residue.gcd(&k) != 1 {
        return Err(Error::arg(format!("gcd({residue}, {k}) != 1")));
    }
    check_interval(lo, hi)?;
    let counts = map_chunks(lo + 1, hi + 1, |s| {
        s.primes().filter(|p| p % k == residue).count() as u64
    });
    Ok(counts.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::is_prime;

    fn trial_primes(lo: u64, hi: u64) -> Vec<u64> {
        (lo + 1..=hi)
            .filter(|&n| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn small_counts() {
        assert_eq!(trial_primes(0, 10).len(), 4);
        assert_eq!(trial_primes(0, 100).len(), 25);
        assert_eq!(count_primes_in(0, 10).unwrap(), 4);
        assert_eq!(count_primes_in(0, 100).unwrap(), 25);
        assert_eq!(count_primes_in(17, 17).unwrap(), 0);
        assert_eq!(count_primes_in(0, 0).unwrap(), 0);
        assert_eq!(count_primes_in(2, 3).unwrap(), 1);
        assert_eq!(count_primes_in(1, 2).unwrap(), 1);
    }

    #[test]
    fn known_pi_values() {
        assert_eq!(count_primes_in(0, 1_000_000).unwrap(), 78_498);
        assert_eq!(count_primes_in(0, 10_000_000).unwrap(), 664_579);
    }

    #[test]
    fn across_chunk_boundaries() {
        let lo = COUNT_CHUNK - 1000;
        let hi = 2 * COUNT_CHUNK + 1000;
        let direct = (lo + 1..=hi).filter(|&n| is_prime(n)).count() as u64;
        assert_eq!(count_primes_in(lo, hi).unwrap(), direct);
        assert_eq!(primes_in(lo, hi).unwrap().len() as u64, direct);
    }

    #[test]
    fn table_lookups() {
        let t = PrimeTable::up_to(COUNT_CHUNK + 10).unwrap();
        for m in (0..2000).chain(COUNT_CHUNK - 50..=COUNT_CHUNK + 10) {
            assert_eq!(t.is_prime(m), is_prime(m), "m = {m}");
        }
        assert_eq!(
            t.primes().count() as u64,
            count_primes_in(0, COUNT_CHUNK + 10).unwrap()
        );
        assert_eq!(PrimeTable::up_to(0).unwrap().primes().count(), 0);
    }

    #[test]
    fn progression_counts() {
        let primes = trial_primes(0, 100);
        let ones_mod_four = primes.iter().filter(|&&p| p % 4 == 1).count() as u64;
        assert_eq!(ones_mod_four, 11);
        assert_eq!(count_primes_in_ap(0, 100, 4, 1).unwrap(), 11);
        assert_eq!(count_primes_in_ap(0, 100, 2, 1).unwrap(), 24);
        assert_eq!(count_primes_in_ap(50, 50, 7, 3).unwrap(), 0);
        assert_eq!(count_primes_in_ap(0, 100, 1, 0).unwrap(), 25);
    }

    #[test]
    fn progression_errors() {
        assert!(count_primes_in_ap(0, 100, 4, 2).is_err());
        assert!(count_primes_in_ap(0, 100, 0, 0).is_err());
        assert!(count_primes_in_ap(0, 100, 4, 5).is_err());
        assert!(count_primes_in_ap(10, 5, 4, 1).is_err());
        assert!(count_primes_in(10, 5).is_err());
    }

    #[test]
    fn residue_table_matches_single_queries() {
        let table = count_primes_by_residue(1000, 50_000, 30).unwrap();
        for l in 0..30u64 {
            if l.gcd(&30) == 1 {
                assert_eq!(
                    table[l as usize],
                    count_primes_in_ap(1000, 50_000, 30, l).unwrap()
                );
            }
        }
        assert_eq!(
            table.iter().sum::<u64>(),
            count_primes_in(1000, 50_000).unwrap()
        );
    }
}
