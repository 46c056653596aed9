//! Exact prime infrastructure: bit-packed segmented sieving, interval and
//! progression counts, deterministic Miller–Rabin, the offset logarithmic
//! integral and small-scale factoring.
//!
//! Every interval count uses the `(lo, hi]` convention.

mod count;
mod factor;
mod li;
mod primality;
mod segment;

pub use count::{
    count_primes_by_residue, count_primes_in, count_primes_in_ap, primes_in, PrimeTable,
};
pub use factor::{distinct_prime_factors, euler_phi};
pub use li::logarithmic_integral;
pub use primality::is_prime;
pub use segment::{sieve_segment, small_primes, PrimeSegment, SegmentSieve, DEFAULT_SEGMENT_LIMIT};

pub(crate) use count::map_chunks;
pub(crate) use primality::pow_mod;
pub(crate) use segment::base_primes;
pub(crate) use segment::sieve_unchecked as segment_from_base;
