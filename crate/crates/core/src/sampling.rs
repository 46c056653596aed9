//! Reproducible sampling. A run seed fans out into named sub-streams
//! (one ChaCha stream per use) so adding a consumer never perturbs another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a, used to map stream names to ChaCha stream ids.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn stream_rng(seed: u64, stream: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(stream));
    rng
}

/// `count` integers drawn uniformly from `[lo, hi]`.
pub fn uniform_integers(seed: u64, stream: &str, lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let mut rng = stream_rng(seed, stream);
    (0..count).map(|_| rng.gen_range(lo..=hi)).collect()
}
