//! Seeded, splittable randomness.
//!
//! Every stochastic operation (bootstrap resampling, system subsampling)
//! draws its bits from ChaCha8 keyed by the user seed, with one independent
//! stream per unit of work. The generator, the seeding scheme, and the
//! index-sampling procedures below are fixed, so a given seed reproduces the
//! same results regardless of platform or scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

/// One independent ChaCha8 stream for work unit `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// FNV-1a 64-bit hash; used to derive stream indices from labels and to
/// fingerprint configurations.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Uniform draw from `0..bound` by unbiased rejection on `next_u64`.
pub fn next_below(rng: &mut impl Rng, bound: u64) -> u64 {
    assert!(bound > 0, "bound must be positive");
    let limit = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % bound;
        }
    }
}

/// `k` distinct indices from `0..n`, drawn uniformly without replacement
/// (partial Fisher-Yates). Order of the result is the draw order.
pub fn sample_without_replacement(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot sample {k} of {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + next_below(rng, (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// `n` indices from `0..n` drawn with replacement (one bootstrap resample).
pub fn resample_indices(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| next_below(rng, n as u64) as usize).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a1: Vec<u64> = (0..4).map(|_| stream_rng(7, 0).next_u64()).collect();
        let a2: Vec<u64> = (0..4).map(|_| stream_rng(7, 0).next_u64()).collect();
        assert_eq!(a1, a2);
        assert_ne!(stream_rng(7, 0).next_u64(), stream_rng(7, 1).next_u64());
        assert_ne!(stream_rng(7, 0).next_u64(), stream_rng(8, 0).next_u64());
    }

    #[test]
    fn sample_without_replacement_is_a_subset() {
        let mut rng = stream_rng(42, 0);
        for n in 1..20usize {
            let k = n / 2 + 1;
            let mut got = sample_without_replacement(&mut rng, n, k.min(n));
            got.sort_unstable();
            got.dedup();
            assert_eq!(got.len(), k.min(n));
            assert!(got.iter().all(|&i| i < n));
        }
    }

    #[test]
    fn next_below_covers_small_range() {
        let mut rng = stream_rng(1, 0);
        let mut seen = [false; 5];
        for _ in 0..200 {
            seen[next_below(&mut rng, 5) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn fnv_is_stable() {
        // Pinned so derived stream indices never drift between releases.
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
    }
}
