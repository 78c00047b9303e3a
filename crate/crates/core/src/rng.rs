//! Seed expansion and per-record random streams.
//!
//! The layout is frozen so outputs are reproducible across rewrites and
//! worker counts:
//!
//! * A derived seed is `splitmix64(seed ^ splitmix64(tag))`.
//! * Record `r` of a sampling run with seed `s` draws from
//!   `ChaCha8Rng::seed_from_u64(s)` switched to stream `r`. Within a record,
//!   values are consumed in a fixed order (topological node order for
//!   Bayesian networks, column order for the copula).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer (Steele, Lea & Flood).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// Independent stream for one record.
pub fn record_stream(seed: u64, record: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(record);
    rng
}

/// Sequential generator for non-record draws (privacy noise, permutations).
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = record_stream(7, 0).random();
        let b: u64 = record_stream(7, 1).random();
        let a2: u64 = record_stream(7, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }

    #[test]
    fn derived_seeds_depend_on_tag() {
        assert_ne!(derive_seed(1, 1), derive_seed(1, 2));
        assert_eq!(derive_seed(1, 1), derive_seed(1, 1));
    }
}
