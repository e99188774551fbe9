//! Named random streams: every consumer draws from its own ChaCha stream
//! keyed by a name, so adding a consumer never shifts another one's draws.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 64-bit FNV-1a; stable across platforms and compiler versions.
fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name));
    rng
}

/// One seed drawn from the named stream.
pub fn derive(seed: u64, name: &str) -> u64 {
    stream(seed, name).next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_stable_and_distinct() {
        assert_eq!(derive(42, "cbr/0"), derive(42, "cbr/0"));
        assert_ne!(derive(42, "cbr/0"), derive(42, "cbr/1"));
        assert_ne!(derive(42, "cbr/0"), derive(43, "cbr/0"));
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a("a"), 0xaf63_dc4c_8601_ec8c);
    }
}
