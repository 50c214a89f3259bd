//! Per-trial random streams.
//!
//! Every trial owns independent ChaCha8 streams keyed by the master seed and
//! addressed by `(trial_index, purpose)`:
//!
//! ```text
//! key    = splitmix64 words s1..s4, with s_i = mix(master_seed + i * 0x9e3779b97f4a7c15)
//! stream = 4 * trial_index + purpose
//! ```
//!
//! ChaCha is counter based, so the stream for trial `i` does not depend on how
//! many draws other trials made or on the order in which trials ran. The
//! derivation is part of the reproducibility contract; changing it changes
//! every simulated number.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// What a stream is used for inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// Network realization: nodes, lines, shadowing, fading, beams.
    Network = 0,
    /// Receiving users and per-line shadowing needed only for load.
    Load = 1,
    /// Anything else (geometry self-checks, K-function runs).
    Aux = 2,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key(master_seed: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    for i in 0..4u64 {
        let w = splitmix64(master_seed.wrapping_add((i + 1).wrapping_mul(GOLDEN)));
        out[(i as usize) * 8..(i as usize + 1) * 8].copy_from_slice(&w.to_le_bytes());
    }
    out
}

pub fn trial_stream(master_seed: u64, trial_index: u64, purpose: Purpose) -> Stream {
    let mut rng = ChaCha8Rng::from_seed(key(master_seed));
    rng.set_stream(trial_index.wrapping_mul(4).wrapping_add(purpose as u64));
    rng
}

/// A single stream for code outside the trial loop.
pub fn seeded(seed: u64) -> Stream {
    trial_stream(seed, u64::MAX / 4, Purpose::Aux)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_address_same_sequence() {
        let a: Vec<u64> = trial_stream(7, 3, Purpose::Network).random_iter().take(8).collect();
        let b: Vec<u64> = trial_stream(7, 3, Purpose::Network).random_iter().take(8).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_addresses_differ() {
        let first = |s, t, p| trial_stream(s, t, p).random::<u64>();
        let base = first(7, 3, Purpose::Network);
        assert_ne!(base, first(7, 4, Purpose::Network));
        assert_ne!(base, first(7, 3, Purpose::Load));
        assert_ne!(base, first(8, 3, Purpose::Network));
    }

    #[test]
    fn derivation_is_frozen() {
        // Changing this value means every stored simulation output changes too.
        let v = trial_stream(0, 0, Purpose::Network).random::<u64>();
        assert_eq!(v, trial_stream(0, 0, Purpose::Network).random::<u64>());
        assert_eq!(key(0)[..8], splitmix64(GOLDEN).to_le_bytes());
    }
}
