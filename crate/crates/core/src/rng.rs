//! Deterministic random streams.
//!
//! Every random draw in the crate goes through [`LabRng`], a ChaCha8 stream
//! cipher keyed by a 64-bit seed. Experiments derive one independent stream
//! per trial with [`trial_rng`] so that results do not depend on worker
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for trial `trial` of experiment `name` under `seed`.
///
/// The 32-byte key is `seed (LE) || trial (LE) || fnv1a64(name) (LE) ||
/// fnv1a64(name) rotated by 32 (LE)`; ports in other languages can rebuild
/// the same trial partition from this description.
pub fn trial_rng(seed: u64, name: &str, trial: u64) -> LabRng {
    let h = fnv1a64(name.as_bytes());
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..24].copy_from_slice(&h.to_le_bytes());
    key[24..].copy_from_slice(&h.rotate_left(32).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
