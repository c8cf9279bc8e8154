//! Seeded random streams.
//!
//! All stochastic code takes a caller-supplied RNG; the harness derives one
//! independent stream per task from a master seed so results do not depend on
//! how tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate. ChaCha has a portable, documented stream.
pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over the label bytes; stable across platforms and releases.
fn hash_label(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Derives a stream seed from a master seed, a series label and a run index.
///
/// The label (not its position in a sweep) feeds the hash, so adding a series
/// never changes the seeds of the others.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ hash_label(label));
    splitmix64(h ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}
