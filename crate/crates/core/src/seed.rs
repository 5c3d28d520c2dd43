//! Seed derivation for the independent random streams of a run.
//!
//! Every objective evaluation draws its measurements from its own stream,
//! identified by `(base seed, epoch, slot)`. Slot 0 is the evaluation at the
//! current parameters; gradient evaluations use the slots handed out by
//! [`crate::grad`]. Derived seeds depend only on their inputs, so shifted
//! evaluations can run in any order or concurrently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every seeded stream in the crate.
pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `base ⊕ hash(epoch, slot)`.
pub fn derive(base: u64, epoch: u64, slot: u64) -> u64 {
    base ^ mix64(mix64(epoch) ^ slot.rotate_left(32) ^ 0x5EED)
}
