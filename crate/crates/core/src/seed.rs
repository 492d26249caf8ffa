//! Seed splitting.
//!
//! Every independent run draws from its own ChaCha8 stream: the generator is
//! seeded with the root seed and then switched to stream number `stream`.
//! Streams are identified by small integer tags packed by [`stream_id`], so the
//! outcome of a run depends only on the root seed and its tags, never on the
//! order in which runs execute.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_for(root: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng
}

/// Packs `(experiment, group, trial)` into one stream number.
/// `experiment` < 2^8, `group` < 2^24, `trial` < 2^32.
pub fn stream_id(experiment: u8, group: u32, trial: u32) -> u64 {
    debug_assert!(group < 1 << 24);
    (u64::from(experiment) << 56) | (u64::from(group) << 32) | u64::from(trial)
}
