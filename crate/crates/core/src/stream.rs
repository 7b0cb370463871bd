//! Reproducible random substreams.
//!
//! Replication `i` of an experiment seeded with `master` always draws from
//! ChaCha8 keyed by `master` on stream `i`, so results do not depend on how
//! replications are scheduled.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// The generator owned by one replication.
pub type Substream = ChaCha8Rng;

/// Substream `index` of the family keyed by `master`.
pub fn substream(master: u64, index: u64) -> Substream {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// SplitMix64 finalizer, used to derive independent master seeds for the
/// cells of an experiment grid.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform variate on the open interval (0, 1) with 53 bits of resolution.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}
