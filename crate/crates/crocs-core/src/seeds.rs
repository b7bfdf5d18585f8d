//! Deterministic seed derivation.
//!
//! Every stochastic component (noise, interference, transmit jitter, stamp
//! jitter) and every experiment cell/trial draws from its own ChaCha stream.
//! Stream seeds are derived from a master seed plus a tag path, so that
//!
//! * identical configs + seeds reproduce byte-identical results,
//! * reordering parallel work cannot change any stream, and
//! * adding trials to one cell does not perturb another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One SplitMix64 step; the standard 64-bit finalizer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and an ordered tag path.
///
/// The same `(master, tags)` always yields the same child; distinct paths
/// yield statistically independent children.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &tag in tags {
        state ^= tag.wrapping_mul(0xD6E8_FEB8_6659_FD93);
        out ^= splitmix64(&mut state);
    }
    out
}

/// A ChaCha stream for the given seed path. See [`derive_seed`].
pub fn stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}
