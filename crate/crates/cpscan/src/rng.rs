//! Deterministic random-number plumbing.
//!
//! Every Monte Carlo routine in this crate draws from a ChaCha12 generator
//! keyed by a single `u64` master seed, with one *independent substream per
//! replicate* selected through the ChaCha stream counter. Replicate `i`
//! therefore produces the same draws no matter how many worker threads run,
//! in which order replicates are scheduled, or on which platform the binary
//! was built — results are a pure function of `(seed, replicate_index)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::dist::normal_quantile;

/// Generator for one replicate: master seed expands to the ChaCha key,
/// the replicate index selects the 64-bit stream counter.
pub fn replicate_rng(master_seed: u64, replicate: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(replicate);
    rng
}

/// Collapse several identifying integers (cell index, slot, method tag, ...)
/// into a derived master seed, so nested simulations get seeds that cannot
/// collide with the parent's replicate streams. SplitMix64 finalizer chain.
pub fn derive_seed(master_seed: u64, parts: &[u64]) -> u64 {
    let mut acc = mix64(master_seed ^ 0x7c15_8c47_9e37_79b9);
    for &p in parts {
        acc = mix64(acc ^ p);
    }
    acc
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw on the *open* interval (0, 1): 53 random bits centered in
/// the unit interval, so 0 and 1 are unreachable and `ln` / `Φ⁻¹` of the
/// result are always finite.
pub fn open_unit(rng: &mut impl Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64) * (1.0 / 9007199254740992.0) + (1.0 / 18014398509481984.0)
}

/// Standard normal draw by inversion: `Φ⁻¹(U)`, `U ~ (0, 1)`.
///
/// Inversion (rather than Ziggurat or Box-Muller) keeps the map from the
/// underlying bit stream to the sample monotone and consumes exactly one
/// `u64` per draw, which makes substream accounting trivial.
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    normal_quantile(open_unit(rng)).expect("open_unit draw lies strictly inside (0, 1)")
}

/// Exponential draw with the given mean, by inversion: `−mean · ln(U)`.
pub fn exponential(rng: &mut impl Rng, mean: f64) -> f64 {
    -mean * open_unit(rng).ln()
}
