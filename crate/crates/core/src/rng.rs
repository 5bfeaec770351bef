//! Deterministic random-number substreams.
//!
//! Every random draw in the library comes from a ChaCha stream keyed by a
//! `(seed, context, index)` triple, so results never depend on scheduling or
//! worker count. Gaussian variates use the Box-Muller transform.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Per-frame simulation draws.
pub const CTX_FRAME: u32 = 1;
/// Pair-interleaver permutations.
pub const CTX_INTERLEAVER: u32 = 2;
/// Construction-time Monte-Carlo level fitting.
pub const CTX_CONSTRUCTION: u32 = 3;

/// Returns an independent generator for `(seed, ctx, index)`.
pub fn substream(seed: u64, ctx: u32, index: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..12].copy_from_slice(&ctx.to_le_bytes());
    key[12..20].copy_from_slice(&index.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// One pair of independent standard-normal variates (Box-Muller).
pub fn standard_normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    // 1 - gen() lies in (0, 1], keeping the logarithm finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// A circularly symmetric complex Gaussian with total variance `variance`
/// (each real dimension carries `variance / 2`).
pub fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let (re, im) = standard_normal_pair(rng);
    Complex64::new(scale * re, scale * im)
}
