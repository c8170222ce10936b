//! Seed splitting.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream keyed by
//! the run seed; independent consumers use distinct stream ids, so results do
//! not depend on scheduling or on how many other consumers exist.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream ids used inside the crate. Callers may use any id `>= 1 << 32`.
pub mod streams {
    pub const BROLIN: u64 = 1;
    pub const GROMOV: u64 = 2;
    pub const LATTICE: u64 = 3;
    pub const POINTS: u64 = 4;
}

/// Independent generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform double in `[0, 1)` with 53 random bits.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..n` (`n > 0`), rejection sampled.
pub fn below<R: RngCore>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0);
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}

/// Uniform integer in `lo..=hi`.
pub fn range_i64<R: RngCore>(rng: &mut R, lo: i64, hi: i64) -> i64 {
    assert!(lo <= hi);
    lo + below(rng, (hi - lo) as u64 + 1) as i64
}

/// Standard normal deviate (Box-Muller).
pub fn normal<R: RngCore>(rng: &mut R) -> f64 {
    loop {
        let u = unit_f64(rng);
        if u > 0.0 {
            let v = unit_f64(rng);
            return libm::sqrt(-2.0 * libm::log(u)) * libm::cos(core::f64::consts::TAU * v);
        }
    }
}
