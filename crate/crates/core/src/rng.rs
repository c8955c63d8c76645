//! Deterministic, splittable random streams.
//!
//! Every consumer of randomness derives its own ChaCha stream from a
//! `(master seed, trial index, role)` triple, so Monte Carlo trials can run
//! in any order or in parallel and still reproduce bit-identical results.

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream roles, so independent uses of randomness inside one trial never
/// collide.
pub mod role {
    pub const TAU: u64 = 1;
    pub const SIGNAL: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const MEASURE: u64 = 4;
    pub const EQUIVALENT_MODEL: u64 = 5;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive the ChaCha stream for `(seed, trial, role)`.
pub fn stream(seed: u64, trial: u64, role: u64) -> ChaCha8Rng {
    let mut state = seed ^ trial.rotate_left(24) ^ role.rotate_left(48);
    // run the mixer a few times so nearby keys decorrelate
    let mut key = [0u8; 32];
    let mut s2 = splitmix64(&mut state) ^ trial;
    let mut s3 = splitmix64(&mut s2) ^ role;
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s3).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// One draw from the standard complex Gaussian `CN(0, 1)`:
/// real and imaginary parts are independent `N(0, 1/2)`.
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal);
    let im: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal);
    c64::new(re * scale, im * scale)
}
