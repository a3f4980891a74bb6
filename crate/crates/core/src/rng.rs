//! Seeded random streams.
//!
//! Every stochastic step draws from a ChaCha stream keyed by
//! `(seed, purpose, index)`, so results do not depend on which thread handles
//! which cell or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Stream = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Descent = 0x6465_7363,
    MonteCarlo = 0x6d63_7261,
    Points = 0x706f_696e,
    Bench = 0x6265_6e63,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> Stream {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ purpose as u64) ^ index);
    ChaCha8Rng::seed_from_u64(key)
}

/// Uniform direction on the unit sphere `S^{d-1}`, by normalizing a standard
/// Gaussian draw. All-zero draws are resampled.
pub fn sample_unit_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut y: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = crate::linalg::normalize(&mut y);
        if n > 0.0 && n.is_finite() {
            return y;
        }
    }
}

/// `n` points uniform in `[0, 1]^d`.
pub fn uniform_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream(seed, Purpose::Points, d as u64);
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}
