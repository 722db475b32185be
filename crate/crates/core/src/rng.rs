//! Deterministic random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha stream keyed by
//! `(seed, index)`, so results do not depend on how work is split across
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{CMatrix, Complex64};

/// Stream `index` of the generator family keyed by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed from a parent seed and a label (splitmix64 finalizer).
pub fn derive_seed(parent: u64, label: u64) -> u64 {
    let mut z = parent ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Circularly-symmetric complex Gaussian sample with total variance `variance`.
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// `rows × cols` matrix of i.i.d. CN(0, variance) entries, filled column-major.
pub fn complex_normal_matrix<R: rand::Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for v in m.iter_mut() {
        *v = complex_normal(rng, variance);
    }
    m
}

/// Uniform phase on the unit circle.
pub fn unit_phase<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let theta = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(1.0, theta)
}
