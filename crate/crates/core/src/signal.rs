//! Reproducible test signals.

use crate::coeffs::CoefficientVector;
use crate::error::{domain, Result};
use crate::sphere::{axis_rotation, Rotation, SpherePoint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unit-norm signal in `Π_L(𝕊^{d-1})` whose real and imaginary parts are drawn
/// uniformly from `(-1, 1)` in layout order from a ChaCha8 stream seeded with `seed`.
pub fn random_signal(d: usize, max_degree: usize, seed: u64) -> Result<CoefficientVector> {
    if d < 3 {
        return domain(format!("dimension must be at least 3, got {d}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CoefficientVector::zeros(d, max_degree);
    for c in v.as_mut_slice() {
        *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let norm = v.norm_sqr().sqrt();
    for c in v.as_mut_slice() {
        *c /= norm;
    }
    Ok(v)
}

/// Band-limited signal with every harmonic of degree `n` in `lo..=hi` set to one, normalized.
pub fn band_signal(d: usize, lo: usize, hi: usize) -> Result<CoefficientVector> {
    if lo > hi {
        return domain("empty band");
    }
    let mut v = CoefficientVector::zeros(d, hi);
    for n in lo..=hi {
        let r = v.degree_range(n);
        v.as_mut_slice()[r].iter_mut().for_each(|c| *c = Complex64::new(1.0, 0.0));
    }
    let norm = v.norm_sqr().sqrt();
    v.as_mut_slice().iter_mut().for_each(|c| *c /= norm);
    Ok(v)
}

/// Uniformly distributed point on `𝕊^{d-1}` (rejection from the cube).
pub fn random_point<R: Rng>(d: usize, rng: &mut R) -> SpherePoint {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 > 1e-4 && r2 <= 1.0 {
            return SpherePoint::from_unit_unchecked(x);
        }
    }
}

/// Random rotation: a product of `d²` random plane rotations.
pub fn random_rotation<R: Rng>(d: usize, rng: &mut R) -> Rotation {
    let mut g = Rotation::identity(d);
    for _ in 0..d * d {
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        g = g.compose(&axis_rotation(d, i, j, a).expect("valid plane"));
    }
    g
}
