use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherewave::quadrature::sphere_rule;
use spherewave::sphere::{enumerate_up_to, eval_harmonic};
use spherewave::transform::{evaluate, harmonics_at, GridTransform};
use spherewave::CoefficientVector;

fn random_coeffs(d: usize, l: usize, seed: u64) -> CoefficientVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = CoefficientVector::zeros(d, l).len();
    let data = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CoefficientVector::from_dense(d, l, data).unwrap()
}

#[test]
fn grid_synthesis_matches_pointwise_harmonics() {
    for d in 3..=5 {
        let l = 6;
        let rule = sphere_rule(d - 1, 7).unwrap();
        let t = GridTransform::for_rule(&rule, l).unwrap();
        let c = random_coeffs(d, l, d as u64);
        let vals = t.synthesize(&c);
        let idx = enumerate_up_to(d, l);
        for (q, p) in rule.points.iter().enumerate().step_by(7) {
            let direct: Complex64 = idx.iter().map(|i| c.get(i) * eval_harmonic(i, p)).sum();
            assert!((direct - vals[q]).norm() < 1e-11, "d={d} node {q}");
            assert!((evaluate(&c, p) - direct).norm() < 1e-11);
        }
        let h = harmonics_at(&rule.points[5], l);
        for (i, ix) in idx.iter().enumerate() {
            assert!((h[i] - eval_harmonic(ix, &rule.points[5])).norm() < 1e-12);
        }
    }
}

#[test]
fn analysis_inverts_synthesis() {
    for d in 3..=5 {
        let l = 9;
        let rule = sphere_rule(d - 1, 2 * l).unwrap();
        let t = GridTransform::for_rule(&rule, l).unwrap();
        let c = random_coeffs(d, l, 11 + d as u64);
        let back = t.analyze(&t.synthesize(&c));
        assert!(back.max_abs_diff(&c) < 1e-12, "d={d}: {}", back.max_abs_diff(&c));
    }
}
