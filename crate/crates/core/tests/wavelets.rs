use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spherewave::quadrature::sphere_rule;
use spherewave::sphere::{rotation_to_north, Rotation, SpherePoint};
use spherewave::transform::GridTransform;
use spherewave::wavelet::{
    kernel_decomposition, optimal_profile, psi_slice, scaling_coeffs, wavelet_coeffs, SliceExpansion,
    WaveletEvaluator,
};
use spherewave::{DirectionalProfile, FilterProfile, WaveletSpec};

fn random_point(d: usize, rng: &mut ChaCha8Rng) -> SpherePoint {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 && n < 1.0 {
            return SpherePoint::from_cartesian(x.iter().map(|v| v / n).collect()).unwrap();
        }
    }
}

fn random_rotation(d: usize, rng: &mut ChaCha8Rng) -> Rotation {
    let a = rotation_to_north(&random_point(d, rng));
    let b = rotation_to_north(&random_point(d, rng));
    a.compose(&b.inverse())
}

fn specs() -> Vec<WaveletSpec> {
    let f = FilterProfile::SmoothBump;
    let mut v = Vec::new();
    for d in [3, 4, 5] {
        v.push(WaveletSpec::new(d, DirectionalProfile::zonal(), f, 4.0).unwrap());
    }
    for k in [1, 2, 4] {
        v.push(WaveletSpec::new(3, DirectionalProfile::d3_convention(k), f, 4.0).unwrap());
        v.push(WaveletSpec::new(4, optimal_profile(4, k).unwrap(), f, 4.0).unwrap());
        v.push(WaveletSpec::new(5, optimal_profile(5, k).unwrap(), FilterProfile::Spline { q: 3 }, 3.0).unwrap());
    }
    v
}

fn kernel_value(spec: &WaveletSpec, g: &Rotation, x: &[f64]) -> Complex64 {
    let d = spec.d();
    let eta = g.column(d - 1);
    let t: f64 = eta.iter().zip(x).map(|(a, b)| a * b).sum();
    let mut acc = Complex64::new(0.0, 0.0);
    for grp in kernel_decomposition(spec) {
        let q = grp.radial.eval(t.clamp(-1.0, 1.0));
        for dir in &grp.directions {
            let z = dir.vector(g);
            let lin: Complex64 = z.iter().zip(x).map(|(a, b)| a * b).sum();
            acc += q * lin.powu(grp.power as u32);
        }
    }
    acc
}

#[test]
fn three_evaluation_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in specs() {
        let ev = WaveletEvaluator::new(&spec);
        for _ in 0..50 {
            let p = random_point(spec.d(), &mut rng);
            let g = random_rotation(spec.d(), &mut rng);
            let generic = ev.eval_generic(&SpherePoint::from_cartesian(g.apply_inverse(p.cartesian())).unwrap());
            let fast = ev.eval_rotated(&g, &p);
            let kern = kernel_value(&spec, &g, p.cartesian());
            assert!((generic - fast).norm() < 1e-9, "{spec:?}: {generic} vs {fast}");
            assert!((generic - kern).norm() < 1e-9, "{spec:?}: {generic} vs {kern}");
        }
    }
}

#[test]
fn l2_norm_by_quadrature() {
    for spec in specs() {
        let c = wavelet_coeffs(&spec);
        let rule = sphere_rule(spec.d() - 1, 2 * c.max_degree()).unwrap();
        let t = GridTransform::for_rule(&rule, c.max_degree()).unwrap();
        let vals = t.synthesize(&c);
        let q: f64 = vals.iter().zip(&rule.weights).map(|(v, w)| w * v.norm_sqr()).sum();
        assert!((q - spec.norm_sqr()).abs() < 1e-9 * spec.norm_sqr());
        assert!((c.norm_sqr() - spec.norm_sqr()).abs() < 1e-9 * spec.norm_sqr());
    }
}

#[test]
fn pole_value_of_zonal_wavelet() {
    for d in [3, 4, 5] {
        let spec = WaveletSpec::new(d, DirectionalProfile::zonal(), FilterProfile::SmoothBump, 6.0).unwrap();
        let ev = WaveletEvaluator::new(&spec);
        let v = ev.eval(&SpherePoint::north(d));
        let want: f64 = (0..20)
            .map(|n| {
                let df = d as f64;
                let k = FilterProfile::SmoothBump.kappa_unchecked(n as f64 / 6.0);
                (2.0 * n as f64 + df - 2.0) / (df - 2.0) * k * spherewave::specfun::gegenbauer_at_one((df - 2.0) / 2.0, n)
            })
            .sum();
        assert!((v.re - want).abs() < 1e-9 * want && v.im.abs() < 1e-12);
    }
}

#[test]
fn symmetric_wavelets_are_stabilizer_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in [4, 5] {
        let spec = WaveletSpec::new(d, optimal_profile(d, 3).unwrap(), FilterProfile::SmoothBump, 4.0).unwrap();
        let ev = WaveletEvaluator::new(&spec);
        for _ in 0..20 {
            let p = random_point(d, &mut rng);
            // rotation of the first d-2 coordinates
            let h = random_rotation(d - 2, &mut rng).embed().embed();
            let q = SpherePoint::from_cartesian(h.apply(p.cartesian())).unwrap();
            assert!((ev.eval(&p) - ev.eval(&q)).norm() < 1e-10);
        }
    }
}

#[test]
fn slice_matches_wavelet_and_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [4, 5] {
        for k in [1, 2, 4] {
            // every supported degree exceeds K, so all table rows share the parity of K
            let spec = WaveletSpec::new(d, optimal_profile(d, k).unwrap(), FilterProfile::SmoothBump, 8.0).unwrap();
            assert!(spec.min_degree() >= k);
            let ev = WaveletEvaluator::new(&spec);
            let slice = SliceExpansion::new(&spec).unwrap();
            for _ in 0..20 {
                let t = rng.gen_range(0.0..std::f64::consts::PI);
                let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                let eta = random_point(d - 2, &mut rng);
                let mut x = vec![0.0; d];
                x[d - 1] = t.cos();
                x[d - 2] = t.sin() * phi.cos();
                for i in 0..d - 2 {
                    x[i] = t.sin() * phi.sin() * eta.cartesian()[i];
                }
                let direct = ev.eval_cartesian(&x);
                let s = psi_slice(&spec, t, phi).unwrap();
                assert!((direct.re - s).abs() < 1e-9 && direct.im.abs() < 1e-12);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert!((slice.value(t, phi + std::f64::consts::PI).re - sign * s).abs() < 1e-10);
            }
            let a = slice.value(0.0, 0.3);
            let b = slice.value(0.0, 2.0);
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn d3_slice_matches_wavelet() {
    let spec = WaveletSpec::new(3, DirectionalProfile::d3_convention(3), FilterProfile::SmoothBump, 6.0).unwrap();
    let ev = WaveletEvaluator::new(&spec);
    let slice = SliceExpansion::new(&spec).unwrap();
    for i in 0..30 {
        let t = 0.1 * i as f64;
        let phi = 0.37 * i as f64;
        let x = vec![t.sin() * phi.sin(), t.sin() * phi.cos(), t.cos()];
        assert!((ev.eval_cartesian(&x) - slice.value(t, phi)).norm() < 1e-9);
    }
}

#[test]
fn scaling_function_gegenbauer_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in [3, 4, 5] {
        for j in 0..4 {
            let f = FilterProfile::SmoothBump;
            let c = scaling_coeffs(f, d, j);
            for _ in 0..10 {
                let p = random_point(d, &mut rng);
                let v = spherewave::transform::evaluate(&c, &p);
                let want: f64 = (0..=c.max_degree())
                    .map(|n| {
                        let phi = f.phi_unchecked(n as f64 / 2f64.powi(j as i32));
                        phi * phi * spherewave::sphere::addition_kernel(d, n, p.cartesian()[d - 1])
                    })
                    .sum();
                assert!((v.re - want).abs() < 1e-10 && v.im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn low_degree_rows_break_parity_symmetry() {
    // for n < K the optimal rows use K_n = n, whose parity may differ from K
    let spec = WaveletSpec::new(4, optimal_profile(4, 4).unwrap(), FilterProfile::SmoothBump, 4.0).unwrap();
    let slice = SliceExpansion::new(&spec).unwrap();
    let (t, phi) = (0.4, 0.3);
    let gap = (slice.value(t, phi) - slice.value(t, phi + std::f64::consts::PI)).norm();
    assert!(gap > 1e-6);
}
