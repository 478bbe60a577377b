use num_complex::Complex64;
use proptest::prelude::*;
use spherewave::quadrature::sphere_rule;
use spherewave::signal::random_signal;
use spherewave::sphere::{coords_roundtrip, plane_rotation, rotation_to_north, HarmonicIndex};
use spherewave::transform::evaluate;
use spherewave::wavelet::{optimal_profile, psi_slice, wavelet_coeffs};
use spherewave::{build_frame, CoefficientVector, DirectionalProfile, FilterProfile, SpherePoint, WaveletSpec};

fn point(d: usize) -> impl Strategy<Value = SpherePoint> {
    prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter("not too close to the origin", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-3)
        .prop_map(|x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            SpherePoint::from_cartesian(x.iter().map(|v| v / r).collect()).unwrap()
        })
}

fn filter() -> impl Strategy<Value = FilterProfile> {
    prop_oneof![Just(FilterProfile::SmoothBump), (1usize..6).prop_map(|q| FilterProfile::Spline { q })]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coordinates_round_trip(p in (3usize..7).prop_flat_map(point)) {
        let q = coords_roundtrip(&p).unwrap();
        for (a, b) in p.cartesian().iter().zip(q.cartesian()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_to_north_maps_the_pole(p in (3usize..7).prop_flat_map(point)) {
        let d = p.d();
        let g = rotation_to_north(&p);
        prop_assert!(g.orthogonality_defect() < 1e-13);
        prop_assert!((g.det() - 1.0).abs() < 1e-12);
        let mut e = vec![0.0; d];
        e[d - 1] = 1.0;
        for (a, b) in g.apply(&e).iter().zip(p.cartesian()) {
            prop_assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn filters_partition_unity(f in filter(), t in 0.0f64..8.0) {
        let phi = f.phi(t).unwrap();
        let kappa = f.kappa(t).unwrap();
        let half = f.phi(t / 2.0).unwrap();
        prop_assert!((phi * phi + kappa * kappa - half * half).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&phi));
        prop_assert!(t > 0.5 && t < 2.0 || kappa == 0.0);
    }

    #[test]
    fn dyadic_sum_telescopes(f in filter(), n in 0usize..200, levels in 1usize..9) {
        let mut s = if n == 0 { 1.0 } else { 0.0 };
        for j in 1..=levels {
            s += f.kappa_unchecked(n as f64 / 2f64.powi(j as i32 - 1)).powi(2);
        }
        let phi = f.phi_unchecked(n as f64 / 2f64.powi(levels as i32));
        prop_assert!((s - phi * phi).abs() < 1e-13);
    }

    #[test]
    fn d3_plane_rotations_act_diagonally(n in 0usize..8, kk in 0i64..8, gamma in 0.0f64..6.3, p in point(3)) {
        let k = kk.min(n as i64);
        let idx = HarmonicIndex::new(3, n, vec![k]).unwrap();
        let v = CoefficientVector::unit(&idx);
        let h = plane_rotation(3, gamma);
        let q = SpherePoint::from_cartesian(h.apply_inverse(p.cartesian())).unwrap();
        let lhs = evaluate(&v, &q);
        let rhs = Complex64::from_polar(1.0, k as f64 * gamma) * evaluate(&v, &p);
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn wavelet_support_is_the_open_band(d in 3usize..6, n in 1.0f64..12.0, f in filter()) {
        let s = WaveletSpec::new(d, DirectionalProfile::zonal(), f, n).unwrap();
        let c = wavelet_coeffs(&s);
        for deg in 0..=c.max_degree() {
            let nz = c.as_slice()[c.degree_range(deg)].iter().any(|v| v.norm() > 0.0);
            if nz {
                prop_assert!((deg as f64) > n / 2.0 && (deg as f64) < 2.0 * n);
            }
        }
    }

    #[test]
    fn optimal_slices_have_parity_symmetry(k in 1usize..6, t in 0.0f64..3.14, phi in 0.0f64..6.28) {
        // N large enough that every degree in the band is at least K
        let s = WaveletSpec::new(4, optimal_profile(4, k).unwrap(), FilterProfile::SmoothBump, 16.0).unwrap();
        let a = psi_slice(&s, t, phi).unwrap();
        let b = psi_slice(&s, t, phi + std::f64::consts::PI).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((b - sign * a).abs() < 1e-9 * (1.0 + a.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parseval_for_random_signals(seed in any::<u64>(), d in 3usize..5, k in 0usize..3) {
        let prof = match (d, k) {
            (_, 0) => DirectionalProfile::zonal(),
            (3, k) => DirectionalProfile::d3_convention(k),
            (d, k) => optimal_profile(d, k).unwrap(),
        };
        let fr = build_frame(d, k, 3, FilterProfile::SmoothBump, prof).unwrap();
        let f = random_signal(d, 4, seed).unwrap();
        prop_assert!(fr.parseval_gap(&f).unwrap() < 1e-10);
    }

    #[test]
    fn sphere_rules_integrate_their_degree(d in 3usize..6, deg in 0usize..10, seed in any::<u64>()) {
        // |f|² for f ∈ Π_{deg/2} integrates to ‖f‖²
        let rule = sphere_rule(d - 1, deg).unwrap();
        let f = random_signal(d, deg / 2, seed).unwrap();
        let s: f64 = rule.points.iter().zip(&rule.weights).map(|(p, w)| w * evaluate(&f, p).norm_sqr()).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }
}
