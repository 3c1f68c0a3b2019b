use landmark_core::grouping::GroupingProfile;
use landmark_core::linalg;
use landmark_core::rng::seeded;
use landmark_core::special::regularized_lower_gamma;
use landmark_core::ManifoldModel;
use proptest::prelude::*;

fn models() -> impl Strategy<Value = ManifoldModel> {
    prop_oneof![
        (1usize..5, 0.2f64..3.0, 0usize..6).prop_map(|(d, r, pad)| ManifoldModel::sphere(d, r, d + 1 + pad).unwrap()),
        (0.2f64..3.0, 2usize..8).prop_map(|(r, dim)| ManifoldModel::circle(r, dim).unwrap()),
        (0.5f64..3.0, 0.2f64..1.0, 4usize..8).prop_map(|(a, b, dim)| ManifoldModel::flat_torus(a.max(b), b, dim).unwrap()),
    ]
}

fn noisy_point(m: &ManifoldModel, seed: u64, spread: f64) -> Vec<f64> {
    let mut rng = seeded(seed);
    let mut p = m.sample_uniform(&mut rng);
    for (i, v) in p.iter_mut().enumerate() {
        *v += spread * (((seed >> (i % 60)) & 7) as f64 - 3.5) / 3.5;
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_is_idempotent_and_lands_on_m(m in models(), seed in any::<u64>(), spread in 0.0f64..0.3) {
        let x = noisy_point(&m, seed, spread * m.scale());
        let p = m.project(&x).unwrap();
        prop_assert!(m.check_on_manifold(&p).is_ok());
        let pp = m.project(&p).unwrap();
        prop_assert!(linalg::dist(&p, &pp) <= 1e-12 * m.scale());
    }

    #[test]
    fn projection_is_nearest_among_samples(m in models(), seed in any::<u64>(), spread in 0.0f64..0.3) {
        let x = noisy_point(&m, seed, spread * m.scale());
        let d = m.extrinsic_distance(&x).unwrap();
        let mut rng = seeded(seed ^ 1);
        for _ in 0..50 {
            let y = m.sample_uniform(&mut rng);
            prop_assert!(d <= linalg::dist(&x, &y) + 1e-12);
        }
    }

    #[test]
    fn geodesic_dominates_chord(m in models(), a in any::<u64>(), b in any::<u64>()) {
        let p = m.sample_uniform(&mut seeded(a));
        let q = m.sample_uniform(&mut seeded(b));
        let g = m.geodesic_distance(&p, &q).unwrap();
        prop_assert!(g + 1e-12 >= linalg::dist(&p, &q));
        prop_assert!(g <= m.constants().diameter + 1e-12);
        prop_assert!((g - m.geodesic_distance(&q, &p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn geodesic_curvature_is_at_most_kappa(m in models(), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let base = m.sample_uniform(&mut rng);
        let v = m.random_unit_tangent(&base, &mut rng);
        let h = 1e-3 * m.scale();
        let at = |t: f64| {
            let w: Vec<f64> = v.iter().map(|x| x * t).collect();
            m.exp_map(&base, &w).unwrap()
        };
        let (minus, plus) = (at(-h), at(h));
        let accel: Vec<f64> = (0..base.len()).map(|i| (plus[i] - 2.0 * base[i] + minus[i]) / (h * h)).collect();
        prop_assert!(linalg::norm(&accel) <= m.constants().curvature * (1.0 + 1e-4) + 1e-6);
    }

    #[test]
    fn scaling_is_equivariant(m in models(), seed in any::<u64>(), c in 0.25f64..4.0) {
        let x = noisy_point(&m, seed, 0.2 * m.scale());
        let mc = m.scaled(c).unwrap();
        let cx: Vec<f64> = x.iter().map(|v| v * c).collect();
        let p = m.project(&x).unwrap();
        let pc = mc.project(&cx).unwrap();
        for (a, b) in p.iter().zip(&pc) {
            prop_assert!((a * c - b).abs() <= 1e-12 * c * m.scale());
        }
        let k = m.constants();
        let kc = mc.constants();
        prop_assert!((kc.reach - c * k.reach).abs() < 1e-12 * c * k.reach);
        prop_assert!((kc.curvature * c - k.curvature).abs() < 1e-12 * k.curvature);
    }

    #[test]
    fn incomplete_gamma_is_continuous_across_the_asymptotic_switch(z in -4.0f64..4.0) {
        let p: f64 = 2e4;
        let x = p + z * p.sqrt();
        // two series values below the switch extrapolate linearly to the
        // asymptotic value just above it
        let far = regularized_lower_gamma(p - 3e-6, x).unwrap();
        let near = regularized_lower_gamma(p - 1e-6, x).unwrap();
        let above = regularized_lower_gamma(p + 1e-6, x).unwrap();
        prop_assert!((2.0 * near - far - above).abs() < 1e-11);
    }
}

#[test]
fn grouping_probability_is_nonincreasing() {
    let profiles = [
        GroupingProfile::new(3.84_f64.sqrt(), 0.1, 128).unwrap(),
        GroupingProfile::from_s_star(1.6, 0.1, 256).unwrap(),
        GroupingProfile::from_s_star(2.3, 0.05, 1024).unwrap(),
        GroupingProfile::from_s_star(1.0, 1e-3, 1_000_000).unwrap(),
        GroupingProfile::from_s_star(1.0, 1e-4, 100_000_000).unwrap(),
        GroupingProfile::new(1.0, 0.1, 64).unwrap(),
    ];
    for g in &profiles {
        let mut prev = g.h(0.0);
        assert!((prev - 1.0).abs() < 1e-12 || g.dim < 100);
        for i in 1..=2000 {
            let s = g.radius * 1.01 * i as f64 / 2000.0;
            let v = g.h(s);
            assert!(v <= prev + 1e-15, "h increases at s = {s} (D = {})", g.dim);
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
        assert_eq!(g.h(g.radius * 1.01), 0.0);
    }
}
