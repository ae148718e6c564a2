use proptest::prelude::*;

use azema::filters::{
    conditional_density_first_kind, conditional_moment_first_kind, first_kind_series, first_kind_value, heat_kernel,
    normal_cdf, second_kind_series, sign_posterior, MeanderConstant, MomentMode,
};
use azema::functionals::{
    balayage_residual, excursions, last_zero, local_time, local_time_tanaka, next_zero, sgn, zero_set,
};
use azema::paths::{simulate_bm, simulate_skew_bm, SamplePath, TimeGrid};
use azema::rng::Seed;
use azema::solvers::{solve_first_kind_exact, solve_second_kind};

fn path_from(steps: Vec<f64>) -> SamplePath {
    let mut v = vec![0.0];
    for s in steps {
        v.push(v.last().unwrap() + s);
    }
    let n = v.len() - 1;
    SamplePath::new(TimeGrid::new(n as f64 * 0.01, n).unwrap(), v).unwrap()
}

fn steps() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![-1.0..1.0f64, Just(0.0)], 1..200)
}

proptest! {
    #[test]
    fn density_is_odd_symmetric_and_nonnegative(
        t in 0.1..8.0f64, q in 0.0..1.0f64, x in -6.0..6.0f64, y in -3.0..3.0f64, alpha in -3.0..3.0f64,
    ) {
        let g = q * t;
        let p = conditional_density_first_kind(t, x, y, g, alpha).unwrap();
        prop_assert!(p >= 0.0);
        prop_assert_eq!(p, conditional_density_first_kind(t, -x, -y, g, alpha).unwrap());
        if alpha == 0.0 {
            prop_assert!((p - heat_kernel(t, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_is_bounded_and_matches_first_moment(
        t in 0.1..8.0f64, q in 0.0..1.0f64, y in -3.0..3.0f64, alpha in -3.0..3.0f64,
    ) {
        let g = q * t;
        let m = first_kind_value(g, y, alpha);
        prop_assert!(m.abs() <= (2.0 * g / std::f64::consts::PI).sqrt());
        let m1 = conditional_moment_first_kind(1, t, g, y, alpha, MomentMode::DensityExact).unwrap();
        prop_assert!((m1 - m).abs() < 1e-10);
        let m2 = conditional_moment_first_kind(2, t, g, y, alpha, MomentMode::DensityExact).unwrap();
        prop_assert!((m2 - t).abs() < 1e-10 * t.max(1.0));
    }

    #[test]
    fn sign_posterior_is_a_centred_probability(y in -50.0..50.0f64, alpha in -3.0..3.0f64) {
        let s = sign_posterior(y, alpha);
        prop_assert!((-1.0..=1.0).contains(&s));
        prop_assert_eq!(s, -sign_posterior(-y, alpha));
    }

    #[test]
    fn normal_cdf_is_monotone_and_symmetric(x in -40.0..40.0f64, h in 0.0..1.0f64) {
        prop_assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() < 1e-15);
        prop_assert!(normal_cdf(x + h) >= normal_cdf(x));
    }

    #[test]
    fn zero_set_and_excursions_are_consistent(s in steps()) {
        let p = path_from(s);
        let z = zero_set(&p);
        let times = z.times();
        prop_assert_eq!(times[0], 0.0);
        prop_assert!(times.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(*times.last().unwrap() <= p.grid().t_max());
        let e = excursions(&p);
        for ex in &e.intervals {
            prop_assert!(ex.start < ex.end);
            for (i, t) in p.grid().times().enumerate() {
                if t > ex.start + 1e-12 && t < ex.end - 1e-12 {
                    prop_assert_eq!(sgn(p.values()[i]), ex.sign);
                }
            }
        }
        for (i, t) in p.grid().times().enumerate() {
            let g = last_zero(&p, t).unwrap();
            prop_assert!(g <= t + 1e-12);
            if p.values()[i] == 0.0 {
                prop_assert!((g - t).abs() < 1e-12);
            }
            if let Some(d) = next_zero(&p, t).unwrap() {
                prop_assert!(d > t);
            }
        }
    }

    #[test]
    fn local_times_are_nondecreasing(s in steps(), eps in 0.01..2.0f64) {
        let p = path_from(s);
        let lt = local_time(&p, eps).unwrap();
        prop_assert!(lt.symmetric.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(lt.right.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(lt.right.iter().zip(&lt.symmetric).all(|(r, s)| *r <= 2.0 * s + 1e-12));
        let tan = local_time_tanaka(&p);
        prop_assert_eq!(tan.symmetric[0], 0.0);
    }

    #[test]
    fn balayage_with_constant_k_telescopes(s in steps(), k in -3.0..3.0f64) {
        let p = path_from(s);
        let ks = vec![k; p.values().len()];
        prop_assert!(balayage_residual(p.values(), &ks) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn paths_are_deterministic_per_seed(root in any::<u64>(), stream in any::<u64>()) {
        let g = TimeGrid::new(1.0, 100).unwrap();
        let a = simulate_bm(&g, Seed::new(root, stream));
        let same = simulate_bm(&g, Seed::new(root, stream));
        let other = simulate_bm(&g, Seed::new(root, stream.wrapping_add(1)));
        prop_assert_eq!(a.values(), same.values());
        prop_assert_ne!(a.values(), other.values());
    }

    #[test]
    fn skew_bm_keeps_the_modulus(root in any::<u64>(), alpha in -1.0..=1.0f64) {
        let g = TimeGrid::new(1.0, 300).unwrap();
        let seed = Seed::new(root, 0);
        let x = simulate_skew_bm(&g, seed, alpha).unwrap();
        let b = simulate_bm(&g, seed);
        prop_assert!(x.values().iter().zip(b.values()).all(|(a, b)| a.abs() == b.abs()));
    }

    #[test]
    fn first_kind_filter_respects_its_bound(root in any::<u64>(), alpha in -2.0..2.0f64) {
        let g = TimeGrid::new(1.0, 500).unwrap();
        let sc = solve_first_kind_exact(&g, Seed::new(root, 1), alpha);
        let f = first_kind_series(&sc).unwrap();
        for (v, gv) in f.values.iter().zip(&f.g_values) {
            prop_assert!(v.abs() <= (2.0 * gv / std::f64::consts::PI).sqrt());
        }
    }

    #[test]
    fn second_kind_filter_moves_only_at_zeroes(root in any::<u64>(), alpha in -1.0..=1.0f64) {
        let g = TimeGrid::new(1.0, 500).unwrap();
        let sc = solve_second_kind(&g, Seed::new(root, 2), alpha).unwrap();
        let f = second_kind_series(&sc, &MeanderConstant::default()).unwrap();
        for i in 1..f.values.len() {
            if f.values[i] != f.values[i - 1] {
                prop_assert!(sc.y_zeros().has_zero_in_step(i));
            }
        }
    }
}
