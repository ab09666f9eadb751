//! Property-based invariants over randomized inputs.

use proptest::prelude::*;

use sosbm::kernel::{
    atom_probability, transition_cdf, transition_density, transition_quantile, SkewStickyParams,
    SosBmParams,
};
use sosbm::numerics::{erfc, find_root, scaled_erfc};
use sosbm::sampler::{simulate_path, RngStream};
use sosbm::stats::{occupation_statistic, Interval};
use sosbm::transforms::{t1, t1_inverse};

fn params_strategy() -> impl Strategy<Value = SkewStickyParams> {
    (0.0..10.0_f64, -0.95..0.95_f64).prop_map(|(rho, beta)| SkewStickyParams::new(rho, beta).unwrap())
}

proptest! {
    #[test]
    fn erfc_reflection(z in -10.0..10.0_f64) {
        let s = erfc(z) + erfc(-z);
        prop_assert!((s - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn scaled_erfc_consistent_with_erfc(z in 0.0..20.0_f64) {
        let lhs = scaled_erfc(z) * (-z * z).exp();
        let rel = if erfc(z) != 0.0 { ((lhs - erfc(z)) / erfc(z)).abs() } else { lhs.abs() };
        prop_assert!(rel <= 1e-10);
    }

    #[test]
    fn density_symmetric_and_nonnegative(
        p in params_strategy(),
        t in 0.05..5.0_f64,
        x in -4.0..4.0_f64,
        y in -4.0..4.0_f64,
    ) {
        let a = transition_density(&p, t, x, y).unwrap();
        let b = transition_density(&p, t, y, x).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn cdf_monotone_and_bounded(
        p in params_strategy(),
        t in 0.05..5.0_f64,
        x in -3.0..3.0_f64,
        y1 in -6.0..6.0_f64,
        y2 in -6.0..6.0_f64,
    ) {
        let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
        let a = transition_cdf(&p, t, x, lo).unwrap();
        let b = transition_cdf(&p, t, x, hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(b >= a - 1e-14);
    }

    #[test]
    fn cdf_jump_at_zero_is_the_atom(
        p in params_strategy(),
        t in 0.05..5.0_f64,
        x in -3.0..3.0_f64,
    ) {
        let below = transition_cdf(&p, t, x, -1e-300).unwrap();
        let at = transition_cdf(&p, t, x, 0.0).unwrap();
        let atom = atom_probability(&p, t, x).unwrap();
        prop_assert!(((at - below) - atom).abs() <= 1e-12);
    }

    #[test]
    fn quantile_is_inverse_cdf(
        p in params_strategy(),
        t in 0.05..5.0_f64,
        x in -3.0..3.0_f64,
        u in 0.001..0.999_f64,
    ) {
        let y = transition_quantile(&p, t, x, u).unwrap();
        if y == 0.0 {
            // inside the atom's jump: cdf straddles u
            let below = transition_cdf(&p, t, x, -1e-300).unwrap();
            let at = transition_cdf(&p, t, x, 0.0).unwrap();
            prop_assert!(below <= u + 1e-9 && u <= at + 1e-9);
        } else {
            let back = transition_cdf(&p, t, x, y).unwrap();
            prop_assert!((back - u).abs() <= 1e-8, "u={u} y={y} back={back}");
        }
    }

    #[test]
    fn t1_round_trip(
        rho in 0.0..5.0_f64,
        beta in -0.9..0.9_f64,
        sm in 0.1..5.0_f64,
        sp in 0.1..5.0_f64,
        x in -50.0..50.0_f64,
    ) {
        let p = SosBmParams::new(rho, beta, sm, sp).unwrap();
        let back = t1_inverse(&p, t1(&p, x));
        prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        // sign preservation
        prop_assert_eq!(t1(&p, x) > 0.0, x > 0.0);
        prop_assert_eq!(t1(&p, x) < 0.0, x < 0.0);
    }

    #[test]
    fn find_root_resolves_monotone_cubics(
        a in 0.1..5.0_f64,
        b in -2.0..2.0_f64,
    ) {
        // f(x) = a x^3 + x - b is strictly increasing with a unique root
        let f = move |x: f64| a * x * x * x + x - b;
        let r = find_root(f, -10.0, 10.0, 1e-12).unwrap();
        prop_assert!(f(r).abs() <= 1e-9);
    }
}

proptest! {
    // path-level properties are heavier; keep the case count small
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn occupation_statistics_additive_on_random_paths(
        rho in 0.0..3.0_f64,
        beta in -0.8..0.8_f64,
        seed in 0..u64::MAX,
    ) {
        let p = SkewStickyParams::new(rho, beta).unwrap();
        let path = simulate_path(&p, 0.0, 256, 1.0, RngStream::new(seed, 0)).unwrap();
        let pos = occupation_statistic(&path, Interval::positive_half_line()).terminal();
        let neg = occupation_statistic(&path, Interval::negative_half_line()).terminal();
        let zero = occupation_statistic(&path, Interval::singleton(0.0)).terminal();
        let all = occupation_statistic(&path, Interval::all()).terminal();
        prop_assert_eq!(pos + neg + zero, all);
        prop_assert_eq!(all, 1.0);
        // zeros occur only with stickiness
        if rho == 0.0 {
            prop_assert_eq!(zero, 0.0);
        }
    }

    #[test]
    fn paths_are_deterministic_in_the_stream(
        rho in 0.0..3.0_f64,
        beta in -0.8..0.8_f64,
        seed in 0..u64::MAX,
        stream in 0..1000_u64,
    ) {
        let p = SkewStickyParams::new(rho, beta).unwrap();
        let a = simulate_path(&p, 0.3, 64, 1.0, RngStream::new(seed, stream)).unwrap();
        let b = simulate_path(&p, 0.3, 64, 1.0, RngStream::new(seed, stream)).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }
}
