use ewa_core::dynamics::{deriv_x, derivs_y, schwarzian_y, step_x, step_y, to_conjugate};
use ewa_core::equilibrium::solve_fixed_point;
use ewa_core::orbits::{iterate, lower_line, upper_line};
use ewa_core::stability::{boundary_point, fixed_point_multiplier, flip_onset};
use ewa_core::Params;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Params> {
    (0.1f64..500.0, 0.01f64..0.99, 0.0f64..=1.0).prop_map(|(a, b, s)| Params::new(a, b, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mirror_symmetry(p in params(), x in 0.0f64..=1.0) {
        let m = p.mirrored();
        prop_assert!((step_x(&m, 1.0 - x) - (1.0 - step_x(&p, x))).abs() < 1e-12);
    }

    #[test]
    fn conjugacy(a in 0.1f64..10.0, b in 0.01f64..0.99, s in 0.0f64..=1.0, x in 0.01f64..0.99) {
        let p = Params::new(a, b, s).unwrap();
        let lhs = to_conjugate(&p, step_x(&p, x)).unwrap();
        let rhs = step_y(&p, to_conjugate(&p, x).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn memory_loss_pushes_equilibrium_towards_half(a in 0.1f64..500.0, b in 0.01f64..0.99, s1 in 0.0f64..=1.0, s2 in 0.0f64..=1.0) {
        let (lo, hi) = (s1.min(s2), s1.max(s2));
        let x_lo = solve_fixed_point(&Params::new(a, b, lo).unwrap()).xbar;
        let x_hi = solve_fixed_point(&Params::new(a, b, hi).unwrap()).xbar;
        prop_assert!((x_hi - b).abs() >= (x_lo - b).abs() - 1e-12);
        prop_assert!((x_hi - 0.5).abs() <= (x_lo - 0.5).abs() + 1e-12);
    }

    #[test]
    fn linear_envelopes_sandwich_the_conjugate_map(p in params(), y in -5.0f64..5.0) {
        let f = step_y(&p, y);
        prop_assert!(lower_line(&p, y) <= f && f <= upper_line(&p, y));
        if (p.a() * y).abs() < 30.0 {
            prop_assert!(lower_line(&p, y) < f && f < upper_line(&p, y));
        }
    }

    #[test]
    fn multiplier_is_the_derivative_at_equilibrium(p in params()) {
        let xbar = solve_fixed_point(&p).xbar;
        if p.sigma() < 1.0 {
            let d = deriv_x(&p, xbar).unwrap();
            let m = fixed_point_multiplier(&p, xbar);
            prop_assert!((d - m).abs() <= 1e-9 * (1.0 + m.abs()), "{d} vs {m}");
        }
    }

    #[test]
    fn schwarzian_negative_when_bimodal(p in params(), y in -2.0f64..2.0) {
        prop_assume!(p.a() > 4.0 * (1.0 - p.sigma()));
        // Beyond |ay| ~ 700 the logistic bump underflows and S rounds to zero.
        prop_assume!((p.a() * y).abs() < 700.0);
        let (d1, _, _) = derivs_y(&p, y);
        prop_assume!(d1 != 0.0);
        prop_assert!(schwarzian_y(&p, y) < 0.0, "S = {}", schwarzian_y(&p, y));
    }

    #[test]
    fn iteration_is_deterministic(p in params(), x0 in 0.001f64..0.999) {
        let first = iterate(&p, x0, 100, 50).unwrap();
        let second = iterate(&p, x0, 100, 50).unwrap();
        prop_assert!(first.samples.iter().zip(&second.samples).all(|(u, v)| u.to_bits() == v.to_bits()));
    }

    #[test]
    fn flip_boundary_is_mirror_symmetric(s in 0.0f64..=1.0, excess in 0.0f64..200.0) {
        let bp = boundary_point(s, flip_onset(s) + excess).unwrap();
        prop_assert!((bp.b1 + bp.b2 - 1.0).abs() < 1e-12);
        prop_assert!((bp.x1 + bp.x2 - 1.0).abs() < 1e-15);
        prop_assert!(bp.b1 <= bp.b2);
    }

    #[test]
    fn period_two_regime_basin(x0 in 1e-6f64..(1.0 - 1e-6)) {
        let p = Params::new(100.0, 0.4, 0.5).unwrap();
        let reference = iterate(&p, 0.2, 100_000, 2).unwrap().samples;
        let s = iterate(&p, x0, 100_000, 2).unwrap().samples;
        let (r, t) = ((reference[0].min(reference[1]), reference[0].max(reference[1])), (s[0].min(s[1]), s[0].max(s[1])));
        prop_assert!((r.0 - t.0).abs() < 1e-9 && (r.1 - t.1).abs() < 1e-9);
    }
}
