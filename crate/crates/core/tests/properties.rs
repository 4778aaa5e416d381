use num_rational::Rational64;
use proptest::prelude::*;

use epi_cosmo::cli::sweep::{grid_points, parse_grid};
use epi_cosmo::cosmo::{scale_factor_from_H, truncated_viscous_rhs};
use epi_cosmo::epi::{
    classify_regime, closed_form_c0_jet, euler_lagrange_residual, first_integral, Branch, EpiParams,
};
use epi_cosmo::info::{fisher_information, shannon_entropy, GridDensity};
use epi_cosmo::linearizer::{
    alpha_beta_of_q, check_special_q, check_special_q_exact, linear_modes, riccati_rhs,
};
use epi_cosmo::numerics::Trajectory;

fn q_strategy() -> impl Strategy<Value = f64> {
    (-6.0..6.0_f64).prop_filter("alpha vanishes", |q| (q - 0.5).abs() > 1e-2)
}

proptest! {
    #[test]
    fn closed_form_has_zero_first_integral(
        q in q_strategy().prop_filter("q = 1 is logarithmic", |q| (q - 1.0).abs() > 0.05),
        g in -5.0..-0.1_f64,
        dx in 0.05..3.0_f64,
    ) {
        let branch = if q > 1.0 { Branch::Plus } else { Branch::Minus };
        let p = EpiParams::new(q, g, 0.0).with_branch(branch);
        let (f, fd, fdd) = closed_form_c0_jet(&p, dx).unwrap();
        prop_assume!(f.is_finite() && f > 1e-6 && f < 1e6);
        let scale = (g * f).abs().max(1.0);
        prop_assert!(first_integral(f, fd, &p).unwrap().abs() <= 1e-10 * scale);
        let r = euler_lagrange_residual(f, fd, fdd, &p);
        prop_assert!(r.abs() <= 1e-9 * fdd.abs().max(1.0));
    }

    #[test]
    fn characteristic_roots_solve_their_polynomial(q in q_strategy()) {
        let ab = alpha_beta_of_q(q).unwrap();
        prop_assert!(ab.is_q_consistent());
        let m = linear_modes(&ab).unwrap();
        let scale = (1.0 / (ab.alpha * ab.alpha)).max(1.0);
        for l in [m.lambda_plus, m.lambda_minus] {
            prop_assert!((l * l + l + ab.beta_prime).abs() <= 1e-12 * scale);
        }
        prop_assert!((m.lambda_plus + m.lambda_minus + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn truncated_viscous_is_the_log_derivative_equation(
        q in q_strategy(),
        h in -10.0..10.0_f64,
        hd in -10.0..10.0_f64,
    ) {
        let ab = alpha_beta_of_q(q).unwrap();
        let a = truncated_viscous_rhs(h, hd, ab.alpha, ab.beta);
        let b = riccati_rhs(h, hd, &ab);
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn exact_and_float_special_checks_agree(n in -40i64..40, d in 1i64..12) {
        let q = Rational64::new(n, d);
        prop_assume!(q != Rational64::new(1, 2));
        let exact = check_special_q_exact(q).unwrap();
        let float = check_special_q(n as f64 / d as f64).unwrap();
        prop_assert_eq!(exact, float);
        prop_assert_eq!(exact, q == Rational64::from_integer(2) || q == Rational64::from_integer(-1));
    }

    #[test]
    fn regime_depends_only_on_signs(
        c in prop_oneof![Just(0.0), -5.0..5.0_f64],
        g in prop_oneof![Just(0.0), -5.0..5.0_f64],
        kc in 0.01..100.0_f64,
        kg in 0.01..100.0_f64,
    ) {
        prop_assert_eq!(classify_regime(c, g), classify_regime(c * kc, g * kg));
    }

    #[test]
    fn scale_factor_integrates_cubic_rates_exactly(
        c in prop::array::uniform4(-1.0..1.0_f64),
        a0 in 0.1..10.0_f64,
        n in 5usize..200,
    ) {
        let t: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 / (n - 1) as f64).collect();
        let h: Vec<f64> = t.iter().map(|t| c[0] + t * (c[1] + t * (c[2] + t * c[3]))).collect();
        let hd: Vec<f64> = t.iter().map(|t| c[1] + t * (2.0 * c[2] + t * 3.0 * c[3])).collect();
        let traj = Trajectory::new(t.clone(), h.clone(), hd, "H").unwrap();
        let a = scale_factor_from_H(&traj, a0).unwrap();
        for i in 0..n {
            let tt = t[i];
            let exact = c[0] * tt + c[1] * tt * tt / 2.0 + c[2] * tt.powi(3) / 3.0 + c[3] * tt.powi(4) / 4.0;
            prop_assert!(((a.state[i] / a0).ln() - exact).abs() <= 1e-12);
            prop_assert!((a.derivative[i] / a.state[i] - h[i]).abs() <= 1e-14 * h[i].abs().max(1.0));
        }
    }

    #[test]
    fn gaussian_fisher_scales_and_entropy_is_translation_invariant(
        sigma in 0.2..5.0_f64,
        shift in -20.0..20.0_f64,
    ) {
        let d = GridDensity::gaussian(0.0, sigma, -10.0 * sigma, 10.0 * sigma, 2001).unwrap();
        let i = fisher_information(&d).unwrap();
        prop_assert!((i * sigma * sigma - 1.0).abs() < 1e-3);
        let s = shannon_entropy(&d).unwrap();
        let moved = shannon_entropy(&d.translated(shift)).unwrap();
        prop_assert!((s - moved).abs() <= 1e-12 * s.abs().max(1.0));
    }

    #[test]
    fn grid_ranges_are_inclusive_and_exclusions_apply(
        lo in -50i32..50,
        len in 0i32..40,
        step_num in 1i32..8,
        skip in 0i32..40,
    ) {
        let step = step_num as f64 * 0.25;
        let hi = lo as f64 + step * len as f64;
        let excluded = lo as f64 + step * (skip % (len + 1)) as f64;
        let axes = parse_grid(&format!("q={lo}:{hi}:{step},!{excluded};c=-1,1")).unwrap();
        prop_assert_eq!(axes[0].values.len(), len as usize);
        prop_assert!(!axes[0].values.contains(&excluded));
        prop_assert_eq!(grid_points(&axes).len(), 2 * len as usize);
        if len > 0 && excluded != hi {
            prop_assert_eq!(*axes[0].values.last().unwrap(), hi);
        }
    }
}
