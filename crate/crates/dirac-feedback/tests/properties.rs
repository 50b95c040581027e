use std::f64::consts::E;

use proptest::prelude::*;

use dirac_feedback::boundary::{BoundaryTrace, Provenance};
use dirac_feedback::dde::{eta_series, solve_steps, DdeProblem};
use dirac_feedback::io::format_number;
use dirac_feedback::kernels::{erfc, heat_kernel_unchecked, subordination_kernel_unchecked};
use dirac_feedback::lambert::{lambert_w, lambert_w0_real};
use dirac_feedback::survey::{classify_point, Classification, Criteria};
use dirac_feedback::transfer::{critical_curve_value, p_a_subordinate, FeedbackParams, PTilde, SubordinationConfig};
use num_complex::Complex64;

fn fast() -> Criteria {
    Criteria { window: 4.0, n_times: 8, epsilon: 0.01, ratio: 0.0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heat_kernel_solves_the_heat_equation(t in 0.5f64..2.0, x in -3.0f64..3.0) {
        let h = 1e-3;
        let dt = (heat_kernel_unchecked(t + h, x) - heat_kernel_unchecked(t - h, x)) / (2.0 * h);
        let dxx = (heat_kernel_unchecked(t, x + h) - 2.0 * heat_kernel_unchecked(t, x) + heat_kernel_unchecked(t, x - h)) / (h * h);
        prop_assert!((dt - dxx).abs() < 1e-6);
        prop_assert!(heat_kernel_unchecked(t, x) > 0.0);
    }

    #[test]
    fn subordination_kernel_masses(t in 0.05f64..5.0, tau in 0.5f64..3.0) {
        // In τ the mass is 1/sqrt(πt); in t it is a probability density whose
        // distribution function is erfc(τ / (2 sqrt(t))).
        let simpson = |f: &dyn Fn(f64) -> f64, hi: f64| {
            let n = 20_000;
            let h = hi / n as f64;
            let mut s = f(hi);
            for i in 1..n {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let in_tau = simpson(&|x| subordination_kernel_unchecked(t, x), 40.0 * t.sqrt());
        prop_assert!((in_tau - 1.0 / (std::f64::consts::PI * t).sqrt()).abs() < 1e-8);
        let in_t = simpson(&|s| if s > 0.0 { subordination_kernel_unchecked(s, tau) } else { 0.0 }, t);
        prop_assert!((in_t - erfc(tau / (2.0 * t.sqrt()))).abs() < 1e-8);
    }

    #[test]
    fn series_and_steps_agree(a in -3.0f64..1.0, t in 0.0f64..8.0) {
        let sol = solve_steps(&DdeProblem::new(a, 8.0), 64).unwrap();
        let y = sol.eval(t);
        let s = eta_series(a, t);
        prop_assert!((y - s).abs() <= 1e-9 * (1.0 + s.abs()));
    }

    #[test]
    fn lambert_branches_invert_w_exp_w(re in -60.0f64..5.0, im in -5.0f64..5.0, k in -3i64..=3) {
        let z = Complex64::new(re, im);
        prop_assume!(z.norm() > 1e-3);
        let w = lambert_w(k, z).unwrap();
        prop_assert!((w * w.exp() - z).norm() <= 1e-10 * (1.0 + z.norm()));
    }

    #[test]
    fn principal_branch_is_real_above_the_branch_point(x in -1.0 / E..10.0) {
        let w = lambert_w0_real(x).unwrap();
        prop_assert!(w.im.abs() < 1e-7);
        prop_assert!(w.re >= -1.0 - 1e-6);
    }

    #[test]
    fn p_tilde_is_nonnegative_below_threshold(a in 0.0f64..1.0 / E, t in 0.0f64..30.0, beta in 0.0f64..3.0) {
        let table = PTilde::new(a, 31.0).unwrap();
        prop_assert!(table.value(t, beta) >= 0.0);
    }

    #[test]
    fn no_feedback_subordinates_to_the_heat_kernel(t in 0.1f64..5.0, beta in 0.0f64..3.0) {
        let p = p_a_subordinate(FeedbackParams::new(0.0, beta).unwrap(), t, SubordinationConfig::default()).unwrap();
        prop_assert!((p - heat_kernel_unchecked(t, beta)).abs() < 1e-9);
    }

    #[test]
    fn analytic_rules_decide_their_regions(a in 0.0f64..10.0, beta in 0.0f64..3.0) {
        prop_assume!(a <= 1.0 / E || critical_curve_value(a, beta) < 0.0);
        let p = classify_point(a, beta, &fast()).unwrap();
        if a <= 1.0 / E {
            prop_assert_eq!(p.classification, Classification::CertifiedPositive);
        } else {
            prop_assert_eq!(p.classification, Classification::RejectedAnalytic);
        }
    }

    #[test]
    fn critical_curve_is_monotone_in_beta(a in 0.0f64..10.0, b1 in 0.0f64..3.0, b2 in 0.0f64..3.0) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(critical_curve_value(a, lo) <= critical_curve_value(a, hi));
    }

    #[test]
    fn sum_and_difference_encode_point_signs(vals in proptest::collection::vec((-32i32..32, -32i32..32), 1..40)) {
        let right: Vec<f64> = vals.iter().map(|v| v.0 as f64 / 8.0).collect();
        let left: Vec<f64> = vals.iter().map(|v| v.1 as f64 / 8.0).collect();
        let grid = (0..vals.len()).map(|i| i as f64).collect();
        let tr = BoundaryTrace::from_point_values(grid, right, left, Provenance::PdeOracle);
        prop_assert_eq!(tr.sum_difference_equivalence(), None);
    }

    #[test]
    fn csv_numbers_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
    }
}
