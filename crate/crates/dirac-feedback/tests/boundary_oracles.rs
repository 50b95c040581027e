//! Boundary traces and the PDE against closed-form and quadrature oracles.

use std::f64::consts::{E, PI};

use dirac_feedback::boundary::{
    f0_trace, solve_u_plus_renewal, u_minus_bound, u_minus_trace, uniform_time_grid, ForcingSpec, InitialCondition,
    RenewalMethod, Shape,
};
use dirac_feedback::kernels::heat_kernel_unchecked;
use dirac_feedback::pde::{run, PdeConfig};
use dirac_feedback::scenario::{asymmetric_counterexample, monotone_tent};

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..n {
        s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn forcing_part_of_f0() {
    let grid = [1.0, 4.0, 16.0, 64.0];
    let f0 = f0_trace(&ForcingSpec::constant(1.0), &InitialCondition::zero(), &grid).unwrap();
    for (&t, &v) in grid.iter().zip(&f0) {
        // The integrand vanishes to all orders at 0, so plain Simpson is accurate.
        let want = 2.0 * simpson(|s| if s > 0.0 { heat_kernel_unchecked(s, 1.0) } else { 0.0 }, 0.0, t, 20_000);
        assert!((v - want).abs() < 1e-9, "t={t}: {v} vs {want}");
    }
    // Growth like 2 sqrt(t/pi).
    let ratio = f0[3] / (2.0 * (64.0 / PI).sqrt());
    assert!((0.85..1.0).contains(&ratio), "{ratio}");
}

#[test]
fn initial_part_of_f0_is_a_gaussian_convolution() {
    // u0 = K1(1, .) is a Gaussian of variance 2, so K1(t, .) * u0 = K1(1 + t, .).
    let u0 = InitialCondition::from_shape(Shape::GaussianBump {
        center: 0.0,
        width: 2f64.sqrt(),
        height: 1.0 / (4.0 * PI).sqrt(),
    });
    let f0 = f0_trace(&ForcingSpec::constant(0.0), &u0, &[1.0]).unwrap()[0];
    let want = 2.0 * heat_kernel_unchecked(2.0, 1.0);
    assert!((f0 - want).abs() < 1e-13);
    assert!((f0 - 0.352_06).abs() < 1e-5, "{f0}");
}

#[test]
fn narrow_mass_gives_the_free_difference() {
    let width = 1e-3;
    let u0 = InitialCondition::from_shape(Shape::GaussianBump {
        center: 1.0,
        width,
        height: 1.0 / (width * (2.0 * PI).sqrt()),
    });
    let grid = [0.5, 1.0, 4.0];
    for (&t, &v) in grid.iter().zip(&u_minus_trace(&u0, &grid)) {
        let want = heat_kernel_unchecked(t, 0.0) - heat_kernel_unchecked(t, 2.0);
        assert!(v > 0.0 && (v - want).abs() < 1e-6, "t={t}: {v} vs {want}");
    }
}

#[test]
fn u_minus_stays_under_its_envelope() {
    let u0 = InitialCondition::from_shape(Shape::Tent { center: 0.7, half_width: 1.5, height: 1.0 });
    let norm = u0.l2_norm().unwrap();
    // A tent of half width h and height 1 has squared norm 2h/3.
    assert!((norm - 1.0).abs() < 1e-9, "{norm}");
    let v = u_minus_trace(&u0, &[100.0])[0];
    let bound = u_minus_bound(norm, 100.0);
    assert!((bound - (2.0 / (100.0 * PI)).powf(0.25)).abs() < 1e-15);
    assert!(v.abs() <= bound);
}

#[test]
fn marching_and_resolvent_agree() {
    let s = asymmetric_counterexample();
    let grid = uniform_time_grid(0.01, 10.0).unwrap();
    for a in [1.0 / E, 1.0, -0.5] {
        let m = solve_u_plus_renewal(a, &s.model.phi, &s.model.u0, &grid, RenewalMethod::Marching).unwrap();
        let r = solve_u_plus_renewal(a, &s.model.phi, &s.model.u0, &grid, RenewalMethod::Resolvent).unwrap();
        let d = m.iter().zip(&r).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-8, "a={a}: {d}");
    }
}

#[test]
fn free_pde_matches_duhamel() {
    // No feedback: u(t, 0) = ∫₀ᵗ K₁(τ, 0) dτ = sqrt(t/π).
    let cfg = PdeConfig::new(0.0, ForcingSpec::constant(1.0), InitialCondition::zero());
    let out = run(&cfg, 1.0, &[1.0]).unwrap();
    let v = out.snapshots[0].value_at(0.0);
    let want = (1.0 / PI).sqrt();
    assert!(((v - want) / want).abs() < 0.01, "{v} vs {want}");
}

#[test]
fn pde_positivity_audit_on_the_tent() {
    let s = monotone_tent();
    let cfg = s.pde_config().unwrap();
    let out = run(&cfg, 10.0, &[]).unwrap();
    assert!(out.audit.passes(1e-3));
    assert!(out.trace.nonnegative(1e-3));
    assert_eq!(out.trace.sum_difference_equivalence(), None);
}
