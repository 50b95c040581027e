//! End-to-end acceptance checks, one report line per criterion.
//!
//! Runs as a plain binary (`harness = false`). A criterion listed in
//! `EXPECTED_FAILURES` is known to be unattainable as stated; it still runs
//! in full and prints FAIL, but only an unexpected outcome in either
//! direction fails the target.

#![allow(clippy::approx_constant)]

use std::f64::consts::E;
use std::time::Instant;

use num_complex::Complex64;

use dirac_feedback::boundary::{u_minus_bound, u_minus_trace, u_plus_forcing_transform, uniform_time_grid};
use dirac_feedback::dde::{eta_series, solve_explicit, solve_steps, DdeProblem, StepScheme};
use dirac_feedback::io::{survey_csv, CsvMeta};
use dirac_feedback::kernels::heat_kernel_unchecked;
use dirac_feedback::lambert::lambert_w0_real;
use dirac_feedback::laplace::{default_probes, final_value, forward_laplace, laplace_truncation, BromwichConfig, TimeFunction};
use dirac_feedback::pde::{default_half_width, run, PdeConfig};
use dirac_feedback::scenario::{
    asymmetric_counterexample, even_outside_half, monotone_tent, oracle_discrepancy, renewal_trace, simulate,
    steady_state, RenewalNumerics,
};
use dirac_feedback::survey::{survey, Classification, SurveyConfig};
use dirac_feedback::transfer::{
    critical_amplitude, critical_curve_value, p_a_bromwich, p_a_bromwich_grid, FeedbackParams, PTilde,
};
use dirac_feedback::Error;

/// Criteria that cannot pass as stated; the analysis is in the README.
const EXPECTED_FAILURES: [&str; 2] = ["dde_three_way_agreement", "steady_state_limit"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn kernel_transform_pairs() -> Outcome {
    let mut worst = 0.0f64;
    for s in [1.0, 2.0, 4.0] {
        for beta in [0.0, 1.0, 2.0] {
            let f = TimeFunction::new("K1", 0.0, 1.0, move |t| heat_kernel_unchecked(t, beta));
            let t_max = laplace_truncation(0.0, 1.0, s, 1e-14).unwrap();
            let got = forward_laplace(&f, Complex64::new(s, 0.0), t_max, 1e-13).unwrap().re;
            let want = (-beta * s.sqrt()).exp() / (2.0 * s.sqrt());
            worst = worst.max(((got - want) / want).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.2e} (tol 1e-6)"))
}

fn bromwich_fidelity() -> Outcome {
    let times: Vec<f64> = (0..=76).map(|i| 0.2 + 0.05 * i as f64).collect();
    let mut worst = 0.0f64;
    let mut worst_bare = 0.0f64;
    for beta in [0.0, 1.0, 2.0] {
        let p = FeedbackParams::new(0.0, beta).unwrap();
        let v = p_a_bromwich_grid(p, &times, BromwichConfig::default()).unwrap();
        let bare = p_a_bromwich_grid(p, &times, BromwichConfig::default().truncated()).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let k = heat_kernel_unchecked(t, beta);
            worst = worst.max((v[i] - k).abs());
            worst_bare = worst_bare.max((bare[i] - k).abs());
        }
    }
    outcome(
        worst <= 5e-3,
        format!("max |p_0 - K1| = {worst:.2e} (tol 5e-3); bare truncated integral {worst_bare:.2e}"),
    )
}

fn dde_three_way_agreement() -> (Outcome, Outcome) {
    let amplitudes = [-2.0, -1.0, -1.0 / E, -0.25, 0.0, 1.0];
    let mut euler = 0.0f64;
    let mut heun = 0.0f64;
    let mut series = 0.0f64;
    let mut bound_ok = true;
    let mut per_a = Vec::new();
    for a in amplitudes {
        let p = DdeProblem::new(a, 10.0);
        let steps = solve_steps(&p, 1000).unwrap();
        let fe = solve_explicit(&p, 1e-4, StepScheme::ForwardEuler).unwrap();
        let he = solve_explicit(&p, 1e-4, StepScheme::Heun).unwrap();
        let mut e_a = 0.0f64;
        for (&t, &y) in steps.grid.iter().zip(&steps.values) {
            series = series.max((eta_series(a, t) - y).abs());
            e_a = e_a.max((fe.eval(t) - y).abs());
            heun = heun.max((he.eval(t) - y).abs());
        }
        for sol in [&steps, &fe, &he] {
            for (&t, &y) in sol.grid.iter().zip(&sol.values) {
                if y.abs() > (a.abs() * t).exp() * (1.0 + 1e-12) {
                    bound_ok = false;
                }
            }
        }
        euler = euler.max(e_a);
        per_a.push(format!("A={a:.3}: {e_a:.1e}"));
    }
    let literal = outcome(
        series <= 1e-3 && euler <= 1e-3 && bound_ok,
        format!(
            "series vs steps {series:.1e}, forward Euler vs steps {euler:.1e} [{}], bound held: {bound_ok} (tol 1e-3)",
            per_a.join(", ")
        ),
    );
    let improved = outcome(
        series <= 1e-3 && heun <= 1e-3 && bound_ok,
        format!("series vs steps {series:.1e}, Heun (dt 1e-4) vs steps {heun:.1e}, bound held: {bound_ok}"),
    );
    (literal, improved)
}

fn positivity_threshold() -> Outcome {
    let mut min_over_a = f64::INFINITY;
    for i in 0..50 {
        let a = (1.0 / E) * i as f64 / 49.0;
        let table = PTilde::new(a, 51.0).unwrap();
        let m = (0..=5000).map(|k| table.value(0.01 * k as f64, 0.0)).fold(f64::INFINITY, f64::min);
        min_over_a = min_over_a.min(m);
    }
    let table = PTilde::new(1.0, 51.0).unwrap();
    let dip = (0..=5000).map(|k| table.value(0.01 * k as f64, 0.0)).fold(f64::INFINITY, f64::min);
    outcome(
        min_over_a > 0.0 && dip < 0.0,
        format!("min over 50 a in [0, 1/e]: {min_over_a:.3e}; a = 1 attains {dip:.4}"),
    )
}

fn lambert_numbers() -> Outcome {
    let close = |w: Complex64, re: f64, im: f64| (w.re - re).abs() < 5e-4 && (w.im - im).abs() < 5e-4;
    let w1 = lambert_w0_real(-1.0).unwrap();
    let w2 = lambert_w0_real(-2.0).unwrap();
    let w3 = lambert_w0_real(-0.25).unwrap();
    let w50 = lambert_w0_real(-50.0).unwrap();
    let sq = w50 * w50;
    let alpha = critical_amplitude();
    let wc = lambert_w0_real(-alpha).unwrap();
    let re_sq = (wc * wc).re;
    let pass = close(w1, -0.318, 1.337)
        && close(w2, 0.173, 1.674)
        && close(w3, -0.357, 0.0)
        && close(sq, 1.193, 12.686)
        && (alpha - 35.157).abs() <= 1e-3
        && re_sq.abs() <= 1e-6;
    outcome(
        pass,
        format!(
            "W0(-1) = {w1:.3}, W0(-2) = {w2:.3}, W0(-0.25) = {w3:.3}, W0(-50)^2 = {sq:.3}, alpha0 = {alpha:.4}, Re W0(-alpha0)^2 = {re_sq:.1e}"
        ),
    )
}

fn pole_aware_contour() -> Outcome {
    let p = FeedbackParams::new(50.0, 0.0).unwrap();
    let refused = matches!(p_a_bromwich(p, 1.0, BromwichConfig::default()), Err(Error::ContourBelowPole { .. }));
    let times: Vec<f64> = (1..=200).map(|i| 0.05 * i as f64).collect();
    let trace = p_a_bromwich_grid(p, &times, BromwichConfig::default().with_sigma(1.2));
    let (ok, detail) = match trace {
        Ok(v) => {
            let early = v.iter().zip(&times).filter(|(_, &t)| t <= 2.0).fold(0.0f64, |m, (x, _)| m.max(x.abs()));
            let all = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            (all > 10.0 * early, format!("max over [0,10] {all:.3e} vs max over [0,2] {early:.3e}"))
        }
        Err(e) => (false, format!("sigma = 1.2 failed: {e}")),
    };
    outcome(refused && ok, format!("sigma = 0.1 refused: {refused}; {detail}"))
}

fn steady_state_limit() -> Outcome {
    let s = steady_state();
    let out = simulate(&s).unwrap();
    let limit = E / 2.0;
    let ren = out.renewal_trace.as_ref().unwrap();
    let pde = &out.pde_run.as_ref().unwrap().trace;
    let last = |v: &[f64]| v[v.len() - 1];
    let dev = |x: f64| (x - limit).abs() / limit;
    let ren_dev = dev(last(&ren.u_right)).max(dev(last(&ren.u_left)));
    let pde_dev = dev(last(&pde.u_right)).max(dev(last(&pde.u_left)));
    let fv = final_value(&u_plus_forcing_transform(1.0 / E, 1.0).unwrap(), &default_probes()).unwrap();
    let fv_dev = (0.5 * fv - limit).abs() / limit;
    outcome(
        ren_dev <= 0.02 && pde_dev <= 0.02 && fv_dev <= 0.01,
        format!(
            "u(300, ±1): renewal off by {:.2}%, PDE off by {:.2}% (tol 2%); final value {:.6} off by {:.1e} (tol 1%)",
            100.0 * ren_dev,
            100.0 * pde_dev,
            0.5 * fv,
            fv_dev
        ),
    )
}

fn positivity_presets() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (s, should_pass) in [(monotone_tent(), true), (even_outside_half(), true), (asymmetric_counterexample(), false)] {
        let out = simulate(&s).unwrap();
        let audit = out.report.positivity_audit.unwrap();
        let passed = audit.passes(1e-3);
        pass &= passed == should_pass;
        parts.push(format!(
            "{}: min {:.3e} at (t={}, x={}) -> {}",
            s.name,
            audit.min_value,
            audit.t_at_min,
            audit.x_at_min,
            if passed { "passes" } else { "fails" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn u_minus_decay() -> Outcome {
    let grid: Vec<f64> = uniform_time_grid(0.1, 200.0).unwrap().into_iter().filter(|&t| t >= 1.0).collect();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for s in [monotone_tent(), even_outside_half(), asymmetric_counterexample()] {
        let u0 = &s.model.u0;
        let l2 = u0.l2_norm().unwrap();
        let um = u_minus_trace(u0, &grid);
        let r = grid
            .iter()
            .zip(&um)
            .map(|(&t, v)| v.abs() / u_minus_bound(l2, t))
            .fold(0.0f64, f64::max);
        worst = worst.max(r);
        parts.push(format!("{} {:.3}", s.name, r));
    }
    outcome(worst <= 1.05, format!("max |u_-| (pi t/2)^(1/4) / ||u0||: {} (tol 1.05)", parts.join(", ")))
}

fn region_survey() -> Outcome {
    let cfg = SurveyConfig::fig71(7);
    let first = survey(&cfg).unwrap();
    let second = survey(&cfg).unwrap();
    let meta = CsvMeta::new("acceptance", &cfg).unwrap();
    let identical = survey_csv(&meta, &first).unwrap() == survey_csv(&meta, &second).unwrap() && first == second;
    let low_negative = first
        .points
        .iter()
        .filter(|p| p.a <= 1.0 / E && p.classification == Classification::EmpiricallyNegative)
        .count();
    let curve_violations = first
        .points
        .iter()
        .filter(|p| {
            critical_curve_value(p.a, p.beta) < 0.0
                && !matches!(p.classification, Classification::RejectedAnalytic | Classification::EmpiricallyNegative)
        })
        .count();
    let c = &first.counts;
    outcome(
        first.points.len() == 20_000 && low_negative == 0 && curve_violations == 0 && identical,
        format!(
            "{} points (certified {}, rejected {}, negative {}, nonnegative {}, unresolved {}); negative with a <= 1/e: {low_negative}; below-curve misclassified: {curve_violations}; reproducible: {identical}",
            first.points.len(),
            c.certified_positive,
            c.rejected_analytic,
            c.empirically_negative,
            c.empirically_nonnegative,
            c.unresolved
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [0.0, 0.25, 1.0 / E] {
        let mut s = monotone_tent();
        s.model.a = a;
        let (phi, u0) = (&s.model.phi, &s.model.u0);
        let reference = renewal_trace(a, phi, u0, 50.0, RenewalNumerics { dt: 0.0025, ..Default::default() }).unwrap();
        let mut errs = Vec::new();
        for (dx, dt) in [(0.02, 0.01), (0.01, 0.005)] {
            let cfg = PdeConfig::new(a, phi.clone(), u0.clone()).with_grid(default_half_width(50.0), dx, dt);
            let r = run(&cfg, 50.0, &[]).unwrap();
            let d = oracle_discrepancy(&reference, &r.trace);
            let scale = 1.0 + reference.u_plus.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            errs.push((d.max_abs, d.max_abs <= 2e-2 * scale));
        }
        let ratio = errs[0].0 / errs[1].0;
        pass &= errs[0].1 && errs[1].1 && ratio >= 1.8;
        parts.push(format!("a={a:.3}: {:.2e} -> {:.2e} (ratio {ratio:.2})", errs[0].0, errs[1].0));
    }
    outcome(pass, parts.join("; "))
}

fn timed(f: &dyn Fn() -> Outcome) -> (Outcome, f64) {
    let t0 = Instant::now();
    let o = f();
    (o, t0.elapsed().as_secs_f64())
}

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let mut unexpected = Vec::new();
    let mut report = |name: &str, o: Outcome, elapsed: f64| {
        let expected_fail = EXPECTED_FAILURES.contains(&name);
        let tag = match (o.pass, expected_fail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (expected: unattainable as stated)",
            (false, false) => "FAIL",
            (true, true) => "PASS (unexpected: listed as unattainable)",
        };
        println!("[{tag}] {name} ({elapsed:.1}s): {}", o.detail);
        if o.pass == expected_fail {
            unexpected.push(name.to_string());
        }
    };
    let (o, t) = timed(&kernel_transform_pairs);
    report("kernel_transform_pairs", o, t);
    let (o, t) = timed(&bromwich_fidelity);
    report("bromwich_fidelity", o, t);
    let t0 = Instant::now();
    let (literal, improved) = dde_three_way_agreement();
    let t = t0.elapsed().as_secs_f64();
    report("dde_three_way_agreement", literal, t);
    println!("[{}] dde_three_way_agreement, supplementary Heun route: {}", if improved.pass { "PASS" } else { "FAIL" }, improved.detail);
    let checks: [Check; 8] = [
        ("positivity_threshold", positivity_threshold),
        ("lambert_numbers", lambert_numbers),
        ("pole_aware_contour", pole_aware_contour),
        ("steady_state_limit", steady_state_limit),
        ("positivity_presets", positivity_presets),
        ("u_minus_decay", u_minus_decay),
        ("region_survey", region_survey),
        ("oracle_equivalence", oracle_equivalence),
    ];
    for (name, f) in checks {
        let (o, t) = timed(&f);
        report(name, o, t);
    }
    if !improved.pass {
        unexpected.push("dde_three_way_agreement (Heun)".into());
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected");
    } else {
        println!("acceptance: unexpected outcomes: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
