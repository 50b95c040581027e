//! The delay equation y' = A y(t - 1) with unit history, solved three ways.

use dirac_feedback::dde::{
    classify_behavior, diblik_monotone_check, eta_series, solve_explicit, solve_steps, DdeProblem, StepScheme,
};

fn main() -> anyhow::Result<()> {
    for a in [-2.0, -1.0, -0.25, 0.5] {
        let p = DdeProblem::new(a, 10.0);
        let steps = solve_steps(&p, 200)?;
        let heun = solve_explicit(&p, 1e-3, StepScheme::Heun)?;
        let euler = solve_explicit(&p, 1e-3, StepScheme::ForwardEuler)?;
        println!(
            "A = {a:>5}: {:?}, y(10) = {:.6} (series {:.6}, Heun {:.6}, Euler {:.6}), min y = {:.4}",
            classify_behavior(a),
            steps.eval(10.0),
            eta_series(a, 10.0),
            heun.eval(10.0),
            euler.eval(10.0),
            steps.min_value()
        );
        if (-1.0 / std::f64::consts::E..0.0).contains(&a) {
            println!("          y e^(-lambda t) nondecreasing: {}", diblik_monotone_check(a, &steps)?);
        }
    }
    Ok(())
}
