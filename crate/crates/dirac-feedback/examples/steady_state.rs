//! Approach to the steady state Φ∞/(2a) under constant forcing at a = 1/e.

use dirac_feedback::boundary::{boundary_values, steady_state_value, u_plus_forcing_transform, uniform_time_grid};
use dirac_feedback::boundary::{ForcingSpec, InitialCondition};
use dirac_feedback::laplace::{default_probes, final_value};

fn main() -> anyhow::Result<()> {
    let a = (-1.0f64).exp();
    let limit = steady_state_value(a, 1.0)?;
    let fv = 0.5 * final_value(&u_plus_forcing_transform(a, 1.0)?, &default_probes())?;
    println!("limit {limit:.7}, final-value theorem {fv:.7}");

    let grid = uniform_time_grid(0.01, 300.0)?;
    let trace = boundary_values(a, &ForcingSpec::constant(1.0), &InitialCondition::zero(), &grid)?;
    // The deficit decays like 1/(a sqrt(pi t)), so the approach is slow.
    for t in [10.0, 50.0, 100.0, 300.0] {
        let (u, _) = trace.at(t);
        let predicted = limit * (1.0 - 1.0 / (a * (std::f64::consts::PI * t).sqrt()));
        println!("t = {t:>5}: u = {u:.5}, ratio to limit {:.5}, asymptotic estimate {predicted:.5}", u / limit);
    }
    Ok(())
}
