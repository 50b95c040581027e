//! Boundary values u(t, ±1) from the renewal equation.

use dirac_feedback::boundary::{boundary_values, uniform_time_grid, ForcingSpec, InitialCondition, Shape};

fn main() -> anyhow::Result<()> {
    let a = (-1.0f64).exp();
    let u0 = InitialCondition::from_shape(Shape::Tabulated { xs: vec![0.5, 1.0, 3.0, 3.5], values: vec![0.0, 10.0, 10.0, 0.0] });
    let grid = uniform_time_grid(0.01, 5.0)?;
    let trace = boundary_values(a, &ForcingSpec::constant(0.0), &u0, &grid)?;
    println!("{:>5} {:>12} {:>12}", "t", "u(t, 1)", "u(t, -1)");
    for t in [0.05, 0.15, 0.5, 1.0, 2.0, 5.0] {
        let (right, left) = trace.at(t);
        println!("{t:>5} {right:>12.6} {left:>12.6}");
    }
    println!("min u(t, -1) = {:.4e}", trace.min_left());
    Ok(())
}
