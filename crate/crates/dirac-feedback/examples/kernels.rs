//! Heat and subordination kernels, checked against their transforms.

use dirac_feedback::kernels::{heat_kernel, heat_kernel_time_integral, heat_kernel_time_peak, subordination_kernel};
use dirac_feedback::laplace::{forward_laplace, laplace_truncation, TimeFunction};
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "K1(t,0)", "K1(t,1)", "T(t,1)");
    for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
        println!(
            "{t:>6} {:>12.6} {:>12.6} {:>12.6}",
            heat_kernel(t, 0.0)?,
            heat_kernel(t, 1.0)?,
            subordination_kernel(t, 1.0)?
        );
    }

    for beta in [0.5, 1.0, 2.0] {
        println!(
            "beta = {beta}: K1 peaks at t = {:.4}, mass on (0, 10] = {:.6}",
            heat_kernel_time_peak(beta),
            heat_kernel_time_integral(10.0, beta)
        );
    }

    let s = 2.0;
    let beta = 1.0;
    let f = TimeFunction::new("K1(., 1)", 0.0, 1.0, move |t| dirac_feedback::kernels::heat_kernel_unchecked(t, beta));
    let t_max = laplace_truncation(0.0, 1.0, s, 1e-14)?;
    let numeric = forward_laplace(&f, Complex64::new(s, 0.0), t_max, 1e-13)?.re;
    let exact = (-beta * s.sqrt()).exp() / (2.0 * s.sqrt());
    println!("Laplace transform at s = {s}: quadrature {numeric:.12}, closed form {exact:.12}");
    Ok(())
}
