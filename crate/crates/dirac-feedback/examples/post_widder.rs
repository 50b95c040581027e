//! Post-Widder inversion from real-axis derivatives, against the exact kernel.

use dirac_feedback::kernels::heat_kernel_unchecked;
use dirac_feedback::laplace::{post_widder_invert, CauchyDerivatives};
use dirac_feedback::transfer::{p_a_transform, FeedbackParams};

fn main() -> anyhow::Result<()> {
    let f = p_a_transform(FeedbackParams::new(0.0, 1.0)?)?;
    let derivs = CauchyDerivatives::new(&f);
    let t = 1.0;
    let exact = heat_kernel_unchecked(t, 1.0);
    println!("exact K1(1, 1) = {exact:.8}");
    // Convergence is O(1/n), and the derivative estimate loses digits as n grows.
    for n in [5, 10, 20, 40, 80] {
        match post_widder_invert(&derivs, t, n, 1e-4) {
            Ok(est) => println!(
                "n = {n:>3}: {:.8} (error {:.2e}, rounding {:.1e})",
                est.value,
                (est.value - exact).abs(),
                est.rounding_error
            ),
            Err(e) => println!("n = {n:>3}: {e}"),
        }
    }
    Ok(())
}
