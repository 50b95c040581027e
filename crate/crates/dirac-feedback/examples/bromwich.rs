//! Bromwich inversion of P_a, and what happens when the contour sits left of a pole.

use dirac_feedback::kernels::heat_kernel_unchecked;
use dirac_feedback::laplace::BromwichConfig;
use dirac_feedback::transfer::{p_a_bromwich, p_a_bromwich_grid, pole_aware_sigma, FeedbackParams};

fn main() -> anyhow::Result<()> {
    // a = 0 has no feedback, so the inversion must return the heat kernel.
    let params = FeedbackParams::new(0.0, 1.0)?;
    let times = [0.25, 0.5, 1.0, 2.0, 4.0];
    let with_tail = p_a_bromwich_grid(params, &times, BromwichConfig::default())?;
    let bare = p_a_bromwich_grid(params, &times, BromwichConfig::default().truncated())?;
    println!("{:>5} {:>12} {:>12} {:>12}", "t", "K1", "corrected", "truncated");
    for (i, &t) in times.iter().enumerate() {
        println!("{t:>5} {:>12.8} {:>12.8} {:>12.8}", heat_kernel_unchecked(t, 1.0), with_tail[i], bare[i]);
    }

    let strong = FeedbackParams::new(50.0, 0.0)?;
    match p_a_bromwich(strong, 1.0, BromwichConfig::default()) {
        Err(e) => println!("a = 50 with sigma = 0.1: {e}"),
        Ok(v) => println!("a = 50 with sigma = 0.1 unexpectedly gave {v}"),
    }
    let sigma = pole_aware_sigma(50.0)?;
    let v = p_a_bromwich(strong, 5.0, BromwichConfig::default().with_sigma(sigma))?;
    println!("a = 50 with sigma = {sigma:.3}: p(5, 0) = {v:.6e}");
    Ok(())
}
