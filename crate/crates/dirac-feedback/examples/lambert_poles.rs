//! Lambert W branches and the poles of the feedback transforms.

use dirac_feedback::lambert::{lambert_w, lambert_w0_real};
use dirac_feedback::transfer::{critical_amplitude, critical_amplitude_by_root, pole_set};
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    for x in [-0.25, -1.0, -2.0] {
        println!("W0({x}) = {:.6}", lambert_w0_real(x)?);
    }
    let z = Complex64::new(-1.0, 0.0);
    for k in -2..=2 {
        let w = lambert_w(k, z)?;
        println!("W_{k}(-1) = {w:.6}, check w e^w = {:.3e}", (w * w.exp() - z).norm());
    }

    let alpha = critical_amplitude();
    println!("critical amplitude {alpha:.6}, by root finding {:.6}", critical_amplitude_by_root()?);

    for a in [1.0, 20.0, alpha, 50.0] {
        let poles = pole_set(a, 3)?;
        println!("a = {a:.3}: {} poles of p, principal {:.4}", poles.p.poles.len(), poles.p.principal);
    }
    Ok(())
}
