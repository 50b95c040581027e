//! p_a by subordination to p̃_a, cross-checked by Bromwich inversion.

use dirac_feedback::laplace::BromwichConfig;
use dirac_feedback::transfer::{
    critical_curve_value, p_a_bromwich_grid, p_a_subordinate_grid, pole_aware_sigma, FeedbackParams, PTilde,
    SubordinationConfig,
};

fn main() -> anyhow::Result<()> {
    let times: Vec<f64> = (1..=8).map(|i| 0.5 * i as f64).collect();
    for (a, beta) in [(0.25, 1.0), (1.0, 0.0), (6.0, 1.0)] {
        let params = FeedbackParams::new(a, beta)?;
        let sub = p_a_subordinate_grid(params, &times, SubordinationConfig::default())?;
        let cfg = BromwichConfig::default().with_sigma(pole_aware_sigma(a)?);
        let brom = p_a_bromwich_grid(params, &times, cfg)?;
        let table = PTilde::new(a, 10.0)?;
        println!("a = {a}, beta = {beta}, a beta - a + 1 = {:.2}", critical_curve_value(a, beta));
        for (i, &t) in times.iter().enumerate() {
            println!(
                "  t = {t:>3}: p~ = {:>10.6}  p (subordination) = {:>12.8}  p (Bromwich) = {:>12.8}",
                table.value(t, beta),
                sub[i],
                brom[i]
            );
        }
    }
    Ok(())
}
