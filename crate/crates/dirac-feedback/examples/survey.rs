//! A small positivity survey of the (a, β) plane.

use dirac_feedback::survey::{survey, RegionBox, Sampling, SurveyConfig};

fn main() -> anyhow::Result<()> {
    let mut cfg = SurveyConfig::fig71(7);
    cfg.name = "coarse".into();
    cfg.region = RegionBox { a_min: 0.0, a_max: 8.0, beta_min: 0.0, beta_max: 2.0 };
    cfg.sampling = Sampling::Grid;
    cfg.grid_shape = Some((9, 5));
    cfg.n_samples = 45;
    let report = survey(&cfg)?;
    for p in &report.points {
        println!(
            "a = {:>4.1} beta = {:>4.2}  {:<24} min {:>11.3e} at t = {:.2} via {:?}",
            p.a,
            p.beta,
            p.classification.as_str(),
            p.diagnostics.min_value,
            p.diagnostics.argmin_t,
            p.diagnostics.path
        );
    }
    println!("{:?}", report.counts);
    Ok(())
}
