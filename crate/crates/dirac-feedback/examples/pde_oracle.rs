//! The finite-difference solution against the renewal trace.

use dirac_feedback::pde::{default_half_width, run, PdeConfig};
use dirac_feedback::scenario::{monotone_tent, oracle_discrepancy, renewal_trace, RenewalNumerics};

fn main() -> anyhow::Result<()> {
    let s = monotone_tent();
    let (a, phi, u0) = (s.model.a, &s.model.phi, &s.model.u0);
    let t_end = 20.0;
    let reference = renewal_trace(a, phi, u0, t_end, RenewalNumerics { dt: 0.0025, ..Default::default() })?;
    for (dx, dt) in [(0.04, 0.02), (0.02, 0.01), (0.01, 0.005)] {
        let cfg = PdeConfig::new(a, phi.clone(), u0.clone()).with_grid(default_half_width(t_end), dx, dt);
        let out = run(&cfg, t_end, &[t_end])?;
        let d = oracle_discrepancy(&reference, &out.trace);
        println!(
            "dx = {dx}, dt = {dt}: max |du+| = {:.3e}, min u on |x| >= 1 = {:.3e}, mass at t = {t_end}: {:.5}",
            d.max_abs,
            out.audit.min_value,
            out.snapshots[0].mass()
        );
    }
    Ok(())
}
