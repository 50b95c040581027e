//! Complex Lambert W on every branch.
//!
//! Branch `k` is the standard one: `W_0` is the principal branch with its cut
//! along `(-∞, -1/e]`, values on the cut taken from above (`Im W ≥ 0`), and
//! `W_{-1}` is the conjugate branch there.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 100;

fn initial_guess(k: i64, z: Complex64) -> Complex64 {
    let branch_point = Complex64::new(-1.0 / E, 0.0);
    let near_branch = (z - branch_point).norm() < 0.3;
    // Signed zeros are ignored: real arguments sit on the upper side of the cut.
    let z = Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
    let lower_half = z.im < 0.0;
    if near_branch && (k == 0 || (k == -1 && !lower_half) || (k == 1 && lower_half)) {
        // Expansion in p = ±√(2(ez + 1)).
        let p = (2.0 * (E * z + 1.0)).sqrt();
        let p = if k == 0 { p } else { -p };
        return -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0);
    }
    if k == 0 && z.norm() < 0.5 {
        return z - z * z + z * z * z * 1.5;
    }
    if k == 0 && z.re > -1.0 && z.re < 1.5 && z.im.abs() < 1.0 && -2.5 * z.im.abs() - 0.2 < z.re {
        // Pade approximant around the origin.
        return z * (3.0 + 6.0 * z + z * z) / (3.0 + 9.0 * z + 5.0 * z * z);
    }
    let l1 = z.ln() + Complex64::new(0.0, 2.0 * PI * k as f64);
    let l2 = l1.ln();
    l1 - l2 + l2 / l1
}

/// Returns `w` on branch `k` with `w e^w = z`.
pub fn lambert_w(k: i64, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return if k == 0 {
            Ok(z)
        } else {
            Err(Error::Domain(format!("W_{k}(0) is -∞")))
        };
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("Lambert W argument must be finite".into()));
    }
    let tol = 1e-12 * (1.0 + z.norm());
    let mut w = initial_guess(k, z);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        if f.norm() <= 0.25 * tol {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        // Halley step.
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        w -= step;
        if step.norm() <= 1e-16 * (1.0 + w.norm()) {
            let r = (w * w.exp() - z).norm();
            if r <= tol {
                return Ok(w);
            }
        }
    }
    let r = (w * w.exp() - z).norm();
    if r <= tol {
        Ok(w)
    } else {
        Err(Error::NoConvergence(format!(
            "Lambert W branch {k} at {z}: residual {r:.3e} after {MAX_ITER} Halley steps"
        )))
    }
}

/// Principal branch at a real argument.
pub fn lambert_w0_real(x: f64) -> Result<Complex64> {
    lambert_w(0, Complex64::new(x, 0.0))
}
