//! Heat, half-line Dirichlet and subordination kernels, plus `erf` and the
//! Heaviside step.
//!
//! Public functions validate `t > 0`; the `*_unchecked` variants skip the
//! check for inner loops that already guarantee it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A single kernel evaluation, kept for tabulated output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub t: f64,
    pub beta: f64,
    pub value: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("kernel time must be positive and finite, got {t}")))
    }
}

/// `e^{-β²/4t} / √(4πt)`.
pub fn heat_kernel(t: f64, beta: f64) -> Result<f64> {
    check_time(t)?;
    Ok(heat_kernel_unchecked(t, beta))
}

#[inline]
pub fn heat_kernel_unchecked(t: f64, beta: f64) -> f64 {
    (-beta * beta / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `τ e^{-τ²/4t} / √(4πt³)`; its Laplace transform in `t` is `e^{-τ√s}`.
pub fn subordination_kernel(t: f64, tau: f64) -> Result<f64> {
    check_time(t)?;
    if tau < 0.0 {
        return Err(domain(format!("subordination distance must be nonnegative, got {tau}")));
    }
    Ok(subordination_kernel_unchecked(t, tau))
}

#[inline]
pub fn subordination_kernel_unchecked(t: f64, tau: f64) -> f64 {
    tau * (-tau * tau / (4.0 * t)).exp() / (4.0 * PI * t * t * t).sqrt()
}

/// Heat kernel on the half-line `x ≥ 0` with a Dirichlet condition at 0,
/// source at `xt`.
pub fn dirichlet_halfline_kernel(t: f64, x: f64, xt: f64) -> Result<f64> {
    check_time(t)?;
    if x < 0.0 || xt < 0.0 {
        return Err(domain(format!("half-line kernel needs x, xt >= 0, got ({x}, {xt})")));
    }
    if x == 0.0 || xt == 0.0 {
        return Ok(0.0);
    }
    let d = x - xt;
    // e^{-d²/4t}(1 - e^{-x·xt/t}) avoids cancellation when both terms are close.
    Ok((-d * d / (4.0 * t)).exp() * -(-x * xt / t).exp_m1() / (4.0 * PI * t).sqrt())
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Indicator of `[0, ∞)`.
#[inline]
pub fn heaviside(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `∫₀^t K₁(τ, β) dτ` in closed form.
pub fn heat_kernel_time_integral(t: f64, beta: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let b = beta.abs();
    (t / PI).sqrt() * (-b * b / (4.0 * t)).exp() - 0.5 * b * erfc(b / (2.0 * t.sqrt()))
}

/// Largest value of `t ↦ K₁(t, β)` (attained at `t = β²/2`).
pub fn heat_kernel_time_peak(beta: f64) -> f64 {
    if beta == 0.0 {
        return f64::INFINITY;
    }
    let t = 0.5 * beta * beta;
    heat_kernel_unchecked(t, beta)
}
