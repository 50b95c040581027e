//! The delay equation `y'(t) = A y(t-1)` for `t > 1` with `y ≡ h` on `[0, 1]`.
//!
//! Three independent solvers are provided: the closed finite sum
//! [`eta_series`], the method of steps with exact polynomial pieces
//! [`solve_steps`], and an explicit time stepper [`solve_explicit`].

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::lambert::lambert_w0_real;
use crate::quadrature::find_root;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdeProblem {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(default = "one")]
    pub history_value: f64,
    pub t_end: f64,
}

fn one() -> f64 {
    1.0
}

impl DdeProblem {
    pub fn new(a: f64, t_end: f64) -> Self {
        Self { a, history_value: 1.0, t_end }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DdeMethod {
    Series,
    Steps,
    Euler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdeSolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub method: DdeMethod,
    pieces: Option<Vec<Vec<f64>>>,
    history_value: f64,
}

impl DdeSolution {
    /// Continuous evaluation; exact for the method of steps, linear
    /// interpolation otherwise.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 1.0 {
            return self.history_value;
        }
        if let Some(p) = &self.pieces {
            return eval_pieces(p, t);
        }
        let i = self.grid.partition_point(|&g| g < t);
        if i == 0 {
            return self.values[0];
        }
        if i >= self.grid.len() {
            return *self.values.last().unwrap();
        }
        let (t0, t1) = (self.grid[i - 1], self.grid[i]);
        let w = (t - t0) / (t1 - t0);
        self.values[i - 1] * (1.0 - w) + self.values[i] * w
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Value, attained accuracy and conditioning flag of [`eta_series_checked`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub relative_error: f64,
    pub ill_conditioned: bool,
}

/// `Σ_{m=0}^{⌊t⌋} Aᵐ (t-m)ᵐ / m!`, equal to `y(t)` for unit history.
pub fn eta_series(a: f64, t: f64) -> f64 {
    eta_series_checked(a, t).value
}

/// [`eta_series`] with Neumaier-compensated summation and an a-priori
/// rounding estimate; `ill_conditioned` is set above 1e-6 relative error.
pub fn eta_series_checked(a: f64, t: f64) -> SeriesValue {
    if t < 0.0 {
        return SeriesValue { value: 0.0, relative_error: 0.0, ill_conditioned: false };
    }
    let m_max = t.floor() as usize;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 0.0f64;
    for m in 0..=m_max {
        let x = t - m as f64;
        let mut term = 1.0;
        for j in 1..=m {
            term *= a * x / j as f64;
        }
        abs_sum += term.abs();
        let s = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - s) + term;
        } else {
            comp += (term - s) + sum;
        }
        sum = s;
    }
    let value = sum + comp;
    let err = 4.0 * f64::EPSILON * abs_sum * (m_max + 1) as f64;
    let relative_error = if value != 0.0 { err / value.abs() } else if err == 0.0 { 0.0 } else { f64::INFINITY };
    SeriesValue { value, relative_error, ill_conditioned: relative_error > 1e-6 && err > 1e-300 }
}

fn uniform_grid(t_end: f64, nodes_per_interval: usize) -> Vec<f64> {
    let n = (t_end * nodes_per_interval as f64).ceil() as usize;
    let h = t_end / n.max(1) as f64;
    (0..=n.max(1)).map(|i| (i as f64 * h).min(t_end)).collect()
}

fn eval_poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * s + v)
}

fn eval_pieces(p: &[Vec<f64>], t: f64) -> f64 {
    let k = (t.floor().max(0.0) as usize).min(p.len() - 1);
    let s = t - k as f64;
    eval_poly(&p[k], s)
}

/// Exact polynomial pieces on `[k, k+1]` in the local variable `s = t - k`.
pub(crate) fn step_pieces(a: f64, history_value: f64, t_end: f64) -> Result<Vec<Vec<f64>>> {
    let intervals = (t_end.ceil() as usize).max(1);
    let mut pieces: Vec<Vec<f64>> = Vec::with_capacity(intervals);
    pieces.push(vec![history_value]);
    for k in 1..intervals {
        let prev = &pieces[k - 1];
        let start = prev.iter().sum::<f64>();
        let mut c = Vec::with_capacity(prev.len() + 1);
        c.push(start);
        for (j, &v) in prev.iter().enumerate() {
            c.push(a * v / (j + 1) as f64);
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { t: k as f64 });
        }
        pieces.push(c);
    }
    Ok(pieces)
}

/// Method of steps: on each `[k, k+1]` the solution is the exact
/// antiderivative of the previous piece.
pub fn solve_steps(p: &DdeProblem, nodes_per_interval: usize) -> Result<DdeSolution> {
    validate(p)?;
    if nodes_per_interval == 0 {
        return Err(config("nodes_per_interval must be positive"));
    }
    let pieces = step_pieces(p.a, p.history_value, p.t_end)?;
    let grid = uniform_grid(p.t_end, nodes_per_interval);
    let values: Vec<f64> = grid
        .iter()
        .map(|&t| if t <= 1.0 { p.history_value } else { eval_pieces(&pieces, t) })
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Overflow { t: grid[i] });
    }
    Ok(DdeSolution { grid, values, method: DdeMethod::Steps, pieces: Some(pieces), history_value: p.history_value })
}

/// Samples of the closed series on a uniform grid.
pub fn solve_series(p: &DdeProblem, nodes_per_interval: usize) -> Result<DdeSolution> {
    validate(p)?;
    let grid = uniform_grid(p.t_end, nodes_per_interval.max(1));
    let values = grid.iter().map(|&t| p.history_value * eta_series(p.a, t)).collect();
    Ok(DdeSolution { grid, values, method: DdeMethod::Series, pieces: None, history_value: p.history_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepScheme {
    /// `y_{n+1} = y_n + Δt A y(t_n - 1)`; first order.
    ForwardEuler,
    /// Trapezoid rule on the delayed values, which are already known, so the
    /// scheme stays explicit; second order.
    #[default]
    Heun,
}

/// Explicit time stepping with the delayed value interpolated linearly
/// between stored nodes.
pub fn solve_explicit(p: &DdeProblem, dt: f64, scheme: StepScheme) -> Result<DdeSolution> {
    validate(p)?;
    if !(dt > 0.0 && dt <= 0.5) {
        return Err(config(format!("time step must lie in (0, 0.5], got {dt}")));
    }
    let n = (p.t_end / dt).round() as usize;
    let dt = p.t_end / n.max(1) as f64;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let mut values = vec![p.history_value; n + 1];
    let delayed = |values: &[f64], t: f64| -> f64 {
        let s = t - 1.0;
        if s <= 1.0 {
            return p.history_value;
        }
        let x = s / dt;
        let i = x.floor() as usize;
        let w = x - i as f64;
        if w < 1e-9 {
            values[i]
        } else {
            values[i] * (1.0 - w) + values[i + 1] * w
        }
    };
    for i in 0..n {
        let t = grid[i];
        if grid[i + 1] <= 1.0 {
            continue;
        }
        let t0 = t.max(1.0);
        let h = grid[i + 1] - t0;
        let start = if t < 1.0 { p.history_value } else { values[i] };
        let incr = match scheme {
            StepScheme::ForwardEuler => h * delayed(&values, t0),
            StepScheme::Heun => 0.5 * h * (delayed(&values, t0) + delayed(&values, grid[i + 1])),
        };
        values[i + 1] = start + p.a * incr;
        if !values[i + 1].is_finite() {
            return Err(Error::Overflow { t: grid[i + 1] });
        }
    }
    Ok(DdeSolution { grid, values, method: DdeMethod::Euler, pieces: None, history_value: p.history_value })
}

fn validate(p: &DdeProblem) -> Result<()> {
    if !(p.t_end > 0.0 && p.t_end < 1000.0) {
        return Err(config(format!("t_end must lie in (0, 1000), got {}", p.t_end)));
    }
    if !(p.a.is_finite() && p.history_value.is_finite()) {
        return Err(config("DDE coefficient and history must be finite"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    PositiveDecay,
    PositiveGrowth,
    Constant,
    DampedOscillation,
    UndampedOscillation,
    UnstableOscillation,
}

/// Long-time regime of unit-history solutions from the principal root
/// `λ = W₀(A)` of `λ = A e^{-λ}`.
pub fn classify_behavior(a: f64) -> Behavior {
    if a == 0.0 {
        return Behavior::Constant;
    }
    if a > 0.0 {
        return Behavior::PositiveGrowth;
    }
    if a >= -1.0 / E {
        return Behavior::PositiveDecay;
    }
    match lambert_w0_real(a) {
        Ok(w) if w.re.abs() < 1e-9 => Behavior::UndampedOscillation,
        Ok(w) if w.re < 0.0 => Behavior::DampedOscillation,
        Ok(_) => Behavior::UnstableOscillation,
        // W₀ converges on the whole real line; keep a sane answer regardless.
        Err(_) if a > -std::f64::consts::FRAC_PI_2 => Behavior::DampedOscillation,
        Err(_) => Behavior::UnstableOscillation,
    }
}

/// The two real roots `(larger, smaller)` of `λ = A e^{-λ}` for
/// `A ∈ [-1/e, 0)`, bracketed in `[-1, A)` and `(1/A, ln(-A)]`.
pub fn characteristic_real_roots(a: f64) -> Result<(f64, f64)> {
    let lower = -1.0 / E;
    if !(a < 0.0 && a >= lower - 1e-15) {
        return Err(Error::RootNotFound(format!(
            "real characteristic roots are bracketed only for A in [-1/e, 0), got {a}"
        )));
    }
    let f = |l: f64| l - a * (-l).exp();
    let split = (-a).ln().max(-1.0);
    // At the double root f ≤ 0 on the whole bracket up to rounding.
    let larger = if f(-1.0) >= 0.0 { Some(-1.0) } else { find_root(f, -1.0, a, 1e-16) }
        .ok_or_else(|| Error::RootNotFound(format!("larger root for A = {a}")))?;
    let lo = 1.0 / a;
    let smaller = if f(split) >= 0.0 { Some(split) } else { find_root(f, lo, split, 1e-16) }
        .ok_or_else(|| Error::RootNotFound(format!("smaller root for A = {a}")))?;
    Ok((larger, smaller))
}

/// Checks that `y(t) e^{-λt}` is nondecreasing on `[1, t_end]`, with `λ`
/// the larger real characteristic root.
pub fn diblik_monotone_check(a: f64, sol: &DdeSolution) -> Result<bool> {
    let (lambda, _) = characteristic_real_roots(a)?;
    let mut prev: Option<f64> = None;
    for (&t, &y) in sol.grid.iter().zip(&sol.values) {
        if t < 1.0 {
            continue;
        }
        let v = y * (-lambda * t).exp();
        if let Some(p) = prev {
            if v < p - 1e-9 * p.abs().max(1.0) {
                return Ok(false);
            }
        }
        prev = Some(v);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(eta_series(3.7, 0.7), 1.0);
        assert_eq!(eta_series(-1.0, 2.0), 0.0);
        assert!((eta_series(1.0, 1.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn steps_match_series_to_roundoff() {
        for &a in &[-2.0, -1.0, -1.0 / E, -0.25, 0.0, 1.0] {
            let s = solve_steps(&DdeProblem::new(a, 10.0), 50).unwrap();
            for (&t, &y) in s.grid.iter().zip(&s.values) {
                let e = eta_series(a, t);
                assert!((y - e).abs() <= 1e-11 * e.abs().max(1.0), "A={a} t={t}: {y} vs {e}");
            }
        }
        let s = solve_steps(&DdeProblem::new(-1.0, 3.0), 4).unwrap();
        assert!(s.eval(2.0).abs() < 1e-15);
    }

    #[test]
    fn forward_euler_is_first_order() {
        let p = DdeProblem::new(-1.0, 6.0);
        let err = |dt: f64| {
            let s = solve_explicit(&p, dt, StepScheme::ForwardEuler).unwrap();
            s.grid.iter().zip(&s.values).map(|(&t, &y)| (y - eta_series(-1.0, t)).abs()).fold(0.0, f64::max)
        };
        let ratio = err(0.01) / err(0.005);
        assert!(ratio > 1.8 && ratio < 2.2, "ratio {ratio}");
    }

    #[test]
    fn heun_is_second_order() {
        let p = DdeProblem::new(-2.0, 6.0);
        let err = |dt: f64| {
            let s = solve_explicit(&p, dt, StepScheme::Heun).unwrap();
            s.grid.iter().zip(&s.values).map(|(&t, &y)| (y - eta_series(-2.0, t)).abs()).fold(0.0, f64::max)
        };
        let ratio = err(0.01) / err(0.005);
        assert!(ratio > 3.5, "ratio {ratio}");
    }

    #[test]
    fn classification() {
        assert_eq!(classify_behavior(-0.25), Behavior::PositiveDecay);
        assert_eq!(classify_behavior(-1.0), Behavior::DampedOscillation);
        assert_eq!(classify_behavior(-2.0), Behavior::UnstableOscillation);
        assert_eq!(classify_behavior(0.0), Behavior::Constant);
        assert_eq!(classify_behavior(0.5), Behavior::PositiveGrowth);
        assert_eq!(classify_behavior(-std::f64::consts::FRAC_PI_2), Behavior::UndampedOscillation);
    }

    #[test]
    fn double_root_at_boundary() {
        let (l1, l2) = characteristic_real_roots(-1.0 / E).unwrap();
        assert!((l1 + 1.0).abs() < 1e-7 && (l2 + 1.0).abs() < 1e-7);
        assert!((l1 + (-l1).exp() / E).abs() < 1e-10);
    }

    #[test]
    fn roots_outside_range_rejected() {
        assert!(matches!(characteristic_real_roots(-0.5), Err(Error::RootNotFound(_))));
        assert!(matches!(characteristic_real_roots(0.1), Err(Error::RootNotFound(_))));
    }

    #[test]
    fn diblik_cases() {
        for &a in &[-1.0 / E, -0.25] {
            let s = solve_steps(&DdeProblem::new(a, 20.0), 50).unwrap();
            assert!(diblik_monotone_check(a, &s).unwrap());
        }
        let s = solve_steps(&DdeProblem::new(-0.5, 20.0), 50).unwrap();
        assert!(diblik_monotone_check(-0.5, &s).is_err());
    }

    #[test]
    fn guards() {
        assert!(solve_steps(&DdeProblem::new(1.0, 1000.0), 4).is_err());
        assert!(solve_explicit(&DdeProblem::new(1.0, 5.0), 0.0, StepScheme::Heun).is_err());
    }
}
