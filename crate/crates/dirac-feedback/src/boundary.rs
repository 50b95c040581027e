//! Boundary traces `u(t, ±1)` through the renewal equation
//!
//! `u₊ = f₀ + h ⋆ u₊`, `h(t) = -2a K₁(t, 1)`, for `u₊ = u(·,1) + u(·,-1)`, and
//! the direct formula for `u₋ = u(·,1) - u(·,-1)`, which does not see the
//! source at all.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::kernels::{erf, heat_kernel_time_integral, heat_kernel_time_peak, heat_kernel_unchecked};
use crate::laplace::SDomainFunction;
use crate::quadrature::{integrate_pieces, QuadConfig};
use crate::transfer::{p_a_transform, FeedbackParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    Constant { value: f64 },
    Step { t0: f64, before: f64, after: f64 },
    /// `Φ(t) = Φ∞ + (Φ₀ - Φ∞) e^{-rate·t}`.
    ExpApproach { phi_inf: f64, rate: f64, phi0: f64 },
    /// Piecewise linear through the points, constant beyond the last one.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl ForcingSpec {
    pub fn constant(value: f64) -> Self {
        ForcingSpec::Constant { value }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ForcingSpec::Constant { value } => *value,
            ForcingSpec::Step { t0, before, after } => {
                if t < *t0 {
                    *before
                } else {
                    *after
                }
            }
            ForcingSpec::ExpApproach { phi_inf, rate, phi0 } => phi_inf + (phi0 - phi_inf) * (-rate * t).exp(),
            ForcingSpec::Tabulated { times, values } => piecewise_linear(times, values, t, true),
        }
    }

    pub fn phi_infinity(&self) -> Option<f64> {
        match self {
            ForcingSpec::Constant { value } => Some(*value),
            ForcingSpec::Step { after, .. } => Some(*after),
            ForcingSpec::ExpApproach { phi_inf, .. } => Some(*phi_inf),
            ForcingSpec::Tabulated { values, .. } => values.last().copied(),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            ForcingSpec::Step { t0, .. } => vec![*t0],
            ForcingSpec::Tabulated { times, .. } => times.clone(),
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: f64, what: &str| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config(format!("forcing {what} must be finite and nonnegative, got {v}")))
            }
        };
        match self {
            ForcingSpec::Constant { value } => nonneg(*value, "value"),
            ForcingSpec::Step { t0, before, after } => {
                nonneg(*t0, "step time")?;
                nonneg(*before, "value before the step")?;
                nonneg(*after, "value after the step")
            }
            ForcingSpec::ExpApproach { phi_inf, rate, phi0 } => {
                nonneg(*phi_inf, "limit")?;
                nonneg(*phi0, "initial value")?;
                if *rate > 0.0 && rate.is_finite() {
                    Ok(())
                } else {
                    Err(config("forcing rate must be positive"))
                }
            }
            ForcingSpec::Tabulated { times, values } => {
                check_table(times, values, "forcing")?;
                values.iter().try_for_each(|&v| nonneg(v, "table value"))
            }
        }
    }
}

fn check_table(xs: &[f64], vs: &[f64], what: &str) -> Result<()> {
    if xs.is_empty() || xs.len() != vs.len() {
        return Err(config(format!("{what} table needs matching, nonempty columns")));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(config(format!("{what} table abscissae must increase strictly")));
    }
    if xs.iter().chain(vs).any(|v| !v.is_finite()) {
        return Err(config(format!("{what} table must be finite")));
    }
    Ok(())
}

fn piecewise_linear(xs: &[f64], vs: &[f64], x: f64, extend: bool) -> f64 {
    if x <= xs[0] {
        return if extend || x == xs[0] { vs[0] } else { 0.0 };
    }
    let n = xs.len();
    if x >= xs[n - 1] {
        return if extend || x == xs[n - 1] { vs[n - 1] } else { 0.0 };
    }
    let i = xs.partition_point(|&v| v <= x);
    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    vs[i - 1] * (1.0 - w) + vs[i] * w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// `height · exp(-(x - center)² / (2 width²))`.
    GaussianBump { center: f64, width: f64, height: f64 },
    /// Hat of the given half width.
    Tent { center: f64, half_width: f64, height: f64 },
    /// Gaussian bumps at `±offset`.
    SymmetricPair { offset: f64, width: f64, height: f64 },
    /// Piecewise linear through the points, zero outside.
    Tabulated { xs: Vec<f64>, values: Vec<f64> },
}

/// Norm of the standard normal cumulative difference `Φ(b) - Φ(a)`.
fn normal_mass(a: f64, b: f64) -> f64 {
    0.5 * (erf(b / 2f64.sqrt()) - erf(a / 2f64.sqrt()))
}

fn normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `∫_{x0}^{x1} K₁(t, y - x)(v0 + (v1-v0)(x-x0)/(x1-x0)) dx` in closed form.
fn linear_segment_convolution(t: f64, y: f64, x0: f64, x1: f64, v0: f64, v1: f64) -> f64 {
    let sd = (2.0 * t).sqrt();
    let slope = (v1 - v0) / (x1 - x0);
    let at_y = v0 + slope * (y - x0);
    let z0 = (x0 - y) / sd;
    let z1 = (x1 - y) / sd;
    at_y * normal_mass(z0, z1) + slope * sd * (normal_density(z0) - normal_density(z1))
}

impl Shape {
    fn gaussians(&self) -> Vec<(f64, f64, f64)> {
        match self {
            Shape::GaussianBump { center, width, height } => vec![(*center, *width, *height)],
            Shape::SymmetricPair { offset, width, height } => {
                vec![(-offset, *width, *height), (*offset, *width, *height)]
            }
            _ => Vec::new(),
        }
    }

    fn segments(&self) -> Vec<(f64, f64, f64, f64)> {
        match self {
            Shape::Tent { center, half_width, height } => vec![
                (center - half_width, *center, 0.0, *height),
                (*center, center + half_width, *height, 0.0),
            ],
            Shape::Tabulated { xs, values } => {
                let mut s: Vec<_> = xs.windows(2).zip(values.windows(2)).map(|(x, v)| (x[0], x[1], v[0], v[1])).collect();
                // Jumps down to zero outside the table are part of the shape.
                s.retain(|seg| seg.1 > seg.0);
                s
            }
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let g: f64 = self
            .gaussians()
            .iter()
            .map(|&(c, w, h)| h * (-(x - c) * (x - c) / (2.0 * w * w)).exp())
            .sum();
        let p = match self {
            Shape::Tent { center, half_width, height } => height * (1.0 - (x - center).abs() / half_width).max(0.0),
            Shape::Tabulated { xs, values } => piecewise_linear(xs, values, x, false),
            _ => 0.0,
        };
        g + p
    }

    /// `∫ K₁(t, y - x) u(x) dx`, exact for every shape.
    pub fn heat_convolution(&self, t: f64, y: f64) -> f64 {
        let g: f64 = self
            .gaussians()
            .iter()
            .map(|&(c, w, h)| {
                let v = w * w + 2.0 * t;
                h * w / v.sqrt() * (-(y - c) * (y - c) / (2.0 * v)).exp()
            })
            .sum();
        let p: f64 = self
            .segments()
            .iter()
            .map(|&(x0, x1, v0, v1)| linear_segment_convolution(t, y, x0, x1, v0, v1))
            .sum();
        g + p
    }

    fn extent(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (c, w, _) in self.gaussians() {
            lo = lo.min(c - 12.0 * w);
            hi = hi.max(c + 12.0 * w);
        }
        for (x0, x1, _, _) in self.segments() {
            lo = lo.min(x0);
            hi = hi.max(x1);
        }
        (lo, hi)
    }

    fn breaks(&self) -> Vec<f64> {
        let mut b = Vec::new();
        for (c, _, _) in self.gaussians() {
            b.push(c);
        }
        for (x0, x1, _, _) in self.segments() {
            b.push(x0);
            b.push(x1);
        }
        b
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config(format!("initial condition {what} must be positive, got {v}")))
            }
        };
        match self {
            Shape::GaussianBump { center, width, height } => {
                pos(*width, "width")?;
                if !(center.is_finite() && *height >= 0.0 && height.is_finite()) {
                    return Err(config("gaussian bump needs finite center and nonnegative height"));
                }
                Ok(())
            }
            Shape::Tent { center, half_width, height } => {
                pos(*half_width, "half width")?;
                if !(center.is_finite() && *height >= 0.0 && height.is_finite()) {
                    return Err(config("tent needs finite center and nonnegative height"));
                }
                Ok(())
            }
            Shape::SymmetricPair { offset, width, height } => {
                pos(*width, "width")?;
                if !(offset.is_finite() && *height >= 0.0 && height.is_finite()) {
                    return Err(config("symmetric pair needs finite offset and nonnegative height"));
                }
                Ok(())
            }
            Shape::Tabulated { xs, values } => {
                check_table(xs, values, "initial condition")?;
                if values.iter().any(|&v| v < 0.0) {
                    return Err(config("initial condition table must be nonnegative"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneFlags {
    #[serde(default)]
    pub increasing_left: bool,
    #[serde(default)]
    pub decreasing_right: bool,
}

/// Nonnegative initial datum: a sum of shapes plus declared hypotheses.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    #[serde(default)]
    pub shapes: Vec<Shape>,
    #[serde(default)]
    pub monotone_flags: MonotoneFlags,
    #[serde(default)]
    pub even_outside_half: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub nonnegative: bool,
    pub increasing_left: bool,
    pub decreasing_right: bool,
    pub even_outside_half: bool,
}

impl InitialCondition {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_shape(shape: Shape) -> Self {
        Self { shapes: vec![shape], ..Self::default() }
    }

    pub fn with_monotone(mut self) -> Self {
        self.monotone_flags = MonotoneFlags { increasing_left: true, decreasing_right: true };
        self
    }

    pub fn with_even_outside_half(mut self) -> Self {
        self.even_outside_half = true;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.shapes.iter().map(|s| s.eval(x)).sum()
    }

    /// `∫ K₁(t, y - x) u₀(x) dx`.
    pub fn heat_convolution(&self, t: f64, y: f64) -> f64 {
        if t <= 0.0 {
            return self.eval(y);
        }
        self.shapes.iter().map(|s| s.heat_convolution(t, y)).sum()
    }

    pub fn extent(&self) -> Option<(f64, f64)> {
        if self.shapes.is_empty() {
            return None;
        }
        let (lo, hi) = self.shapes.iter().map(Shape::extent).fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| {
            (a.0.min(b.0), a.1.max(b.1))
        });
        Some((lo, hi))
    }

    pub fn l2_norm(&self) -> Result<f64> {
        let Some((lo, hi)) = self.extent() else { return Ok(0.0) };
        let mut br: Vec<f64> = self.shapes.iter().flat_map(Shape::breaks).chain([lo, hi]).collect();
        br.retain(|&b| b >= lo && b <= hi);
        br.sort_by(f64::total_cmp);
        br.dedup();
        let r = integrate_pieces(|x| self.eval(x).powi(2), &br, QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 2000 })?;
        Ok(r.value.sqrt())
    }

    /// Numerical check of every property on a fine grid
    /// (counting the reflected extent).
    pub fn hypotheses(&self) -> HypothesisReport {
        let Some((lo, hi)) = self.extent() else {
            return HypothesisReport { nonnegative: true, increasing_left: true, decreasing_right: true, even_outside_half: true };
        };
        let r = lo.abs().max(hi.abs()).max(1.0);
        let n = 8000;
        let xs: Vec<f64> = (0..=n).map(|i| -r + 2.0 * r * i as f64 / n as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        let scale = vals.iter().copied().fold(0.0, f64::max).max(1e-300);
        let tol = 1e-12 * scale;
        let nonnegative = vals.iter().all(|&v| v >= -tol);
        let mut increasing_left = true;
        let mut decreasing_right = true;
        for i in 1..xs.len() {
            if xs[i] <= 0.0 && vals[i] < vals[i - 1] - tol {
                increasing_left = false;
            }
            if xs[i - 1] >= 0.0 && vals[i] > vals[i - 1] + tol {
                decreasing_right = false;
            }
        }
        let even_outside_half = xs
            .iter()
            .filter(|x| x.abs() >= 0.5)
            .all(|&x| (self.eval(x) - self.eval(-x)).abs() <= tol);
        HypothesisReport { nonnegative, increasing_left, decreasing_right, even_outside_half }
    }

    /// Validates parameters and every declared hypothesis.
    pub fn validate(&self) -> Result<()> {
        self.shapes.iter().try_for_each(Shape::validate)?;
        let h = self.hypotheses();
        if !h.nonnegative {
            return Err(config("initial condition takes negative values"));
        }
        if self.monotone_flags.increasing_left && !h.increasing_left {
            return Err(Error::HypothesisViolation("initial condition declared increasing on x < 0 but is not".into()));
        }
        if self.monotone_flags.decreasing_right && !h.decreasing_right {
            return Err(Error::HypothesisViolation("initial condition declared decreasing on x > 0 but is not".into()));
        }
        if self.even_outside_half && !h.even_outside_half {
            return Err(Error::HypothesisViolation("initial condition declared even outside (-1/2, 1/2) but is not".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Renewal,
    PdeOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub t_grid: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub u_minus: Vec<f64>,
    pub u_right: Vec<f64>,
    pub u_left: Vec<f64>,
    pub provenance: Provenance,
}

impl BoundaryTrace {
    pub fn from_sum_difference(t_grid: Vec<f64>, u_plus: Vec<f64>, u_minus: Vec<f64>, provenance: Provenance) -> Self {
        let u_right = u_plus.iter().zip(&u_minus).map(|(p, m)| 0.5 * (p + m)).collect();
        let u_left = u_plus.iter().zip(&u_minus).map(|(p, m)| 0.5 * (p - m)).collect();
        Self { t_grid, u_plus, u_minus, u_right, u_left, provenance }
    }

    pub fn from_point_values(t_grid: Vec<f64>, u_right: Vec<f64>, u_left: Vec<f64>, provenance: Provenance) -> Self {
        let u_plus = u_right.iter().zip(&u_left).map(|(r, l)| r + l).collect();
        let u_minus = u_right.iter().zip(&u_left).map(|(r, l)| r - l).collect();
        Self { t_grid, u_plus, u_minus, u_right, u_left, provenance }
    }

    pub fn min_right(&self) -> f64 {
        self.u_right.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_left(&self) -> f64 {
        self.u_left.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_plus(&self) -> f64 {
        self.u_plus.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Both point traces stay above `-tol`.
    pub fn nonnegative(&self, tol: f64) -> bool {
        self.min_right() >= -tol && self.min_left() >= -tol
    }

    /// Node-wise: `u₊ ≥ |u₋|` holds exactly when both point values are
    /// nonnegative. Returns the first node where the two tests disagree.
    pub fn sum_difference_equivalence(&self) -> Option<usize> {
        (0..self.t_grid.len()).find(|&i| {
            let by_traces = self.u_plus[i] >= self.u_minus[i].abs();
            let by_points = self.u_right[i] >= 0.0 && self.u_left[i] >= 0.0;
            by_traces != by_points
        })
    }

    /// Value at the last node not after `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let i = self.t_grid.partition_point(|&g| g <= t + 1e-12).saturating_sub(1);
        (self.u_right[i], self.u_left[i])
    }
}

/// Uniform grid `0, dt, …, t_end`.
pub fn uniform_time_grid(dt: f64, t_end: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(config("time grid needs dt > 0 and t_end > 0"));
    }
    let n = (t_end / dt).round() as usize;
    if ((n as f64) * dt - t_end).abs() > 1e-9 * t_end {
        return Err(config(format!("t_end = {t_end} is not a multiple of dt = {dt}")));
    }
    Ok((0..=n).map(|i| i as f64 * dt).collect())
}

fn grid_step(t_grid: &[f64]) -> Result<f64> {
    if t_grid.len() < 2 || t_grid[0] != 0.0 {
        return Err(config("time grid must start at 0 and hold at least two nodes"));
    }
    let dt = t_grid[1] - t_grid[0];
    if t_grid.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
        return Err(config("time grid must be uniform"));
    }
    if dt > 0.01 + 1e-12 {
        return Err(config(format!("renewal time step {dt} exceeds 0.01")));
    }
    Ok(dt)
}

/// `2 ∫₀^t K₁(t-τ, 1) Φ(τ) dτ`.
pub fn forcing_response(phi: &ForcingSpec, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    if let ForcingSpec::Constant { value } = phi {
        return Ok(2.0 * value * heat_kernel_time_integral(t, 1.0));
    }
    // Substituting σ = t - τ, kinks of Φ sit at σ = t - kink.
    let mut br: Vec<f64> = vec![0.0, t];
    br.extend(phi.kinks().into_iter().map(|k| t - k).filter(|&s| s > 0.0 && s < t));
    let mut x = 1.0;
    while x < t {
        br.push(x);
        x *= 2.0;
    }
    br.sort_by(f64::total_cmp);
    br.dedup();
    let r = integrate_pieces(
        |s| if s > 0.0 { heat_kernel_unchecked(s, 1.0) * phi.eval(t - s) } else { 0.0 },
        &br,
        QuadConfig { abs_tol: 1e-12, rel_tol: 1e-11, max_intervals: 1000 },
    )?;
    Ok(2.0 * r.value)
}

/// `f₀` on a time grid.
pub fn f0_trace(phi: &ForcingSpec, u0: &InitialCondition, t_grid: &[f64]) -> Result<Vec<f64>> {
    t_grid
        .iter()
        .map(|&t| {
            let init = if t > 0.0 { u0.heat_convolution(t, 1.0) + u0.heat_convolution(t, -1.0) } else { u0.eval(1.0) + u0.eval(-1.0) };
            Ok(forcing_response(phi, t)? + init)
        })
        .collect()
}

/// `u₋(t) = ∫ (K₁(t, 1-x) - K₁(t, 1+x)) u₀(x) dx`.
pub fn u_minus_trace(u0: &InitialCondition, t_grid: &[f64]) -> Vec<f64> {
    t_grid
        .iter()
        .map(|&t| {
            if t > 0.0 {
                u0.heat_convolution(t, 1.0) - u0.heat_convolution(t, -1.0)
            } else {
                u0.eval(1.0) - u0.eval(-1.0)
            }
        })
        .collect()
}

/// `sup |h| = 2|a| max_t K₁(t, 1)`.
pub fn kernel_sup(a: f64) -> f64 {
    2.0 * a.abs() * heat_kernel_time_peak(1.0)
}

fn kernel_samples(a: f64, n: usize, dt: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| if i == 0 { 0.0 } else { -2.0 * a * heat_kernel_unchecked(i as f64 * dt, 1.0) })
        .collect()
}

fn check_growth(u: f64, f_max: f64, a: f64, t: f64) -> Result<()> {
    let hs = kernel_sup(a);
    let bound = 10.0 * f_max.max(1e-300) * (hs * t).exp() + 1e-12;
    if !u.is_finite() || u.abs() > bound {
        return Err(Error::Instability { value: u.abs(), bound, t });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenewalMethod {
    #[default]
    Marching,
    Resolvent,
}

/// Trapezoidal product-quadrature marching. Since `h(0) = 0` every step is
/// explicit.
pub fn solve_u_plus_marching(a: f64, f0: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = f0.len();
    let h = kernel_samples(a, n, dt);
    let mut u = vec![0.0; n];
    let mut f_max: f64 = 0.0;
    for i in 0..n {
        f_max = f_max.max(f0[i].abs());
        if i == 0 {
            u[0] = f0[0];
            continue;
        }
        let mut conv = 0.5 * h[i] * u[0];
        for j in 1..i {
            conv += h[i - j] * u[j];
        }
        u[i] = f0[i] + dt * conv;
        check_growth(u[i], f_max, a, i as f64 * dt)?;
    }
    Ok(u)
}

fn trapezoid_convolution(x: &[f64], y: &[f64], dt: f64) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let mut acc = 0.5 * (x[i] * y[0] + x[0] * y[i]);
        for j in 1..i {
            acc += x[i - j] * y[j];
        }
        *o = dt * acc;
    }
    out
}

/// Resolvent `R = Σ h^{⋆n}` truncated once `‖h‖ⁿ tⁿ⁻¹/(n-1)! < 1e-12`, then
/// `u₊ = f₀ + R ⋆ f₀`.
pub fn solve_u_plus_resolvent(a: f64, f0: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = f0.len();
    let t_end = (n - 1) as f64 * dt;
    let hs = kernel_sup(a);
    let h = kernel_samples(a, n - 1, dt);
    let mut resolvent = h.clone();
    let mut power = h.clone();
    let mut k = 1usize;
    let mut bound = hs;
    loop {
        k += 1;
        bound *= hs * t_end / (k - 1) as f64;
        if bound < 1e-12 || k > 400 || a == 0.0 {
            break;
        }
        power = trapezoid_convolution(&h, &power, dt);
        for (r, p) in resolvent.iter_mut().zip(&power) {
            *r += p;
        }
    }
    let conv = trapezoid_convolution(&resolvent, f0, dt);
    let mut f_max: f64 = 0.0;
    let mut u = Vec::with_capacity(n);
    for i in 0..n {
        f_max = f_max.max(f0[i].abs());
        let v = f0[i] + conv[i];
        check_growth(v, f_max, a, i as f64 * dt)?;
        u.push(v);
    }
    Ok(u)
}

pub fn solve_u_plus_renewal(
    a: f64,
    phi: &ForcingSpec,
    u0: &InitialCondition,
    t_grid: &[f64],
    method: RenewalMethod,
) -> Result<Vec<f64>> {
    phi.validate()?;
    u0.validate()?;
    let dt = grid_step(t_grid)?;
    let f0 = f0_trace(phi, u0, t_grid)?;
    match method {
        RenewalMethod::Marching => solve_u_plus_marching(a, &f0, dt),
        RenewalMethod::Resolvent => solve_u_plus_resolvent(a, &f0, dt),
    }
}

/// Renewal `u₊` and direct `u₋` assembled into `u(t, ±1)`.
pub fn boundary_values(a: f64, phi: &ForcingSpec, u0: &InitialCondition, t_grid: &[f64]) -> Result<BoundaryTrace> {
    let up = solve_u_plus_renewal(a, phi, u0, t_grid, RenewalMethod::Marching)?;
    let um = u_minus_trace(u0, t_grid);
    Ok(BoundaryTrace::from_sum_difference(t_grid.to_vec(), up, um, Provenance::Renewal))
}

/// Limit `Φ∞ / (2a)` of `u(t, x)` as `t → ∞`.
pub fn steady_state_value(a: f64, phi_infinity: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("steady state requires a > 0, got {a}")));
    }
    if a > 1.0 / std::f64::consts::E + 1e-12 {
        return Err(Error::Domain(format!("steady state is established for a <= 1/e, got {a}")));
    }
    Ok(phi_infinity / (2.0 * a))
}

/// Transform of the forcing part of `u₊` under constant forcing:
/// `2 Φ∞ P_a(s, 1) / s`. Its final value is the limit of `u₊`.
pub fn u_plus_forcing_transform(a: f64, phi_infinity: f64) -> Result<SDomainFunction> {
    let p = p_a_transform(FeedbackParams::new(a, 1.0)?)?;
    let abscissa = p.abscissa;
    let mut poles = p.poles.clone();
    poles.push(Complex64::new(0.0, 0.0));
    Ok(SDomainFunction::new(format!("2 Phi P_a(s, 1) / s with a = {a}"), abscissa, move |s| {
        2.0 * phi_infinity * p.eval(s) / s
    })
    .with_poles(poles))
}

/// `‖u₀‖₂ (2/(πt))^{1/4}`, the decay envelope of `u₋`.
pub fn u_minus_bound(l2_norm: f64, t: f64) -> f64 {
    l2_norm * (2.0 / (PI * t)).powf(0.25)
}
