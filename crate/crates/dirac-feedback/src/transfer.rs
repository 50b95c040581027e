//! Transfer functions of the boundary problem and their time-domain
//! counterparts.
//!
//! With `r = √s` (principal branch):
//!
//! * `Q(s, β)  = e^{-βr} / (2r)`, the transform of `K₁(·, β)`;
//! * `P_a(s, β) = e^{-βr} / (2r + 2a e^{-r})`;
//! * `P̃_a(s, β) = e^{-βs} / (2s + 2a e^{-s})`, so that `P_a(s) = P̃_a(√s)`;
//! * `Q̃(s, β) = e^{-βs} / (2s)`.
//!
//! `p̃_a` is a finite sum tied to the delay equation with `A = -a`, and `p_a`
//! follows from it by subordination against the kernel `T(t, τ)`.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dde::{eta_series_checked, step_pieces};
use crate::error::{domain, Error, Result};
use crate::kernels::{erfc, heaviside, subordination_kernel_unchecked};
use crate::lambert::lambert_w;
use crate::laplace::{bromwich_invert, BromwichConfig, BromwichInverter, SDomainFunction};
use crate::quadrature::{find_root, integrate, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackParams {
    pub a: f64,
    pub beta: f64,
}

impl FeedbackParams {
    pub fn new(a: f64, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(domain(format!("beta must be a finite nonnegative number, got {beta}")));
        }
        if !a.is_finite() {
            return Err(domain("feedback strength must be finite"));
        }
        Ok(Self { a, beta })
    }
}

fn require_right_half(s: Complex64) -> Result<()> {
    if s.re > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("transform evaluated at Re(s) = {} <= 0", s.re)))
    }
}

pub fn q_of_s(s: Complex64, beta: f64) -> Result<Complex64> {
    require_right_half(s)?;
    Ok(q_unchecked(s, beta))
}

fn q_unchecked(s: Complex64, beta: f64) -> Complex64 {
    let r = s.sqrt();
    (-r * beta).exp() / (2.0 * r)
}

pub fn q_tilde_of_s(s: Complex64, beta: f64) -> Result<Complex64> {
    let d = 2.0 * s;
    if d.norm() < 1e-14 {
        return Err(pole_hit(d, s));
    }
    Ok((-s * beta).exp() / d)
}

fn pole_hit(d: Complex64, s: Complex64) -> Error {
    Error::PoleHit { denominator: d.norm(), s_re: s.re, s_im: s.im }
}

fn p_tilde_denominator(a: f64, s: Complex64) -> Complex64 {
    2.0 * s + 2.0 * a * (-s).exp()
}

pub fn p_a_of_s(params: FeedbackParams, s: Complex64) -> Result<Complex64> {
    require_right_half(s)?;
    let r = s.sqrt();
    let d = p_tilde_denominator(params.a, r);
    if d.norm() < 1e-14 {
        return Err(pole_hit(d, s));
    }
    Ok((-r * params.beta).exp() / d)
}

pub fn p_tilde_of_s(params: FeedbackParams, s: Complex64) -> Result<Complex64> {
    let d = p_tilde_denominator(params.a, s);
    if d.norm() < 1e-14 {
        return Err(pole_hit(d, s));
    }
    Ok((-s * params.beta).exp() / d)
}

/// `P_a(·, β)` as a transform object with its pole list and abscissa.
pub fn p_a_transform(params: FeedbackParams) -> Result<SDomainFunction> {
    let FeedbackParams { a, beta } = params;
    let poles = if a == 0.0 { Vec::new() } else { pole_set(a, 4)?.p.poles };
    let abscissa = poles.iter().map(|p| p.re).fold(0.0, f64::max);
    Ok(SDomainFunction::new(format!("P_a(s, {beta}) with a = {a}"), abscissa, move |s| {
        let r = s.sqrt();
        (-r * beta).exp() / p_tilde_denominator(a, r)
    })
    .with_poles(poles))
}

/// Finite sum `½ Σ_m (-a)^m (t-m-β)^m / m!` over `m ≤ ⌊t-β⌋`.
pub fn p_tilde_series(params: FeedbackParams, t: f64) -> f64 {
    if t < params.beta {
        return 0.0;
    }
    0.5 * eta_series_checked(-params.a, t - params.beta).value
}

/// Repeated evaluation of `p̃_a(·, β)` through the exact method-of-steps
/// pieces, which stay well conditioned where the closed sum cancels badly.
#[derive(Debug, Clone)]
pub struct PTilde {
    a: f64,
    pieces: Vec<Vec<f64>>,
}

impl PTilde {
    /// Table valid for shifted arguments `t - β ≤ horizon`.
    pub fn new(a: f64, horizon: f64) -> Result<Self> {
        let pieces = step_pieces(-a, 1.0, horizon.max(1.0))?;
        Ok(Self { a, pieces })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn horizon(&self) -> f64 {
        self.pieces.len() as f64
    }

    /// `½ y(u)` for `u = t - β`, and 0 for `u < 0`.
    pub fn shifted(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        let k = (u.floor() as usize).min(self.pieces.len() - 1);
        let s = u - k as f64;
        0.5 * self.pieces[k].iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn value(&self, t: f64, beta: f64) -> f64 {
        self.shifted(t - beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubordinationConfig {
    /// Upper limit of the `τ` integral; chosen automatically when absent.
    pub tau_max: Option<f64>,
    pub tol: f64,
}

impl Default for SubordinationConfig {
    fn default() -> Self {
        Self { tau_max: None, tol: 1e-10 }
    }
}

/// Bound on `∫_{τ_max}^∞ T(t, τ) p̃_a(τ, β) dτ` from `|p̃_a| ≤ ½ e^{|a|(τ-β)}`.
pub fn subordination_tail_bound(a: f64, beta: f64, t: f64, tau_max: f64) -> f64 {
    let aa = a.abs();
    let c = 2.0 * aa * t;
    let x = (tau_max - c) / (2.0 * t.sqrt());
    let log_pref = aa * aa * t - aa * beta - (2.0 * (4.0 * PI * t * t * t).sqrt()).ln();
    let gauss = (log_pref + (2.0 * t).ln() - x * x).exp();
    let log_erfc = if x < 20.0 { erfc(x).ln() } else { -x * x - (x * PI.sqrt()).ln() };
    let comp = if c > 0.0 { (log_pref + (c * (PI * t).sqrt()).ln() + log_erfc).exp() } else { 0.0 };
    gauss + comp
}

fn auto_tau_max(params: FeedbackParams, t: f64, tol: f64) -> Result<f64> {
    let FeedbackParams { a, beta } = params;
    let mut tau = beta + 40f64.max(10.0 * t.sqrt() * (1.0 + a.abs()));
    let step = 10f64.max(2.0 * t.sqrt());
    while subordination_tail_bound(a, beta, t, tau) > tol {
        tau += step;
        if tau > beta + 5000.0 {
            return Err(Error::TailNotBounded {
                bound: subordination_tail_bound(a, beta, t, tau),
                tol,
                t,
                tau_max: tau,
            });
        }
    }
    Ok(tau)
}

/// Upper limit that [`p_a_subordinate`] uses by default.
pub fn default_tau_max(params: FeedbackParams, t: f64, tol: f64) -> Result<f64> {
    auto_tau_max(params, t, tol)
}

fn subordinate_with(table: &PTilde, params: FeedbackParams, t: f64, tau_max: f64, tol: f64) -> Result<f64> {
    let FeedbackParams { beta, .. } = params;
    let span = tau_max - beta;
    let pieces = span.ceil().max(1.0) as usize;
    let cfg = QuadConfig { abs_tol: tol / pieces as f64, rel_tol: 1e-12, max_intervals: 400 };
    // The Gaussian factor peaks near τ = √(2t); pieces far beyond it whose
    // crude bound is below the per-piece tolerance are skipped.
    let mut acc = 0.0;
    for m in 0..pieces {
        let lo = m as f64;
        let hi = ((m + 1) as f64).min(span);
        if hi <= lo {
            break;
        }
        let tau_lo = beta + lo;
        let env = if tau_lo > (2.0 * t).sqrt() {
            subordination_kernel_unchecked(t, tau_lo) * 0.5 * (a_abs(table) * hi).exp()
        } else {
            f64::INFINITY
        };
        if env * (hi - lo) < 1e-3 * cfg.abs_tol {
            continue;
        }
        let r = integrate(
            |u: f64| subordination_kernel_unchecked(t, beta + u) * table.shifted(u),
            lo,
            hi,
            cfg,
        )?;
        acc += r.value;
    }
    Ok(acc)
}

fn a_abs(table: &PTilde) -> f64 {
    table.a.abs()
}

/// `p_a(t, β) = ∫_β^∞ T(t, τ) p̃_a(τ, β) dτ`, truncated at `τ_max`.
pub fn p_a_subordinate(params: FeedbackParams, t: f64, quad: SubordinationConfig) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!("p_a needs t > 0, got {t}")));
    }
    let tau_max = match quad.tau_max {
        Some(tm) => {
            let b = subordination_tail_bound(params.a, params.beta, t, tm);
            if b > quad.tol {
                return Err(Error::TailNotBounded { bound: b, tol: quad.tol, t, tau_max: tm });
            }
            tm
        }
        None => auto_tau_max(params, t, quad.tol)?,
    };
    let table = PTilde::new(params.a, tau_max - params.beta + 1.0)?;
    subordinate_with(&table, params, t, tau_max, quad.tol)
}

/// `p_a(·, β)` by subordination on a whole time grid, sharing one table.
pub fn p_a_subordinate_grid(params: FeedbackParams, times: &[f64], quad: SubordinationConfig) -> Result<Vec<f64>> {
    let t_top = times.iter().copied().fold(0.0, f64::max);
    if t_top <= 0.0 {
        return Ok(vec![0.0; times.len()]);
    }
    let horizon = auto_tau_max(params, t_top, quad.tol)?.max(quad.tau_max.unwrap_or(0.0));
    let table = PTilde::new(params.a, horizon - params.beta + 1.0)?;
    times
        .iter()
        .map(|&t| {
            if t <= 0.0 {
                return Ok(0.0);
            }
            let tm = match quad.tau_max {
                Some(tm) => tm,
                None => auto_tau_max(params, t, quad.tol)?,
            };
            subordinate_with(&table, params, t, tm, quad.tol)
        })
        .collect()
}

/// Contour abscissa right of every pole of `P_a`: `max(0.1, max Re + 0.1)`.
pub fn pole_aware_sigma(a: f64) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.1);
    }
    let top = pole_set(a, 4)?.p.poles.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(if top.is_finite() { (top + 0.1).max(0.1) } else { 0.1 })
}

/// Bromwich inversion of `P_a(·, β)` at `t`.
pub fn p_a_bromwich(params: FeedbackParams, t: f64, cfg: BromwichConfig) -> Result<f64> {
    bromwich_invert(&p_a_transform(params)?, t, cfg)
}

/// Bromwich inversion of `P_a(·, β)` on a time grid, sampling the transform once.
pub fn p_a_bromwich_grid(params: FeedbackParams, times: &[f64], cfg: BromwichConfig) -> Result<Vec<f64>> {
    let t_top = times.iter().copied().fold(0.0, f64::max);
    let inv = BromwichInverter::new(&p_a_transform(params)?, cfg, t_top.max(1e-3))?;
    times.iter().map(|&t| if t <= 0.0 { Ok(0.0) } else { inv.eval(t) }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleSource {
    /// Roots of `s + a e^{-s} = 0`.
    PTilde,
    /// Their squares, on the principal sheet of `√s`.
    P,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub poles: Vec<Complex64>,
    pub principal: Complex64,
    pub source: PoleSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poles {
    pub generators: Vec<(i64, Complex64)>,
    pub p_tilde: PoleSet,
    pub p: PoleSet,
}

/// Poles from the Lambert branches `W_k(-a)`, `|k| ≤ n_branches`.
///
/// A generator `w` yields a pole `w²` of `P_a` only when `Re w > 0`: the
/// principal root of `w²` is then `w` itself.
pub fn pole_set(a: f64, n_branches: usize) -> Result<Poles> {
    if a == 0.0 {
        return Err(domain("pole set requires a != 0"));
    }
    let n = n_branches as i64;
    let z = Complex64::new(-a, 0.0);
    let mut generators = Vec::new();
    for k in -n..=n {
        generators.push((k, lambert_w(k, z)?));
    }
    let principal = generators.iter().find(|(k, _)| *k == 0).unwrap().1;
    let p_tilde = PoleSet {
        poles: generators.iter().map(|g| g.1).collect(),
        principal,
        source: PoleSource::PTilde,
    };
    let p = PoleSet {
        poles: generators.iter().filter(|g| g.1.re > 0.0).map(|g| g.1 * g.1).collect(),
        principal: principal * principal,
        source: PoleSource::P,
    };
    Ok(Poles { generators, p_tilde, p })
}

/// `α₀ = (3π√2/4) e^{3π/4}`: the amplitude at which `[W₀(-α₀)]²` reaches the
/// imaginary axis and `p_a` oscillates without damping.
pub fn critical_amplitude() -> f64 {
    3.0 * PI * 2f64.sqrt() / 4.0 * (3.0 * PI / 4.0).exp()
}

/// Independent root-find of `Re([W₀(-α)]²) = 0` on `α ∈ [5, 100]`.
pub fn critical_amplitude_by_root() -> Result<f64> {
    let g = |alpha: f64| {
        lambert_w(0, Complex64::new(-alpha, 0.0)).map(|w| (w * w).re).unwrap_or(f64::NAN)
    };
    find_root(g, 5.0, 100.0, 1e-15).ok_or_else(|| Error::RootNotFound("critical amplitude not bracketed".into()))
}

/// `aβ - a + 1`; negative values reject positivity of `p_a(·, β)`.
pub fn critical_curve_value(a: f64, beta: f64) -> f64 {
    a * beta - a + 1.0
}

/// Combined kernel `p̃(t, β₊) + p̃(t, β₋) + ½θ(t - β₋) - ½θ(t - β₊)` with
/// `β± = |1 ∓ x̃|`.
pub fn r_kernel_minus(a: f64, x_tilde: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0 / E + 1e-15).contains(&a) {
        return Err(domain(format!("r_kernel_minus requires a in [0, 1/e], got {a}")));
    }
    let bp = (1.0 - x_tilde).abs();
    let bm = (1.0 + x_tilde).abs();
    let pt = |beta: f64| p_tilde_series(FeedbackParams { a, beta }, t);
    Ok(pt(bp) + pt(bm) + 0.5 * heaviside(t - bm) - 0.5 * heaviside(t - bp))
}

/// Mirror image `R̃_{a,+}(x̃) = R̃_{a,-}(-x̃)`.
pub fn r_kernel_plus(a: f64, x_tilde: f64, t: f64) -> Result<f64> {
    r_kernel_minus(a, -x_tilde, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::heat_kernel_unchecked;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(q_of_s(c(1.0), 0.0).unwrap(), c(0.5));
        assert!((q_of_s(c(4.0), 2.0).unwrap().re - (-4.0f64).exp() / 4.0).abs() < 1e-16);
        let p = FeedbackParams::new(1.0 / E, 1.0).unwrap();
        let v = p_a_of_s(p, c(1.0)).unwrap().re;
        assert!((v - (-1.0f64).exp() / (2.0 + 2.0 * (-2.0f64).exp())).abs() < 1e-15);
        assert!((v - 0.162_014).abs() < 1e-6);
        let v = p_tilde_of_s(FeedbackParams { a: 1.0, beta: 0.0 }, c(1.0)).unwrap().re;
        assert!((v - 0.365_529_28).abs() < 1e-8);
        assert!(q_of_s(c(-1.0), 0.0).is_err());
    }

    #[test]
    fn p_tilde_hand_values() {
        assert_eq!(p_tilde_series(FeedbackParams { a: 0.25, beta: 0.0 }, 1.5), 0.4375);
        assert!((p_tilde_series(FeedbackParams { a: 1.0, beta: 0.0 }, 2.5) + 0.1875).abs() < 1e-15);
        assert_eq!(p_tilde_series(FeedbackParams { a: 3.0, beta: 2.0 }, 1.9), 0.0);
        assert_eq!(p_tilde_series(FeedbackParams { a: 3.0, beta: 2.0 }, 2.5), 0.5);
    }

    #[test]
    fn p_tilde_table_matches_series() {
        let tab = PTilde::new(0.3, 30.0).unwrap();
        for i in 0..300 {
            let t = 0.1 * i as f64 + 0.05;
            let s = p_tilde_series(FeedbackParams { a: 0.3, beta: 1.0 }, t);
            assert!((tab.value(t, 1.0) - s).abs() < 1e-13);
        }
    }

    #[test]
    fn subordination_without_feedback_is_heat_kernel() {
        for &(t, b) in &[(0.5, 0.0), (1.0, 1.0), (4.0, 2.0)] {
            let v = p_a_subordinate(FeedbackParams { a: 0.0, beta: b }, t, SubordinationConfig::default()).unwrap();
            assert!((v - heat_kernel_unchecked(t, b)).abs() < 1e-9, "t={t} b={b}");
        }
    }

    #[test]
    fn explicit_short_tau_max_is_rejected() {
        let q = SubordinationConfig { tau_max: Some(5.0), tol: 1e-10 };
        assert!(matches!(
            p_a_subordinate(FeedbackParams { a: 1.0, beta: 0.0 }, 10.0, q),
            Err(Error::TailNotBounded { .. })
        ));
    }

    #[test]
    fn poles_satisfy_their_equations() {
        for &a in &[1.0, 2.0, 50.0, -0.5, 0.25] {
            let ps = pole_set(a, 3).unwrap();
            for z in &ps.p_tilde.poles {
                assert!((z + a * (-z).exp()).norm() <= 1e-10 * (1.0 + a.abs()));
            }
            for z in &ps.p.poles {
                let w = z.sqrt();
                assert!((w * w.exp() + a).norm() <= 1e-10 * (1.0 + a.abs()));
            }
        }
        let ps = pole_set(50.0, 3).unwrap();
        assert!((ps.p.principal.re - 1.193).abs() < 5e-4 && (ps.p.principal.im - 12.686).abs() < 5e-4);
        // A real negative generator is not a pole of P_a.
        assert!(pole_set(0.25, 3).unwrap().p.poles.iter().all(|p| p.re < 0.0));
    }

    #[test]
    fn critical_amplitude_cross_check() {
        let a0 = critical_amplitude();
        assert!((a0 - 35.157).abs() < 1e-3);
        assert!((critical_amplitude_by_root().unwrap() - a0).abs() < 1e-9);
        let w = lambert_w(0, c(-a0)).unwrap();
        assert!((w.arg() - PI / 4.0).abs() < 1e-9);
    }

    #[test]
    fn r_kernel_cases() {
        let v = r_kernel_minus(0.3, 2.0, 2.5).unwrap();
        assert!(v < 0.0 && v.abs() <= 0.15);
        assert!((v + 0.075).abs() < 1e-15);
        for i in 0..200 {
            let t = 0.05 * i as f64;
            assert!(r_kernel_minus(0.3, -0.5, t).unwrap() >= 0.0);
            assert!(r_kernel_minus(0.3, 0.4, t).unwrap() >= 0.0);
        }
        assert!(r_kernel_minus(0.5, 0.0, 1.0).is_err());
        assert_eq!(r_kernel_plus(0.3, -2.0, 2.5).unwrap(), v);
    }
}
