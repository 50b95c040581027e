//! Forward Laplace transform, two independent inverters (Bromwich line
//! integral and Post-Widder) and a final-value estimator.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::quadrature::{integrate, simpson, QuadConfig};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A time-domain function of exponential order: `|f(t)| ≤ M e^{ωt}`.
#[derive(Clone)]
pub struct TimeFunction {
    eval: RealFn,
    pub growth_bound: f64,
    pub bound_constant: f64,
    pub label: String,
}

impl TimeFunction {
    pub fn new(
        label: impl Into<String>,
        growth_bound: f64,
        bound_constant: f64,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Arc::new(eval), growth_bound, bound_constant, label: label.into() }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
}

impl std::fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeFunction")
            .field("label", &self.label)
            .field("growth_bound", &self.growth_bound)
            .finish()
    }
}

/// A transform holomorphic for `Re s > abscissa`, with optionally known poles.
#[derive(Clone)]
pub struct SDomainFunction {
    eval: ComplexFn,
    pub abscissa: f64,
    pub poles: Vec<Complex64>,
    pub label: String,
}

impl SDomainFunction {
    pub fn new(
        label: impl Into<String>,
        abscissa: f64,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { eval: Arc::new(eval), abscissa, poles: Vec::new(), label: label.into() }
    }

    pub fn with_poles(mut self, poles: Vec<Complex64>) -> Self {
        self.poles = poles;
        self
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        (self.eval)(s)
    }
}

impl std::fmt::Debug for SDomainFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SDomainFunction")
            .field("label", &self.label)
            .field("abscissa", &self.abscissa)
            .field("poles", &self.poles)
            .finish()
    }
}

/// Truncation horizon for which `M e^{(ω - Re s)T} / (Re s - ω) < tol`.
pub fn laplace_truncation(growth: f64, bound_constant: f64, re_s: f64, tol: f64) -> Result<f64> {
    let gap = re_s - growth;
    if gap <= 0.0 {
        return Err(Error::DivergentTransform { re_s, growth });
    }
    let t = (bound_constant.max(1e-300) / (gap * tol)).ln() / gap;
    Ok(t.max(1.0))
}

/// `∫₀^{t_max} e^{-st} f(t) dt` by adaptive quadrature.
///
/// The unit interval is integrated in the variable `t = u²` so that
/// integrable `t^{-1/2}` singularities at the origin are harmless.
pub fn forward_laplace(f: &TimeFunction, s: Complex64, t_max: f64, tol: f64) -> Result<Complex64> {
    if s.re <= f.growth_bound {
        return Err(Error::DivergentTransform { re_s: s.re, growth: f.growth_bound });
    }
    if !(t_max > 0.0 && tol > 0.0) {
        return Err(config("forward_laplace needs t_max > 0 and tol > 0"));
    }
    let head = t_max.min(1.0);
    let pieces = 1 + ((t_max - head) / 2.0).ceil() as usize;
    let cfg = QuadConfig { abs_tol: tol / pieces as f64, rel_tol: 1e-13, max_intervals: 4000 };
    let near = integrate(
        |u: f64| {
            let t = u * u;
            if t == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            (-s * t).exp() * (2.0 * u * f.eval(t))
        },
        0.0,
        head.sqrt(),
        cfg,
    )?;
    let mut acc = near.value;
    let mut lo = head;
    while lo < t_max {
        let hi = (lo + 2.0).min(t_max);
        acc += integrate(|t: f64| (-s * t).exp() * f.eval(t), lo, hi, cfg)?.value;
        lo = hi;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BromwichConfig {
    pub sigma: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n_nodes: usize,
    /// Number of integration-by-parts terms used to estimate the two
    /// truncated tails `|ξ| > L`; zero evaluates the bare truncated integral.
    #[serde(default = "default_tail_terms")]
    pub tail_terms: usize,
}

fn default_tail_terms() -> usize {
    3
}

impl Default for BromwichConfig {
    fn default() -> Self {
        Self { sigma: 0.1, l: 50.0, n_nodes: 4001, tail_terms: 3 }
    }
}

impl BromwichConfig {
    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    /// The bare truncated integral, without tail estimates.
    pub fn truncated(self) -> Self {
        Self { tail_terms: 0, ..self }
    }

    /// Node count actually used up to time `t_max`: at least `n_nodes` and
    /// at least `40 L t_max / π`, rounded up to odd for Simpson.
    pub fn effective_nodes(&self, t_max: f64) -> usize {
        let need = (40.0 * self.l * t_max / PI).ceil() as usize;
        let n = self.n_nodes.max(need);
        if n.is_multiple_of(2) {
            n + 1
        } else {
            n
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(config(format!("Bromwich L must be positive, got {}", self.l)));
        }
        if self.n_nodes < 64 {
            return Err(config(format!("Bromwich n_nodes must be at least 64, got {}", self.n_nodes)));
        }
        if !self.sigma.is_finite() {
            return Err(config("Bromwich sigma must be finite"));
        }
        if self.tail_terms > 8 {
            return Err(config("Bromwich tail_terms above 8 is not supported"));
        }
        Ok(())
    }
}

/// Rejects a contour that does not lie strictly right of every singularity.
pub fn check_contour(f: &SDomainFunction, sigma: f64) -> Result<()> {
    if let Some(p) = f.poles.iter().filter(|p| p.re >= sigma).max_by(|a, b| a.re.total_cmp(&b.re)) {
        return Err(Error::ContourBelowPole { sigma, pole_re: p.re, pole_im: p.im });
    }
    if sigma <= f.abscissa {
        return Err(Error::ContourBelowAbscissa { sigma, abscissa: f.abscissa });
    }
    Ok(())
}

/// Derivatives `F^{(k)}(s₀)`, `k < count`, by the trapezoid rule on a circle.
fn cauchy_derivatives(f: &SDomainFunction, s0: Complex64, radius: f64, points: usize, count: usize) -> Vec<Complex64> {
    let samples: Vec<(Complex64, Complex64)> = (0..points)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / points as f64;
            let e = Complex64::from_polar(1.0, theta);
            (e, f.eval(s0 + e * radius))
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut factorial = 1.0;
    for k in 0..count {
        if k > 0 {
            factorial *= k as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(e, v) in &samples {
            acc += v * e.powi(-(k as i32));
        }
        out.push(acc * (factorial / (points as f64 * radius.powi(k as i32))));
    }
    out
}

/// Bromwich inversion prepared for repeated evaluation on `(0, t_max]`.
///
/// The transform is sampled once on the uniform `ξ`-grid, so evaluating
/// many times costs one pass over the stored samples each.
#[derive(Debug, Clone)]
pub struct BromwichInverter {
    cfg: BromwichConfig,
    t_max: f64,
    nodes: Vec<f64>,
    values: Vec<Complex64>,
    upper: Vec<Complex64>,
    lower: Vec<Complex64>,
}

impl BromwichInverter {
    pub fn new(f: &SDomainFunction, cfg: BromwichConfig, t_max: f64) -> Result<Self> {
        cfg.validate()?;
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(config(format!("Bromwich inversion needs t > 0, got {t_max}")));
        }
        check_contour(f, cfg.sigma)?;
        let n = cfg.effective_nodes(t_max);
        let h = 2.0 * cfg.l / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| -cfg.l + i as f64 * h).collect();
        let values: Vec<Complex64> = nodes.iter().map(|&xi| f.eval(Complex64::new(cfg.sigma, xi))).collect();
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::PoleHit {
                denominator: 0.0,
                s_re: cfg.sigma,
                s_im: nodes[i],
            });
        }
        let (upper, lower) = if cfg.tail_terms > 0 {
            let radius = 0.25;
            let up = cauchy_derivatives(f, Complex64::new(cfg.sigma, cfg.l), radius, 64, cfg.tail_terms);
            let lo = cauchy_derivatives(f, Complex64::new(cfg.sigma, -cfg.l), radius, 64, cfg.tail_terms);
            // d/dξ F(σ + iξ) = i F'(σ + iξ)
            let i = Complex64::i();
            let to_xi = |d: Vec<Complex64>| -> Vec<Complex64> {
                d.into_iter().enumerate().map(|(k, v)| v * i.powi(k as i32)).collect()
            };
            (to_xi(up), to_xi(lo))
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Self { cfg, t_max, nodes, values, upper, lower })
    }

    pub fn config(&self) -> &BromwichConfig {
        &self.cfg
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(config(format!("Bromwich inversion needs t > 0, got {t}")));
        }
        if t > self.t_max * (1.0 + 1e-12) {
            return Err(config(format!("t = {t} beyond the prepared horizon {}", self.t_max)));
        }
        let h = self.nodes[1] - self.nodes[0];
        let rot: Vec<Complex64> = self
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&xi, &v)| Complex64::from_polar(1.0, xi * t) * v)
            .collect();
        let mut integral = simpson(&rot, h);
        if !self.upper.is_empty() {
            let it = Complex64::new(0.0, t);
            let l = self.cfg.l;
            let mut tail = Complex64::new(0.0, 0.0);
            let mut pow = it;
            for k in 0..self.upper.len() {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                tail -= Complex64::from_polar(1.0, l * t) * self.upper[k] * sign / pow;
                tail += Complex64::from_polar(1.0, -l * t) * self.lower[k] * sign / pow;
                pow *= it;
            }
            integral += tail;
        }
        Ok((self.cfg.sigma * t).exp() / (2.0 * PI) * integral.re)
    }
}

/// `f(t) ≈ (e^{σt}/2π) ∫_{-L}^{L} Re(e^{iξt} F(σ + iξ)) dξ`, plus the
/// configured tail estimate.
pub fn bromwich_invert(f: &SDomainFunction, t: f64, cfg: BromwichConfig) -> Result<f64> {
    BromwichInverter::new(f, cfg, t)?.eval(t)
}

/// Source of derivatives `F^{(n)}(x)` on the positive real axis.
pub trait DerivativeSource {
    /// Returns the derivative together with an absolute rounding estimate.
    fn nth_derivative(&self, n: usize, x: f64) -> Result<(f64, f64)>;
}

/// Derivatives supplied in closed form.
pub struct ClosedFormDerivatives<F: Fn(usize, f64) -> f64>(pub F);

impl<F: Fn(usize, f64) -> f64> DerivativeSource for ClosedFormDerivatives<F> {
    fn nth_derivative(&self, n: usize, x: f64) -> Result<(f64, f64)> {
        let v = (self.0)(n, x);
        Ok((v, f64::EPSILON * v.abs()))
    }
}

/// Derivatives by the trapezoid rule on a circle around `x`.
///
/// The radius is `radius_fraction · (x - abscissa)` so that the circle stays
/// inside the half-plane of holomorphy.
pub struct CauchyDerivatives<'a> {
    pub f: &'a SDomainFunction,
    pub radius_fraction: f64,
    pub points: usize,
}

impl<'a> CauchyDerivatives<'a> {
    pub fn new(f: &'a SDomainFunction) -> Self {
        Self { f, radius_fraction: 0.9, points: 512 }
    }
}

impl DerivativeSource for CauchyDerivatives<'_> {
    fn nth_derivative(&self, n: usize, x: f64) -> Result<(f64, f64)> {
        let gap = x - self.f.abscissa;
        if gap <= 0.0 {
            return Err(Error::DivergentTransform { re_s: x, growth: self.f.abscissa });
        }
        if n > 170 {
            return Err(config("derivative order above 170 overflows n!"));
        }
        let r = self.radius_fraction * gap;
        let m = self.points.max(4 * n + 16);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut peak: f64 = 0.0;
        for j in 0..m {
            let theta = 2.0 * PI * j as f64 / m as f64;
            let v = self.f.eval(Complex64::new(x, 0.0) + Complex64::from_polar(r, theta));
            peak = peak.max(v.norm());
            acc += v * Complex64::from_polar(1.0, -(n as f64) * theta);
        }
        let mut scale = 1.0 / m as f64;
        for k in 1..=n {
            scale *= k as f64 / r;
        }
        Ok((acc.re * scale, f64::EPSILON * peak * scale * m as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostWidderEstimate {
    pub value: f64,
    pub rounding_error: f64,
}

/// `((-1)^n / n!) (n/t)^{n+1} F^{(n)}(n/t)`.
pub fn post_widder_invert(
    derivs: &impl DerivativeSource,
    t: f64,
    n: usize,
    tol: f64,
) -> Result<PostWidderEstimate> {
    if !(t > 0.0) || n == 0 {
        return Err(config("Post-Widder needs t > 0 and n >= 1"));
    }
    let x = n as f64 / t;
    let (d, d_err) = derivs.nth_derivative(n, x)?;
    let mut c = x;
    for k in 1..=n {
        c *= x / k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let value = sign * c * d;
    let rounding_error = c * d_err;
    if rounding_error > tol {
        return Err(Error::PrecisionLoss { estimate: rounding_error, tolerance: tol });
    }
    Ok(PostWidderEstimate { value, rounding_error })
}

/// Probe points `10^{-1}, …, 10^{-5}`.
pub fn default_probes() -> Vec<f64> {
    (1..=5).map(|k| 10f64.powi(-k)).collect()
}

/// Limit of `s F(s)` as `s → 0⁺`.
///
/// The samples are extrapolated to zero by Neville's scheme in the variable
/// `√s`, which absorbs the half-integer powers that transforms built from
/// `√s` produce. Successive extrapolants must agree to 1e-4.
pub fn final_value(f: &SDomainFunction, s_probe: &[f64]) -> Result<f64> {
    if s_probe.len() < 2 {
        return Err(config("final_value needs at least two probe points"));
    }
    if s_probe.windows(2).any(|w| !(w[1] < w[0])) || s_probe.iter().any(|&s| s <= 0.0) {
        return Err(config("final_value probes must be positive and strictly decreasing"));
    }
    let r: Vec<f64> = s_probe.iter().map(|s| s.sqrt()).collect();
    let g: Vec<f64> = s_probe
        .iter()
        .map(|&s| (f.eval(Complex64::new(s, 0.0)) * s).re)
        .collect();
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NoConvergence("s F(s) is not finite at a probe point".into()));
    }
    let mut table = g.clone();
    let mut diag = vec![g[0]];
    for k in 1..r.len() {
        for i in (k..r.len()).rev() {
            // Neville step extrapolating to 0.
            table[i] = (r[i - k] * table[i] - r[i] * table[i - 1]) / (r[i - k] - r[i]);
        }
        diag.push(table[k]);
    }
    let n = diag.len();
    let (last, prev) = (diag[n - 1], diag[n - 2]);
    if (last - prev).abs() <= 1e-4 * last.abs().max(1.0) {
        Ok(last)
    } else {
        Err(Error::NoConvergence(format!(
            "extrapolants {prev} and {last} differ by more than 1e-4"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv_s() -> SDomainFunction {
        SDomainFunction::new("1/s", 0.0, |s| 1.0 / s).with_poles(vec![Complex64::new(0.0, 0.0)])
    }

    #[test]
    fn post_widder_exact_for_step() {
        let d = ClosedFormDerivatives(|n: usize, x: f64| {
            let mut v = if n % 2 == 0 { 1.0 } else { -1.0 };
            for k in 1..=n {
                v *= k as f64;
            }
            v / x.powi(n as i32 + 1)
        });
        let r = post_widder_invert(&d, 2.5, 5, 1e-8).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn post_widder_cauchy_shifted_pole() {
        let f = SDomainFunction::new("1/(s+1)", -1.0, |s| 1.0 / (s + 1.0));
        let r = post_widder_invert(&CauchyDerivatives::new(&f), 1.0, 40, 1e-6).unwrap();
        assert!((r.value - (-1.0f64).exp()).abs() < 0.02);
    }

    #[test]
    fn post_widder_flags_precision_loss() {
        let f = SDomainFunction::new("1/(s+1)", -1.0, |s| 1.0 / (s + 1.0));
        let tight = CauchyDerivatives { f: &f, radius_fraction: 0.2, points: 512 };
        assert!(matches!(
            post_widder_invert(&tight, 1.0, 40, 1e-6),
            Err(Error::PrecisionLoss { .. })
        ));
    }

    #[test]
    fn bromwich_rejects_bad_contours() {
        let f = inv_s();
        assert!(matches!(
            bromwich_invert(&f, 1.0, BromwichConfig::default().with_sigma(0.0)),
            Err(Error::ContourBelowPole { .. })
        ));
        let g = SDomainFunction::new("1/(s-1)", 1.0, |s| 1.0 / (s - 1.0));
        assert!(matches!(
            bromwich_invert(&g, 1.0, BromwichConfig::default()),
            Err(Error::ContourBelowAbscissa { .. })
        ));
        let bad = BromwichConfig { n_nodes: 10, ..BromwichConfig::default() };
        assert!(matches!(bromwich_invert(&f, 1.0, bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn bromwich_step_function() {
        let v = bromwich_invert(&inv_s(), 1.0, BromwichConfig::default()).unwrap();
        assert!((v - 1.0).abs() < 2e-3, "{v}");
    }

    #[test]
    fn final_value_simple_cases() {
        assert!((final_value(&inv_s(), &default_probes()).unwrap() - 1.0).abs() < 1e-12);
        let f = SDomainFunction::new("1/(s+1)", -1.0, |s| 1.0 / (s + 1.0));
        assert!(final_value(&f, &default_probes()).unwrap().abs() < 1e-6);
    }

    #[test]
    fn final_value_detects_divergence() {
        let f = SDomainFunction::new("1/s^2", 0.0, |s| 1.0 / (s * s));
        assert!(matches!(final_value(&f, &default_probes()), Err(Error::NoConvergence(_))));
    }

    #[test]
    fn forward_laplace_of_step() {
        let f = TimeFunction::new("theta", 0.0, 1.0, |_| 1.0);
        let tmax = laplace_truncation(0.0, 1.0, 2.0, 1e-12).unwrap();
        let v = forward_laplace(&f, Complex64::new(2.0, 0.0), tmax, 1e-12).unwrap();
        assert!((v.re - 0.5).abs() < 1e-10 && v.im.abs() < 1e-14);
        assert!(matches!(
            forward_laplace(&f, Complex64::new(-1.0, 0.0), 10.0, 1e-8),
            Err(Error::DivergentTransform { .. })
        ));
    }
}
