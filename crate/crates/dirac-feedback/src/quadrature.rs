//! Numerical integration shared by the transform, trace and survey code.
//!
//! The adaptive rule is the 7-point Gauss / 15-point Kronrod pair with global
//! bisection of the interval carrying the largest error estimate. It is
//! generic over real and complex integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: closed under addition and real scaling.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 2000 }
    }
}

impl QuadConfig {
    pub fn abs(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: 0.0, ..Self::default() }
    }
}

fn gk15<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    cfg: QuadConfig,
) -> Result<QuadResult<T>> {
    if a == b {
        return Ok(QuadResult { value: T::zero(), error: 0.0, evaluations: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::QuadratureFailure(format!("non-finite limits [{a}, {b}]")));
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut pieces = vec![(a, b, v0, e0)];
    let mut evaluations = 15;
    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        let mut worst = 0;
        for (i, p) in pieces.iter().enumerate() {
            total = total + p.2;
            err += p.3;
            if p.3 > pieces[worst].3 {
                worst = i;
            }
        }
        if !total.magnitude().is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]")));
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * total.magnitude());
        if err <= target {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        if pieces.len() >= cfg.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "error estimate {err:.3e} above {target:.3e} after {} subintervals on [{a}, {b}]",
                pieces.len()
            )));
        }
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval cannot be split further in floating point; accept.
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        let (vl, el) = gk15(&mut f, lo, mid);
        let (vr, er) = gk15(&mut f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, vl, el));
        pieces.push((mid, hi, vr, er));
    }
}

/// Integrates over consecutive subintervals delimited by sorted `breaks`.
pub fn integrate_pieces<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    breaks: &[f64],
    cfg: QuadConfig,
) -> Result<QuadResult<T>> {
    let mut acc = QuadResult { value: T::zero(), error: 0.0, evaluations: 0 };
    let n = breaks.len().saturating_sub(1).max(1) as f64;
    let piece_cfg = QuadConfig { abs_tol: cfg.abs_tol / n, ..cfg };
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = integrate(&mut f, w[0], w[1], piece_cfg)?;
        acc.value = acc.value + r.value;
        acc.error += r.error;
        acc.evaluations += r.evaluations;
    }
    Ok(acc)
}

/// Integral over `[a, ∞)` through the map `x = a + u/(1-u)`.
pub fn integrate_to_infinity<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    cfg: QuadConfig,
) -> Result<QuadResult<T>> {
    integrate(
        |u| {
            if u >= 1.0 {
                return T::zero();
            }
            let w = 1.0 - u;
            let x = a + u / w;
            let v = f(x);
            if v.magnitude() == 0.0 {
                T::zero()
            } else {
                v * (1.0 / (w * w))
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

/// Composite Simpson rule on equally spaced samples (odd count).
pub fn simpson<T: Integrand>(values: &[T], h: f64) -> T {
    let n = values.len();
    debug_assert!(n >= 3 && n % 2 == 1);
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc = acc + *v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// Bracketed root of a continuous function by bisection refined with secant
/// steps (Illinois variant of regula falsi).
pub fn find_root(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> Option<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= x_tol * (1.0 + lo.abs().max(hi.abs())) {
            return Some(0.5 * (lo + hi));
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadConfig::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_over_line() {
        let r = integrate_to_infinity(|x: f64| (-x * x).exp(), 0.0, QuadConfig::default()).unwrap();
        assert!((r.value - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn complex_oscillatory() {
        let r = integrate(
            |x: f64| Complex64::new(0.0, 3.0 * x).exp(),
            0.0,
            std::f64::consts::PI,
            QuadConfig::default(),
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 3.0 * std::f64::consts::PI).exp() - 1.0) / Complex64::new(0.0, 3.0);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn simpson_cubic_exact() {
        let h = 0.25;
        let v: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&v, h) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn root_of_cosine() {
        let r = find_root(f64::cos, 0.0, 3.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }
}
