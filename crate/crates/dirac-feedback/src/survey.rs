//! Classification of the `(a, β)` plane by positivity of `p_a(·, β)`.
//!
//! Two analytic rules are applied first: `a ≤ 1/e` certifies positivity and
//! `aβ - a + 1 < 0` rejects it. Everything else is decided empirically on a
//! finite time window, with `p̃_a` as a cheap pre-filter.

use std::f64::consts::E;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::laplace::BromwichConfig;
use crate::transfer::{
    critical_curve_value, default_tau_max, p_a_bromwich_grid, p_a_subordinate_grid, pole_aware_sigma, FeedbackParams,
    PTilde, SubordinationConfig,
};

pub const MAX_SAMPLES: usize = 1_000_000;

/// Largest `a` evaluated by subordination; Bromwich above.
pub const SUBORDINATION_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    CertifiedPositive,
    RejectedAnalytic,
    EmpiricallyNegative,
    EmpiricallyNonnegative,
    /// Evaluation failed; the error is kept in the diagnostics.
    Unresolved,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::CertifiedPositive => "certified_positive",
            Classification::RejectedAnalytic => "rejected_analytic",
            Classification::EmpiricallyNegative => "empirically_negative",
            Classification::EmpiricallyNonnegative => "empirically_nonnegative",
            Classification::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    Analytic,
    /// `p̃_a ≥ 0` on the whole subordination range, so `p_a` was not needed.
    PTildeFilter,
    Subordination,
    Bromwich,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub min_value: f64,
    pub argmin_t: f64,
    /// `|min| / |max|` over the window.
    pub ratio: f64,
    pub path: EvalPath,
    /// The window is shorter than `β + 2`.
    pub short_window: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub a: f64,
    pub beta: f64,
    pub classification: Classification,
    pub diagnostics: Diagnostics,
}

/// Window and thresholds of the empirical test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Criteria {
    /// Window `(0, T]`.
    pub window: f64,
    /// Number of equally spaced sample times in the window.
    pub n_times: usize,
    pub epsilon: f64,
    pub ratio: f64,
}

impl Criteria {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0 && self.window <= 1000.0) {
            return Err(config(format!("survey window must lie in (0, 1000], got {}", self.window)));
        }
        if self.n_times < 2 {
            return Err(config("survey needs at least two sample times"));
        }
        if !(self.epsilon >= 0.0 && self.ratio >= 0.0) {
            return Err(config("survey tolerances must be nonnegative"));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        (1..=self.n_times).map(|i| self.window * i as f64 / self.n_times as f64).collect()
    }

    fn is_negative(&self, min: f64, ratio: f64) -> bool {
        min < -self.epsilon && ratio > self.ratio
    }
}

fn analytic(a: f64, beta: f64, class: Classification, short_window: bool) -> RegionPoint {
    RegionPoint {
        a,
        beta,
        classification: class,
        diagnostics: Diagnostics {
            min_value: 0.0,
            argmin_t: 0.0,
            ratio: 0.0,
            path: EvalPath::Analytic,
            short_window,
            error: None,
        },
    }
}

fn extremes(times: &[f64], values: &[f64]) -> (f64, f64, f64) {
    let mut min = f64::INFINITY;
    let mut argmin = 0.0;
    let mut max_abs = 0.0f64;
    for (&t, &v) in times.iter().zip(values) {
        if v < min {
            min = v;
            argmin = t;
        }
        max_abs = max_abs.max(v.abs());
    }
    let ratio = if max_abs > 0.0 { min.abs() / max_abs } else { 0.0 };
    (min, argmin, ratio)
}

/// Smallest sampled value of `p̃_a(·, β)` on `[β, τ_max]` and where it sits;
/// `None` when the table cannot be built.
fn p_tilde_minimum(a: f64, beta: f64, tau_max: f64) -> Option<(f64, f64)> {
    let horizon = tau_max - beta + 1.0;
    let table = PTilde::new(a, horizon).ok()?;
    let per_unit = 32;
    let n = (horizon.ceil() as usize) * per_unit;
    let mut best = (f64::INFINITY, beta);
    for i in 0..=n {
        let u = i as f64 / per_unit as f64;
        let v = table.shifted(u);
        if v < best.0 {
            best = (v, beta + u);
        }
    }
    Some(best)
}

fn evaluate(params: FeedbackParams, times: &[f64]) -> Result<(Vec<f64>, EvalPath)> {
    if params.a <= SUBORDINATION_LIMIT {
        Ok((p_a_subordinate_grid(params, times, SubordinationConfig::default())?, EvalPath::Subordination))
    } else {
        let cfg = BromwichConfig::default().with_sigma(pole_aware_sigma(params.a)?);
        Ok((p_a_bromwich_grid(params, times, cfg)?, EvalPath::Bromwich))
    }
}

/// Classifies one point; evaluation failures are returned as
/// [`Classification::Unresolved`] with the message in the diagnostics.
pub fn classify_point(a: f64, beta: f64, criteria: &Criteria) -> Result<RegionPoint> {
    criteria.validate()?;
    let params = FeedbackParams::new(a, beta)?;
    let short_window = criteria.window <= beta + 2.0;
    if a <= 1.0 / E {
        return Ok(analytic(a, beta, Classification::CertifiedPositive, short_window));
    }
    if critical_curve_value(a, beta) < 0.0 {
        return Ok(analytic(a, beta, Classification::RejectedAnalytic, short_window));
    }
    let unresolved = |msg: String| RegionPoint {
        a,
        beta,
        classification: Classification::Unresolved,
        diagnostics: Diagnostics {
            min_value: f64::NAN,
            argmin_t: f64::NAN,
            ratio: f64::NAN,
            path: if a <= SUBORDINATION_LIMIT { EvalPath::Subordination } else { EvalPath::Bromwich },
            short_window,
            error: Some(msg),
        },
    };
    let tol = SubordinationConfig::default().tol;
    if let Ok(tau_max) = default_tau_max(params, criteria.window, tol) {
        if let Some((min, at)) = p_tilde_minimum(a, beta, tau_max) {
            if min >= 0.0 {
                return Ok(RegionPoint {
                    a,
                    beta,
                    classification: Classification::EmpiricallyNonnegative,
                    diagnostics: Diagnostics {
                        min_value: min,
                        argmin_t: at,
                        ratio: 0.0,
                        path: EvalPath::PTildeFilter,
                        short_window,
                        error: None,
                    },
                });
            }
        }
    }
    let times = criteria.times();
    let (values, path) = match evaluate(params, &times) {
        Ok(v) => v,
        Err(e) => return Ok(unresolved(e.to_string())),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Ok(unresolved("non-finite value of p_a in the window".into()));
    }
    let (min, argmin_t, ratio) = extremes(&times, &values);
    let classification = if criteria.is_negative(min, ratio) {
        Classification::EmpiricallyNegative
    } else {
        Classification::EmpiricallyNonnegative
    };
    Ok(RegionPoint {
        a,
        beta,
        classification,
        diagnostics: Diagnostics { min_value: min, argmin_t, ratio, path, short_window, error: None },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    UniformRandom,
    /// Tensor grid with about `√n` points per axis, endpoints included.
    Grid,
}

/// Closed box `[a_min, a_max] × [beta_min, beta_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionBox {
    pub a_min: f64,
    pub a_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl RegionBox {
    pub fn is_empty(&self) -> bool {
        !(self.a_min <= self.a_max && self.beta_min <= self.beta_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyConfig {
    pub name: String,
    pub region: RegionBox,
    pub n_samples: usize,
    pub sampling: Sampling,
    /// Grid shape `(n_a, n_beta)`; derived from `n_samples` when absent.
    #[serde(default)]
    pub grid_shape: Option<(usize, usize)>,
    pub criteria: Criteria,
    pub seed: u64,
}

impl SurveyConfig {
    /// 20 000 uniform pairs on `[0,10] × [0,3]`, window `(0, 4]`, `ε = 0.01`.
    pub fn fig71(seed: u64) -> Self {
        Self {
            name: "fig71".into(),
            region: RegionBox { a_min: 0.0, a_max: 10.0, beta_min: 0.0, beta_max: 3.0 },
            n_samples: 20_000,
            sampling: Sampling::UniformRandom,
            grid_shape: None,
            criteria: Criteria { window: 4.0, n_times: 80, epsilon: 0.01, ratio: 0.0 },
            seed,
        }
    }

    /// Grid in `a ∈ [0.08, 10]`, `β ∈ [0, 3]`, window `(0, 400)` and the
    /// ratio rule `|min|/|max| > 1e-5`. The `1e-6` floor keeps inversion
    /// noise in the far tail from counting as a sign change.
    pub fn grid400(seed: u64) -> Self {
        Self {
            name: "grid400".into(),
            region: RegionBox { a_min: 0.08, a_max: 10.0, beta_min: 0.0, beta_max: 3.0 },
            n_samples: 32 * 16,
            sampling: Sampling::Grid,
            grid_shape: Some((32, 16)),
            criteria: Criteria { window: 400.0, n_times: 400, epsilon: 1e-6, ratio: 1e-5 },
            seed,
        }
    }

    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        match name {
            "fig71" => Ok(Self::fig71(seed)),
            "grid400" => Ok(Self::grid400(seed)),
            other => Err(config(format!("unknown survey preset '{other}' (expected fig71 or grid400)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples > MAX_SAMPLES {
            return Err(config(format!("n_samples must not exceed {MAX_SAMPLES}")));
        }
        if !self.region.is_empty() && self.region.beta_min < 0.0 {
            return Err(config("beta range must be nonnegative"));
        }
        self.criteria.validate()
    }
}

/// Sample points, deterministic in the seed.
pub fn sample_points(cfg: &SurveyConfig) -> Vec<(f64, f64)> {
    let b = cfg.region;
    if b.is_empty() || cfg.n_samples == 0 {
        return Vec::new();
    }
    match cfg.sampling {
        Sampling::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..cfg.n_samples)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let v: f64 = rng.gen();
                    (b.a_min + u * (b.a_max - b.a_min), b.beta_min + v * (b.beta_max - b.beta_min))
                })
                .collect()
        }
        Sampling::Grid => {
            let (na, nb) = cfg.grid_shape.unwrap_or_else(|| {
                let side = (cfg.n_samples as f64).sqrt().floor().max(1.0) as usize;
                (side, (cfg.n_samples / side).max(1))
            });
            let axis = |lo: f64, hi: f64, n: usize, i: usize| {
                if n == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            };
            let mut pts = Vec::with_capacity(na * nb);
            for i in 0..na {
                for j in 0..nb {
                    pts.push((axis(b.a_min, b.a_max, na, i), axis(b.beta_min, b.beta_max, nb, j)));
                }
            }
            pts
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub certified_positive: usize,
    pub rejected_analytic: usize,
    pub empirically_negative: usize,
    pub empirically_nonnegative: usize,
    pub unresolved: usize,
}

impl ClassCounts {
    pub fn tally(points: &[RegionPoint]) -> Self {
        let mut c = Self::default();
        for p in points {
            match p.classification {
                Classification::CertifiedPositive => c.certified_positive += 1,
                Classification::RejectedAnalytic => c.rejected_analytic += 1,
                Classification::EmpiricallyNegative => c.empirically_negative += 1,
                Classification::EmpiricallyNonnegative => c.empirically_nonnegative += 1,
                Classification::Unresolved => c.unresolved += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.certified_positive
            + self.rejected_analytic
            + self.empirically_negative
            + self.empirically_nonnegative
            + self.unresolved
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub config: SurveyConfig,
    pub points: Vec<RegionPoint>,
    pub counts: ClassCounts,
}

/// Classifies every sample point in parallel and sorts the result by
/// `(a, β)`.
pub fn survey(cfg: &SurveyConfig) -> Result<SurveyReport> {
    cfg.validate()?;
    let pts = sample_points(cfg);
    let criteria = cfg.criteria;
    let mut points: Vec<RegionPoint> = pts
        .par_iter()
        .map(|&(a, beta)| {
            classify_point(a, beta, &criteria).unwrap_or_else(|e| RegionPoint {
                a,
                beta,
                classification: Classification::Unresolved,
                diagnostics: Diagnostics {
                    min_value: f64::NAN,
                    argmin_t: f64::NAN,
                    ratio: f64::NAN,
                    path: EvalPath::Analytic,
                    short_window: false,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect();
    points.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.beta.total_cmp(&q.beta)));
    let counts = ClassCounts::tally(&points);
    Ok(SurveyReport { config: cfg.clone(), points, counts })
}
