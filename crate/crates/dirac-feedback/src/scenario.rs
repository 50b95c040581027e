//! Scenario files and the simulation pipeline behind `simulate`.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! schema_version = 1
//! name = "tent"
//!
//! [model]
//! a = 0.36787944117144233
//! phi = { kind = "constant", value = 1.0 }
//!
//! [model.u0]
//! shapes = [{ kind = "tent", center = 0.0, half_width = 2.0, height = 1.0 }]
//! monotone_flags = { increasing_left = true, decreasing_right = true }
//!
//! [numerics]
//! t_end = 50.0
//! renewal = { dt = 0.01 }
//! pde = { dx = 0.02, dt = 0.01 }
//!
//! [outputs]
//! sample_times = [1.0, 10.0, 50.0]
//! ```
//!
//! Unknown keys are rejected at every level.

use std::f64::consts::E;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::boundary::{
    steady_state_value, u_minus_trace, u_plus_forcing_transform, uniform_time_grid, BoundaryTrace, ForcingSpec,
    HypothesisReport, InitialCondition, Provenance, RenewalMethod, Shape, solve_u_plus_renewal,
};
use crate::error::{config, Error, Result};
use crate::laplace::{bromwich_invert, default_probes, final_value, BromwichConfig};
use crate::pde::{default_half_width, run, DiracWeights, PdeConfig, PdeRun, PositivityAudit, Scheme};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub name: String,
    pub model: Model,
    pub numerics: Numerics,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub a: f64,
    pub phi: ForcingSpec,
    #[serde(default)]
    pub u0: InitialCondition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub t_end: f64,
    /// Renewal path; skipped when absent.
    #[serde(default)]
    pub renewal: Option<RenewalNumerics>,
    /// PDE oracle; skipped when absent.
    #[serde(default)]
    pub pde: Option<PdeNumerics>,
    /// Inverts the forcing part of `u₊` at `t_end` when present.
    #[serde(default)]
    pub bromwich: Option<BromwichConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewalNumerics {
    #[serde(default = "default_renewal_dt")]
    pub dt: f64,
    #[serde(default)]
    pub method: RenewalMethod,
}

fn default_renewal_dt() -> f64 {
    0.01
}

impl Default for RenewalNumerics {
    fn default() -> Self {
        Self { dt: 0.01, method: RenewalMethod::Marching }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeNumerics {
    /// Defaults to `max(20, ⌈1 + 6√t_end⌉)`.
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default = "default_dx")]
    pub dx: f64,
    #[serde(default = "default_pde_dt")]
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub dirac: DiracWeights,
}

fn default_dx() -> f64 {
    0.02
}

fn default_pde_dt() -> f64 {
    0.01
}

impl Default for PdeNumerics {
    fn default() -> Self {
        Self { half_width: None, dx: 0.02, dt: 0.01, scheme: Scheme::ImplicitEuler, dirac: DiracWeights::SingleNode }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Output directory; the command line may override it.
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default)]
    pub sample_times: Vec<f64>,
    /// Audit threshold on `min u` over `|x| ≥ 1`.
    #[serde(default = "default_audit_tol")]
    pub audit_tol: f64,
}

fn default_audit_tol() -> f64 {
    1e-3
}

impl Default for Outputs {
    fn default() -> Self {
        Self { directory: None, sample_times: Vec::new(), audit_tol: 1e-3 }
    }
}

impl ScenarioFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Structural checks; hypotheses on `u₀` are checked when the scenario
    /// runs.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !self.model.a.is_finite() {
            return Err(config("a must be finite"));
        }
        if !(self.numerics.t_end > 0.0 && self.numerics.t_end <= 1000.0) {
            return Err(config(format!("t_end must lie in (0, 1000], got {}", self.numerics.t_end)));
        }
        if self.numerics.renewal.is_none() && self.numerics.pde.is_none() {
            return Err(config("scenario requests neither the renewal nor the PDE path"));
        }
        self.model.phi.validate()?;
        self.model.u0.shapes.iter().try_for_each(Shape::validate)
    }

    pub fn pde_config(&self) -> Option<PdeConfig> {
        self.numerics.pde.map(|p| {
            let x = p.half_width.unwrap_or_else(|| default_half_width(self.numerics.t_end));
            let mut cfg = PdeConfig::new(self.model.a, self.model.phi.clone(), self.model.u0.clone()).with_grid(x, p.dx, p.dt);
            cfg.scheme = p.scheme;
            cfg.dirac = p.dirac;
            cfg
        })
    }
}

fn base(name: &str, a: f64, phi: ForcingSpec, u0: InitialCondition, t_end: f64) -> ScenarioFile {
    ScenarioFile {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        model: Model { a, phi, u0 },
        numerics: Numerics {
            t_end,
            renewal: Some(RenewalNumerics::default()),
            pde: Some(PdeNumerics::default()),
            bromwich: None,
        },
        outputs: Outputs { sample_times: vec![1.0, t_end / 2.0, t_end], ..Outputs::default() },
    }
}

/// Monotone tent, `a = 1/e`, `Φ ≡ 1`.
pub fn monotone_tent() -> ScenarioFile {
    let u0 = InitialCondition::from_shape(Shape::Tent { center: 0.0, half_width: 2.0, height: 1.0 }).with_monotone();
    base("monotone_tent", 1.0 / E, ForcingSpec::constant(1.0), u0, 50.0)
}

/// Datum that is asymmetric only inside `(-½, ½)`, `a = 1/e`, `Φ ≡ 1`.
pub fn even_outside_half() -> ScenarioFile {
    let u0 = InitialCondition {
        shapes: vec![
            Shape::Tent { center: 0.15, half_width: 0.3, height: 2.0 },
            Shape::SymmetricPair { offset: 2.5, width: 0.4, height: 1.0 },
        ],
        ..InitialCondition::default()
    }
    .with_even_outside_half();
    base("even_outside_half", 1.0 / E, ForcingSpec::constant(1.0), u0, 50.0)
}

/// Zero on `(-∞, ½)`, a tall plateau on `[1, 3]`, no forcing, `a = 1/e`.
pub fn asymmetric_counterexample() -> ScenarioFile {
    let u0 = InitialCondition::from_shape(Shape::Tabulated {
        xs: vec![0.5, 1.0, 3.0, 3.5],
        values: vec![0.0, 10.0, 10.0, 0.0],
    });
    base("asymmetric_counterexample", 1.0 / E, ForcingSpec::constant(0.0), u0, 50.0)
}

/// `Φ ≡ 1`, `a = 1/e`, monotone tent, run to `t = 300`.
pub fn steady_state() -> ScenarioFile {
    let mut s = monotone_tent();
    s.name = "steady_state".into();
    s.numerics.t_end = 300.0;
    s.outputs.sample_times = vec![10.0, 100.0, 300.0];
    s
}

pub const PRESET_NAMES: [&str; 4] = ["monotone_tent", "even_outside_half", "asymmetric_counterexample", "steady_state"];

pub fn preset(name: &str) -> Result<ScenarioFile> {
    match name {
        "monotone_tent" => Ok(monotone_tent()),
        "even_outside_half" => Ok(even_outside_half()),
        "asymmetric_counterexample" => Ok(asymmetric_counterexample()),
        "steady_state" => Ok(steady_state()),
        other => Err(config(format!("unknown scenario preset '{other}'"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub min_right: f64,
    pub min_left: f64,
    pub final_right: f64,
    pub final_left: f64,
    pub max_abs_u_plus: f64,
}

impl TraceSummary {
    fn of(trace: &BoundaryTrace) -> Self {
        let n = trace.t_grid.len() - 1;
        Self {
            min_right: trace.min_right(),
            min_left: trace.min_left(),
            final_right: trace.u_right[n],
            final_left: trace.u_left[n],
            max_abs_u_plus: trace.u_plus.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateEstimate {
    /// `Φ∞ / (2a)`.
    pub limit: f64,
    /// `½ lim s Û₊(s)` from the transform.
    pub final_value: Option<f64>,
    /// Largest relative deviation of `u(t_end, ±1)` from the limit, per path.
    pub renewal_relative_error: Option<f64>,
    pub pde_relative_error: Option<f64>,
    /// Forcing part of `u₊(t_end)` by Bromwich inversion.
    pub bromwich_forcing_part: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleDiscrepancy {
    pub max_abs: f64,
    /// `max_abs / (1 + max |u₊|)`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenario: String,
    pub a: f64,
    pub t_end: f64,
    pub hypotheses: HypothesisReport,
    pub renewal: Option<TraceSummary>,
    pub pde: Option<TraceSummary>,
    pub positivity_audit: Option<PositivityAudit>,
    pub audit_passed: Option<bool>,
    pub steady_state: Option<SteadyStateEstimate>,
    pub oracle_discrepancy: Option<OracleDiscrepancy>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub report: SimulationReport,
    pub renewal_trace: Option<BoundaryTrace>,
    pub pde_run: Option<PdeRun>,
}

/// Renewal trace on a uniform grid up to `t_end`.
pub fn renewal_trace(
    a: f64,
    phi: &ForcingSpec,
    u0: &InitialCondition,
    t_end: f64,
    numerics: RenewalNumerics,
) -> Result<BoundaryTrace> {
    let grid = uniform_time_grid(numerics.dt, t_end)?;
    let up = solve_u_plus_renewal(a, phi, u0, &grid, numerics.method)?;
    let um = u_minus_trace(u0, &grid);
    Ok(BoundaryTrace::from_sum_difference(grid, up, um, Provenance::Renewal))
}

fn interpolate(grid: &[f64], values: &[f64], t: f64) -> f64 {
    let i = grid.partition_point(|&g| g <= t);
    if i == 0 {
        return values[0];
    }
    if i >= grid.len() {
        return values[grid.len() - 1];
    }
    let w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    values[i - 1] * (1.0 - w) + values[i] * w
}

/// `max |u₊^renewal - u₊^pde|` over the PDE times, the renewal trace
/// linearly interpolated.
pub fn oracle_discrepancy(renewal: &BoundaryTrace, pde: &BoundaryTrace) -> OracleDiscrepancy {
    let t_top = renewal.t_grid.last().copied().unwrap_or(0.0);
    let mut max_abs = 0.0f64;
    let mut scale = 0.0f64;
    for (&t, &v) in pde.t_grid.iter().zip(&pde.u_plus) {
        if t > t_top + 1e-9 {
            break;
        }
        let r = interpolate(&renewal.t_grid, &renewal.u_plus, t);
        max_abs = max_abs.max((r - v).abs());
        scale = scale.max(r.abs());
    }
    OracleDiscrepancy { max_abs, normalized: max_abs / (1.0 + scale) }
}

fn relative_error(right: f64, left: f64, limit: f64) -> f64 {
    ((right - limit).abs().max((left - limit).abs())) / limit.abs()
}

/// Runs the requested paths and assembles the report.
pub fn simulate(s: &ScenarioFile) -> Result<SimulationOutput> {
    s.validate()?;
    s.model.u0.validate()?;
    let Model { a, phi, u0 } = &s.model;
    let t_end = s.numerics.t_end;
    let renewal = s.numerics.renewal.map(|n| renewal_trace(*a, phi, u0, t_end, n)).transpose()?;
    let pde_run = match s.pde_config() {
        Some(cfg) => Some(run(&cfg, t_end, &s.outputs.sample_times)?),
        None => None,
    };
    let steady = match (phi.phi_infinity(), steady_state_value(*a, 1.0)) {
        (Some(phi_inf), Ok(_)) if phi_inf != 0.0 => {
            let limit = steady_state_value(*a, phi_inf)?;
            let transform = u_plus_forcing_transform(*a, phi_inf)?;
            let fv = final_value(&transform, &default_probes()).ok().map(|v| 0.5 * v);
            let bromwich_forcing_part = match s.numerics.bromwich {
                Some(cfg) => Some(bromwich_invert(&transform, t_end, cfg)?),
                None => None,
            };
            Some(SteadyStateEstimate {
                limit,
                final_value: fv,
                renewal_relative_error: renewal.as_ref().map(|t| {
                    let n = t.t_grid.len() - 1;
                    relative_error(t.u_right[n], t.u_left[n], limit)
                }),
                pde_relative_error: pde_run.as_ref().map(|r| {
                    let n = r.trace.t_grid.len() - 1;
                    relative_error(r.trace.u_right[n], r.trace.u_left[n], limit)
                }),
                bromwich_forcing_part,
            })
        }
        _ => None,
    };
    let oracle = match (&renewal, &pde_run) {
        (Some(r), Some(p)) => Some(oracle_discrepancy(r, &p.trace)),
        _ => None,
    };
    let report = SimulationReport {
        scenario: s.name.clone(),
        a: *a,
        t_end,
        hypotheses: u0.hypotheses(),
        renewal: renewal.as_ref().map(TraceSummary::of),
        pde: pde_run.as_ref().map(|r| TraceSummary::of(&r.trace)),
        positivity_audit: pde_run.as_ref().map(|r| r.audit),
        audit_passed: pde_run.as_ref().map(|r| r.audit.passes(s.outputs.audit_tol)),
        steady_state: steady,
        oracle_discrepancy: oracle,
    };
    Ok(SimulationOutput { report, renewal_trace: renewal, pde_run })
}
