//! Finite-difference oracle for `∂ₜu = ∂ₓ²u + Ψ(t) δ₀` on `[-X, X]`,
//! `Ψ(t) = Φ(t) - a (u(t,1) + u(t,-1))`, homogeneous Dirichlet at `±X`.
//!
//! The grid is pinned so that `0` and `±1` are nodes. The feedback enters
//! the implicit system as a rank-one term, which Sherman-Morrison reduces to
//! two tridiagonal solves; one of them is the same every step.

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryTrace, ForcingSpec, InitialCondition, Provenance};
use crate::error::{config, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ImplicitEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiracWeights {
    /// Weight `1/dx` on the node at 0.
    #[default]
    SingleNode,
    /// Weights `(1/4, 1/2, 1/4)/dx` on the nodes `-dx, 0, dx`.
    ThreePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    pub half_width: f64,
    pub dx: f64,
    pub dt: f64,
    pub a: f64,
    pub phi: ForcingSpec,
    pub u0: InitialCondition,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub dirac: DiracWeights,
}

/// Far-field half width adequate up to `t_end`: `max(20, ⌈1 + 6√t_end⌉)`.
pub fn default_half_width(t_end: f64) -> f64 {
    20f64.max((1.0 + 6.0 * t_end.max(0.0).sqrt()).ceil())
}

impl PdeConfig {
    pub fn new(a: f64, phi: ForcingSpec, u0: InitialCondition) -> Self {
        Self { half_width: 20.0, dx: 0.02, dt: 0.01, a, phi, u0, scheme: Scheme::ImplicitEuler, dirac: DiracWeights::SingleNode }
    }

    pub fn with_grid(mut self, half_width: f64, dx: f64, dt: f64) -> Self {
        self.half_width = half_width;
        self.dx = dx;
        self.dt = dt;
        self
    }

    fn nodes_per_unit(&self) -> Result<usize> {
        let k = (1.0 / self.dx).round();
        if k < 1.0 || (k * self.dx - 1.0).abs() > 1e-9 {
            return Err(config(format!("dx = {} must divide 1 so that 0 and ±1 are grid nodes", self.dx)));
        }
        Ok(k as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.nodes_per_unit()?;
        if self.half_width < 10.0 {
            return Err(config(format!("half width must be at least 10, got {}", self.half_width)));
        }
        let m = self.half_width * k as f64;
        if (m - m.round()).abs() > 1e-6 {
            return Err(config("half width must be a multiple of dx"));
        }
        if !(self.dt > 0.0 && self.dt <= self.dx * (1.0 + 1e-12)) {
            return Err(config(format!("dt must lie in (0, dx], got {}", self.dt)));
        }
        if !self.a.is_finite() {
            return Err(config("feedback strength must be finite"));
        }
        self.phi.validate()?;
        self.u0.validate()
    }

    pub fn x_grid(&self) -> Result<Vec<f64>> {
        let k = self.nodes_per_unit()?;
        let m = (self.half_width * k as f64).round() as i64;
        Ok((-m..=m).map(|i| i as f64 / k as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeState {
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub time: f64,
}

impl PdeState {
    pub fn initial(cfg: &PdeConfig) -> Result<Self> {
        let x_grid = cfg.x_grid()?;
        let n = x_grid.len();
        let values = x_grid
            .iter()
            .enumerate()
            .map(|(i, &x)| if i == 0 || i == n - 1 { 0.0 } else { cfg.u0.eval(x) })
            .collect();
        Ok(Self { x_grid, values, time: 0.0 })
    }

    /// `dx Σ u`.
    pub fn mass(&self) -> f64 {
        let dx = self.x_grid[1] - self.x_grid[0];
        dx * self.values.iter().sum::<f64>()
    }

    fn index_of(&self, x: f64) -> usize {
        let dx = self.x_grid[1] - self.x_grid[0];
        ((x - self.x_grid[0]) / dx).round() as usize
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.values[self.index_of(x)]
    }
}

/// Constant-coefficient tridiagonal `(-r, d, -r)` solved by the Thomas
/// algorithm with the forward sweep precomputed.
#[derive(Debug, Clone)]
struct Tridiagonal {
    r: f64,
    c_prime: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    fn new(n: usize, d: f64, r: f64) -> Result<Self> {
        let mut c_prime = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let pivot = d + r * prev;
            if pivot.abs() < 1e-300 {
                return Err(Error::SolverFailure("zero pivot in tridiagonal sweep".into()));
            }
            inv_pivot[i] = 1.0 / pivot;
            c_prime[i] = -r / pivot;
            prev = c_prime[i];
        }
        Ok(Self { r, c_prime, inv_pivot })
    }

    fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        let mut prev = 0.0;
        for i in 0..n {
            let v = (rhs[i] + self.r * prev) * self.inv_pivot[i];
            rhs[i] = v;
            prev = v;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            rhs[i] -= self.c_prime[i] * rhs[i + 1];
        }
    }
}

/// Reusable stepper; the per-run factorisations live here.
#[derive(Debug, Clone)]
pub struct PdeSolver {
    cfg: PdeConfig,
    n_interior: usize,
    ip: usize,
    im: usize,
    source: Vec<(usize, f64)>,
    lhs: Tridiagonal,
    z: Vec<f64>,
    wz: f64,
    theta: f64,
}

impl PdeSolver {
    pub fn new(cfg: &PdeConfig) -> Result<Self> {
        cfg.validate()?;
        let k = cfg.nodes_per_unit()?;
        let m = (cfg.half_width * k as f64).round() as usize;
        let n = 2 * m + 1;
        let n_interior = n - 2;
        // Interior index j corresponds to grid index j + 1.
        let i0 = m - 1;
        let ip = m + k - 1;
        let im = m - k - 1;
        let inv_dx = 1.0 / cfg.dx;
        let source = match cfg.dirac {
            DiracWeights::SingleNode => vec![(i0, inv_dx)],
            DiracWeights::ThreePoint => vec![(i0 - 1, 0.25 * inv_dx), (i0, 0.5 * inv_dx), (i0 + 1, 0.25 * inv_dx)],
        };
        let theta = match cfg.scheme {
            Scheme::ImplicitEuler => 1.0,
            Scheme::CrankNicolson => 0.5,
        };
        let r = theta * cfg.dt / (cfg.dx * cfg.dx);
        let lhs = Tridiagonal::new(n_interior, 1.0 + 2.0 * r, r)?;
        let mut z = vec![0.0; n_interior];
        for &(j, w) in &source {
            z[j] = w;
        }
        lhs.solve_in_place(&mut z);
        let wz = z[ip] + z[im];
        let solver = Self { cfg: cfg.clone(), n_interior, ip, im, source, lhs, z, wz, theta };
        if (1.0 + solver.alpha() * wz).abs() < 1e-14 {
            return Err(Error::SolverFailure("rank-one update is singular".into()));
        }
        Ok(solver)
    }

    fn alpha(&self) -> f64 {
        self.theta * self.cfg.dt * self.cfg.a
    }

    pub fn config(&self) -> &PdeConfig {
        &self.cfg
    }

    /// Advances one time step in place.
    pub fn advance(&self, state: &mut PdeState) -> Result<()> {
        let n = self.n_interior;
        if state.values.len() != n + 2 {
            return Err(config("state grid does not match the configuration"));
        }
        let dt = self.cfg.dt;
        // Times are kept as whole multiples of dt.
        let t_new = ((state.time / dt).round() + 1.0) * dt;
        let u = &state.values[1..=n];
        let mut rhs = vec![0.0; n];
        let explicit = 1.0 - self.theta;
        if explicit > 0.0 {
            let re = explicit * dt / (self.cfg.dx * self.cfg.dx);
            for j in 0..n {
                let left = if j > 0 { u[j - 1] } else { 0.0 };
                let right = if j + 1 < n { u[j + 1] } else { 0.0 };
                rhs[j] = u[j] + re * (left - 2.0 * u[j] + right);
            }
        } else {
            rhs.copy_from_slice(u);
        }
        let psi_known = self.theta * self.cfg.phi.eval(t_new)
            + explicit * (self.cfg.phi.eval(state.time) - self.cfg.a * (u[self.ip] + u[self.im]));
        for &(j, w) in &self.source {
            rhs[j] += dt * psi_known * w;
        }
        self.lhs.solve_in_place(&mut rhs);
        let alpha = self.alpha();
        let wy = rhs[self.ip] + rhs[self.im];
        let coef = alpha * wy / (1.0 + alpha * self.wz);
        for (y, z) in rhs.iter_mut().zip(&self.z) {
            *y -= coef * z;
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure(format!("non-finite solution at t = {t_new}")));
        }
        state.values[1..=n].copy_from_slice(&rhs);
        state.time = t_new;
        Ok(())
    }

    /// Outgoing diffusive flux through `±X` in the current state, used for
    /// the discrete mass balance.
    pub fn boundary_flux(&self, state: &PdeState) -> f64 {
        let n = self.n_interior;
        (state.values[1] + state.values[n]) / self.cfg.dx
    }

    /// Source intensity `Ψ` evaluated with the state's boundary samples.
    pub fn source_intensity(&self, state: &PdeState) -> f64 {
        let u = &state.values[1..=self.n_interior];
        self.cfg.phi.eval(state.time) - self.cfg.a * (u[self.ip] + u[self.im])
    }

    fn point_values(&self, state: &PdeState) -> (f64, f64) {
        let u = &state.values[1..=self.n_interior];
        (u[self.ip], u[self.im])
    }
}

/// One step with a freshly assembled solver.
pub fn step(state: &PdeState, cfg: &PdeConfig) -> Result<PdeState> {
    let solver = PdeSolver::new(cfg)?;
    let mut next = state.clone();
    solver.advance(&mut next)?;
    Ok(next)
}

/// Smallest value over `|x| ≥ 1`, the region where positivity is claimed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityAudit {
    pub min_value: f64,
    pub t_at_min: f64,
    pub x_at_min: f64,
}

impl PositivityAudit {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_value >= -tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeRun {
    pub trace: BoundaryTrace,
    pub snapshots: Vec<PdeState>,
    pub audit: PositivityAudit,
}

pub fn run(cfg: &PdeConfig, t_end: f64, sample_times: &[f64]) -> Result<PdeRun> {
    if !(t_end > 0.0 && t_end <= 1000.0) {
        return Err(config(format!("t_end must lie in (0, 1000], got {t_end}")));
    }
    let solver = PdeSolver::new(cfg)?;
    let mut state = PdeState::initial(cfg)?;
    let steps = (t_end / cfg.dt).round() as usize;
    let outside: Vec<usize> = state
        .x_grid
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() >= 1.0 - 1e-12)
        .map(|(i, _)| i)
        .collect();
    let mut times = Vec::with_capacity(steps + 1);
    let mut right = Vec::with_capacity(steps + 1);
    let mut left = Vec::with_capacity(steps + 1);
    let mut audit = PositivityAudit { min_value: f64::INFINITY, t_at_min: 0.0, x_at_min: 0.0 };
    let mut samples: Vec<f64> = sample_times.iter().copied().filter(|&s| (0.0..=t_end + 1e-12).contains(&s)).collect();
    samples.sort_by(f64::total_cmp);
    let mut snapshots = Vec::with_capacity(samples.len());
    let mut next_sample = 0;
    for n in 0..=steps {
        if n > 0 {
            solver.advance(&mut state)?;
        }
        let (r, l) = solver.point_values(&state);
        times.push(state.time);
        right.push(r);
        left.push(l);
        for &i in &outside {
            if state.values[i] < audit.min_value {
                audit = PositivityAudit { min_value: state.values[i], t_at_min: state.time, x_at_min: state.x_grid[i] };
            }
        }
        while next_sample < samples.len() && samples[next_sample] <= state.time + 0.5 * cfg.dt {
            snapshots.push(state.clone());
            next_sample += 1;
        }
    }
    Ok(PdeRun { trace: BoundaryTrace::from_point_values(times, right, left, Provenance::PdeOracle), snapshots, audit })
}
