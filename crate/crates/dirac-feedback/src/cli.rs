//! Command-line front end. The binary only forwards its arguments here.

use std::f64::consts::E;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dde::{eta_series_checked, solve_explicit, solve_series, solve_steps, DdeProblem, StepScheme};
use crate::error::{config, Error, Result};
use crate::io::{format_number, survey_csv, survey_summary, write_json, write_snapshot, write_trace, CsvMeta};
use crate::laplace::{check_contour, BromwichConfig, BromwichInverter, SDomainFunction};
use crate::scenario::{preset, simulate, ScenarioFile, PRESET_NAMES};
use crate::survey::{survey, RegionBox, SurveyConfig, SUBORDINATION_LIMIT};
use crate::transfer::{
    critical_amplitude, p_a_subordinate_grid, p_a_transform, p_tilde_series, pole_aware_sigma, pole_set,
    FeedbackParams, PTilde, SubordinationConfig,
};

#[derive(Debug, Parser)]
#[command(name = "dirac-feedback", version, about = "Diffusion with a Dirac source under boundary feedback")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact p̃_a(t, β) on a uniform grid.
    TildePa(TildePaArgs),
    /// p_a(t, β) by subordination or Bromwich inversion.
    Pa(PaArgs),
    /// Runs a scenario through the renewal and PDE paths.
    Simulate(SimulateArgs),
    /// Prints a preset scenario as TOML.
    Scenario(ScenarioArgs),
    /// Positivity survey of the (a, β) plane.
    Region(RegionArgs),
    /// The delay equation y' = A y(t-1), y = 1 on [0, 1].
    Dde(DdeArgs),
    /// Writes the data behind one figure.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct TildePaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PaMethod {
    /// Subordination for a ≤ 2, Bromwich above.
    Auto,
    Subordinate,
    Bromwich,
}

#[derive(Debug, Args)]
pub struct PaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dt: f64,
    #[arg(long, value_enum, default_value_t = PaMethod::Auto)]
    pub method: PaMethod,
    /// Contour abscissa; right of every pole by default.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long = "L", default_value_t = 50.0)]
    pub l: f64,
    #[arg(long, default_value_t = 4001)]
    pub n_nodes: usize,
    /// Integrate along a contour left of a pole anyway.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory; overrides the scenario's.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub preset: String,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, default_value = "fig71")]
    pub preset: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_hyphen_values = true)]
    pub a_range: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_hyphen_values = true)]
    pub beta_range: Option<Vec<f64>>,
    #[arg(long, default_value = "out/region")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DdeMethodArg {
    Series,
    Steps,
    Euler,
    Heun,
}

#[derive(Debug, Args)]
pub struct DdeArgs {
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = DdeMethodArg::Steps)]
    pub method: DdeMethodArg,
    /// Step of the explicit schemes.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Output nodes per unit interval for the exact methods.
    #[arg(long, default_value_t = 100)]
    pub nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const FIGURES: [&str; 8] = ["4.2", "6.1", "6.2", "6.3", "6.4", "7.1", "B.1", "B.2"];

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(FIGURES))]
    pub figure: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value = "out/figures")]
    pub out: PathBuf,
}

/// Program name plus arguments, as recorded in CSV comment lines.
pub fn invocation(args: &[String]) -> String {
    let mut parts = vec!["dirac-feedback".to_string()];
    parts.extend(args.iter().skip(1).cloned());
    parts.join(" ")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(p, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn grid(dt: f64, t_max: f64, include_zero: bool) -> Result<Vec<f64>> {
    if !(dt > 0.0 && t_max > 0.0 && t_max.is_finite()) {
        return Err(config("--dt and --t-max must be positive"));
    }
    if t_max / dt > 1e7 {
        return Err(config("grid too fine: more than 1e7 points"));
    }
    let n = (t_max / dt).round() as usize;
    let start = if include_zero { 0 } else { 1 };
    // Dividing by an integral 1/dt keeps nodes such as 0.15 exact.
    let inv = (1.0 / dt).round();
    let exact = (inv * dt - 1.0).abs() < 1e-12;
    Ok((start..=n).map(|i| if exact { i as f64 / inv } else { i as f64 * dt }).collect())
}

fn columns_csv(meta: &CsvMeta, header: &[&str], cols: &[Vec<f64>]) -> Result<String> {
    let n = cols.first().map_or(0, Vec::len);
    let rows = (0..n).map(|i| cols.iter().map(|c| format_number(c[i])).collect());
    crate::io::csv_string(meta, header, rows)
}

/// `p̃_a(·, β)` on a grid: the closed sum where it is well conditioned, the
/// step pieces elsewhere.
pub fn p_tilde_column(a: f64, beta: f64, times: &[f64]) -> Result<Vec<f64>> {
    let params = FeedbackParams::new(a, beta)?;
    let t_top = times.iter().copied().fold(0.0, f64::max);
    let table = PTilde::new(a, (t_top - beta).max(0.0) + 1.0)?;
    Ok(times
        .iter()
        .map(|&t| {
            if t >= beta && eta_series_checked(-a, t - beta).ill_conditioned {
                table.value(t, beta)
            } else {
                p_tilde_series(params, t)
            }
        })
        .collect())
}

fn bromwich_column(params: FeedbackParams, times: &[f64], cfg: BromwichConfig, force: bool) -> Result<Vec<f64>> {
    let f = p_a_transform(params)?;
    let t_top = times.iter().copied().fold(0.0, f64::max).max(1e-3);
    let inv = match check_contour(&f, cfg.sigma) {
        Ok(()) => BromwichInverter::new(&f, cfg, t_top)?,
        Err(e @ Error::ContourBelowPole { .. }) if force => {
            eprintln!("warning: {e}; integrating anyway, the result is not trustworthy");
            let g = f.clone();
            let blind = SDomainFunction::new(format!("{} (pole check disabled)", f.label), f64::NEG_INFINITY, move |s| g.eval(s));
            BromwichInverter::new(&blind, cfg, t_top)?
        }
        Err(e) => return Err(e),
    };
    times.iter().map(|&t| inv.eval(t)).collect()
}

/// `p_a(·, β)` with the method chosen as in [`PaMethod`].
pub fn p_a_column(
    params: FeedbackParams,
    times: &[f64],
    method: PaMethod,
    sigma: Option<f64>,
    l: f64,
    n_nodes: usize,
    force: bool,
) -> Result<Vec<f64>> {
    let method = match method {
        PaMethod::Auto if sigma.is_some() => PaMethod::Bromwich,
        PaMethod::Auto if params.a <= SUBORDINATION_LIMIT && params.a >= 0.0 => PaMethod::Subordinate,
        PaMethod::Auto => PaMethod::Bromwich,
        m => m,
    };
    match method {
        PaMethod::Subordinate => p_a_subordinate_grid(params, times, SubordinationConfig::default()),
        _ => {
            let sigma = match sigma {
                Some(s) => s,
                None => pole_aware_sigma(params.a)?,
            };
            let cfg = BromwichConfig { sigma, l, n_nodes, ..BromwichConfig::default() };
            bromwich_column(params, times, cfg, force)
        }
    }
}

fn cmd_tilde_pa(args: &TildePaArgs, inv: &str) -> Result<()> {
    let times = grid(args.dt, args.t_max, true)?;
    let values = p_tilde_column(args.a, args.beta, &times)?;
    let meta = CsvMeta::new(inv, &(args.a, args.beta, args.t_max, args.dt))?;
    emit(args.out.as_deref(), &columns_csv(&meta, &["t", "value"], &[times, values])?)
}

fn cmd_pa(args: &PaArgs, inv: &str) -> Result<()> {
    let params = FeedbackParams::new(args.a, args.beta)?;
    let times = grid(args.dt, args.t_max, false)?;
    let values = p_a_column(params, &times, args.method, args.sigma, args.l, args.n_nodes, args.force)?;
    let meta = CsvMeta::new(
        inv,
        &(args.a, args.beta, args.t_max, args.dt, args.method, args.sigma, args.l, args.n_nodes, args.force),
    )?;
    emit(args.out.as_deref(), &columns_csv(&meta, &["t", "value"], &[times, values])?)
}

fn load_scenario(args: &SimulateArgs) -> Result<ScenarioFile> {
    match (&args.scenario, &args.preset) {
        (Some(path), _) => ScenarioFile::from_toml(&std::fs::read_to_string(path)?),
        (None, Some(name)) => preset(name),
        (None, None) => Err(config(format!(
            "give --scenario FILE or --preset NAME (one of {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn cmd_simulate(args: &SimulateArgs, inv: &str) -> Result<()> {
    let s = load_scenario(args)?;
    let dir = args
        .out
        .clone()
        .or_else(|| s.outputs.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&s.name));
    let out = simulate(&s)?;
    let meta = CsvMeta::new(inv, &s)?;
    if let Some(t) = &out.renewal_trace {
        write_trace(&dir.join("renewal_trace.csv"), &meta, t)?;
    }
    if let Some(r) = &out.pde_run {
        write_trace(&dir.join("pde_trace.csv"), &meta, &r.trace)?;
        for (i, snap) in r.snapshots.iter().enumerate() {
            write_snapshot(&dir.join(format!("snapshot_{i}.csv")), &meta, snap)?;
        }
    }
    write_json(&dir.join("report.json"), &serde_json::json!({ "config_hash": meta.config_hash, "report": out.report }))?;
    let r = &out.report;
    println!("scenario {} written to {}", r.scenario, dir.display());
    if let Some(a) = &r.positivity_audit {
        println!(
            "positivity audit: min u = {:.4e} at t = {}, x = {} ({})",
            a.min_value,
            a.t_at_min,
            a.x_at_min,
            if r.audit_passed == Some(true) { "pass" } else { "fail" }
        );
    }
    if let Some(ss) = &r.steady_state {
        println!("steady state limit {:.6}, final-value estimate {:?}", ss.limit, ss.final_value);
    }
    if let Some(d) = &r.oracle_discrepancy {
        println!("renewal vs PDE: max |du+| = {:.3e} (normalised {:.3e})", d.max_abs, d.normalized);
    }
    Ok(())
}

fn cmd_scenario(args: &ScenarioArgs) -> Result<()> {
    print!("{}", preset(&args.preset)?.to_toml()?);
    Ok(())
}

fn region_config(args: &RegionArgs) -> Result<SurveyConfig> {
    let mut cfg = SurveyConfig::preset(&args.preset, args.seed)?;
    if let Some(n) = args.n_samples {
        cfg.n_samples = n;
        cfg.grid_shape = None;
    }
    if let Some(r) = &args.a_range {
        cfg.region = RegionBox { a_min: r[0], a_max: r[1], ..cfg.region };
    }
    if let Some(r) = &args.beta_range {
        cfg.region = RegionBox { beta_min: r[0], beta_max: r[1], ..cfg.region };
    }
    Ok(cfg)
}

fn write_survey_bundle(cfg: &SurveyConfig, dir: &Path, inv: &str) -> Result<()> {
    let report = survey(cfg)?;
    let meta = CsvMeta::new(inv, cfg)?;
    emit(Some(&dir.join("survey.csv")), &survey_csv(&meta, &report)?)?;
    write_json(&dir.join("summary.json"), &survey_summary(&report, &meta))?;
    let c = &report.counts;
    println!(
        "{} points: certified {}, rejected {}, negative {}, nonnegative {}, unresolved {}",
        c.total(),
        c.certified_positive,
        c.rejected_analytic,
        c.empirically_negative,
        c.empirically_nonnegative,
        c.unresolved
    );
    Ok(())
}

fn cmd_region(args: &RegionArgs, inv: &str) -> Result<()> {
    write_survey_bundle(&region_config(args)?, &args.out, inv)
}

fn dde_solution(a: f64, t_end: f64, method: DdeMethodArg, dt: f64, nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = DdeProblem::new(a, t_end);
    let sol = match method {
        DdeMethodArg::Series => solve_series(&p, nodes)?,
        DdeMethodArg::Steps => solve_steps(&p, nodes)?,
        DdeMethodArg::Euler => solve_explicit(&p, dt, StepScheme::ForwardEuler)?,
        DdeMethodArg::Heun => solve_explicit(&p, dt, StepScheme::Heun)?,
    };
    Ok((sol.grid, sol.values))
}

fn cmd_dde(args: &DdeArgs, inv: &str) -> Result<()> {
    let (t, y) = dde_solution(args.a, args.t_end, args.method, args.dt, args.nodes)?;
    let bound: Vec<f64> = t.iter().map(|&s| (args.a.abs() * s).exp()).collect();
    let meta = CsvMeta::new(inv, &(args.a, args.t_end, args.method, args.dt, args.nodes))?;
    emit(args.out.as_deref(), &columns_csv(&meta, &["t", "y", "bound"], &[t, y, bound])?)
}

const BETAS: [f64; 4] = [0.0, 1.0, 2.0, 4.0];
const BETA_HEADER: [&str; 5] = ["t", "beta_0", "beta_1", "beta_2", "beta_4"];

fn beta_panel(a: f64, times: &[f64], sigma: Option<f64>, force: bool) -> Result<Vec<Vec<f64>>> {
    let mut cols = vec![times.to_vec()];
    for beta in BETAS {
        let params = FeedbackParams::new(a, beta)?;
        cols.push(p_a_column(params, times, PaMethod::Auto, sigma, 50.0, 4001, force)?);
    }
    Ok(cols)
}

/// Writes the CSV bundle for one figure into `dir`; returns the file names.
pub fn reproduce_figure(figure: &str, dir: &Path, seed: u64, inv: &str) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let meta = CsvMeta::new(inv, &(figure, seed))?;
    let mut put = |name: &str, header: &[&str], cols: &[Vec<f64>]| -> Result<()> {
        let path = dir.join(name);
        emit(Some(&path), &columns_csv(&meta, header, cols)?)?;
        written.push(path);
        Ok(())
    };
    let fine = grid(0.01, 10.0, true)?;
    let open = grid(0.05, 10.0, false)?;
    match figure {
        "4.2" => {
            for (name, amps, header) in [
                ("fig4_2_left.csv", [0.0, -0.5, -1.0], ["t", "a_0", "a_-0.5", "a_-1"]),
                ("fig4_2_right.csv", [0.25, 1.0, 2.0], ["t", "a_0.25", "a_1", "a_2"]),
            ] {
                let mut cols = vec![fine.clone()];
                for a in amps {
                    cols.push(p_tilde_column(a, 0.0, &fine)?);
                }
                put(name, &header, &cols)?;
            }
        }
        "6.1" => {
            put("fig6_1a.csv", &BETA_HEADER, &beta_panel(0.25, &open, None, false)?)?;
            put("fig6_1b.csv", &BETA_HEADER, &beta_panel(1.0 / E, &open, None, false)?)?;
        }
        "6.2" => {
            put("fig6_2a.csv", &BETA_HEADER, &beta_panel(1.0, &open, None, false)?)?;
            put("fig6_2b.csv", &BETA_HEADER, &beta_panel(2.0, &open, None, false)?)?;
        }
        "6.3" => {
            put("fig6_3a.csv", &BETA_HEADER, &beta_panel(50.0, &open, Some(0.1), true)?)?;
            put("fig6_3b.csv", &BETA_HEADER, &beta_panel(50.0, &open, Some(1.2), false)?)?;
            let poles = pole_set(50.0, 4)?;
            let mut re = Vec::new();
            let mut im = Vec::new();
            for p in &poles.p.poles {
                re.push(p.re);
                im.push(p.im);
            }
            put("fig6_3_poles.csv", &["re", "im"], &[re, im])?;
        }
        "6.4" => {
            let a = (critical_amplitude() * 1000.0).round() / 1000.0;
            let t = grid(0.05, 20.0, false)?;
            put("fig6_4.csv", &BETA_HEADER, &beta_panel(a, &t, None, false)?)?;
        }
        "7.1" => {
            let cfg = SurveyConfig::fig71(seed);
            write_survey_bundle(&cfg, dir, inv)?;
            written.push(dir.join("survey.csv"));
            written.push(dir.join("summary.json"));
            let a: Vec<f64> = (0..=1000).map(|i| 1.0 + 9.0 * i as f64 / 1000.0).collect();
            let beta: Vec<f64> = a.iter().map(|a| (a - 1.0) / a).collect();
            let path = dir.join("critical_curve.csv");
            emit(Some(&path), &columns_csv(&meta, &["a", "beta"], &[a, beta])?)?;
            written.push(path);
            return Ok(written);
        }
        "B.1" => {
            let mut cols = Vec::new();
            for a in [0.0, 1.0] {
                let (t, y) = dde_solution(a, 5.0, DdeMethodArg::Euler, 1e-3, 0)?;
                let b: Vec<f64> = t.iter().map(|&s| (a * s).exp()).collect();
                if cols.is_empty() {
                    cols.push(t);
                }
                cols.push(y);
                cols.push(b);
            }
            put("figB_1.csv", &["t", "y_A0", "bound_A0", "y_A1", "bound_A1"], &cols)?;
        }
        "B.2" => {
            let mut cols = Vec::new();
            for a in [-0.25, -1.0, -2.0] {
                let (t, y) = dde_solution(a, 20.0, DdeMethodArg::Euler, 1e-3, 0)?;
                if cols.is_empty() {
                    cols.push(t);
                }
                cols.push(y);
            }
            put("figB_2.csv", &["t", "y_A-0.25", "y_A-1", "y_A-2"], &cols)?;
        }
        other => return Err(config(format!("unknown figure '{other}'"))),
    }
    Ok(written)
}

fn cmd_reproduce(args: &ReproduceArgs, inv: &str) -> Result<()> {
    let files = reproduce_figure(&args.figure, &args.out, args.seed, inv)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

/// Runs one parsed command.
pub fn execute(cli: &Cli, invocation: &str) -> Result<()> {
    match &cli.command {
        Command::TildePa(a) => cmd_tilde_pa(a, invocation),
        Command::Pa(a) => cmd_pa(a, invocation),
        Command::Simulate(a) => cmd_simulate(a, invocation),
        Command::Scenario(a) => cmd_scenario(a),
        Command::Region(a) => cmd_region(a, invocation),
        Command::Dde(a) => cmd_dde(a, invocation),
        Command::Reproduce(a) => cmd_reproduce(a, invocation),
    }
}
