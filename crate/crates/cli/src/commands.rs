use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use dfpp_core::distributions::EdgeTimeDistribution;
use dfpp_core::estimators::{
    classify_phase, default_theta_grid, estimate_mu_grid, moment_plateau, sigma_tail as core_sigma_tail,
    tail_probability, Phase, PhaseBudget, CONFIDENCE, DEFAULT_REPLICATES,
};
use dfpp_core::growth::{simulate_fpp_growth, simulate_growth, OccupancyHistogram};
use dfpp_core::lattice::{generate_field, GridSpec};
use dfpp_core::oriented::{
    cluster_size, estimate_cone, estimate_pc, right_edge_trace, ClusterSize, PcConfig, RightEdge, DEFAULT_MARGIN,
};
use dfpp_core::output::{compare_outputs, fmt_f64, fmt_opt, write_file, Report, Table};
use dfpp_core::passage::{compute_passage, shape_boundary_radius};
use dfpp_core::suites::{run_suite, Suite, SuiteConfig};
use dfpp_core::Error;

use crate::{Common, Format};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            CliError::Budget(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_dist(c: &Common) -> CliResult<(EdgeTimeDistribution, Value)> {
    let raw = c
        .dist
        .as_deref()
        .ok_or_else(|| CliError::Config("missing required field `dist` (pass --dist <json|file>)".into()))?;
    let text = if raw.trim_start().starts_with('{') {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw).map_err(|e| CliError::Config(format!("dist file {raw}: {e}")))?
    };
    let d = EdgeTimeDistribution::from_json(&text).map_err(|e| CliError::Config(format!("field `dist`: {e}")))?;
    let v = serde_json::to_value(&d).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((d, v))
}

fn replicates(c: &Common, default: usize) -> usize {
    c.replicates.unwrap_or(default)
}

/// Echo of the run configuration; the worker count and output directory are
/// left out so they cannot change the bytes written.
fn config(c: &Common, dist: Option<&Value>, reps: usize, args: &impl Serialize) -> Value {
    json!({
        "dist": dist,
        "seed": c.seed,
        "replicates": reps,
        "args": args,
    })
}

struct Output {
    stem: String,
    table: Table,
    extra: Vec<(String, Table)>,
    result: Value,
}

fn emit(c: &Common, command: &str, cfg: Value, out: Output) -> CliResult<()> {
    let report = Report::new(command, cfg, out.result)?;
    let json = report.to_json()?;
    let csv = out.table.render(&report.config_hash);
    if let Some(dir) = &c.out {
        write_file(dir, &format!("{}.csv", out.stem), &csv)?;
        write_file(dir, &format!("{}.json", out.stem), &json)?;
        for (name, t) in &out.extra {
            write_file(dir, &format!("{name}.csv"), &t.render(&report.config_hash))?;
        }
    }
    match c.format {
        Format::Csv => print!("{csv}"),
        Format::Json => print!("{json}"),
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct MuArgs {
    /// Comma-separated angles in radians; defaults to nine angles over [0, pi/2].
    #[arg(long, value_delimiter = ',')]
    thetas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
    radii: Vec<f64>,
}

pub fn estimate_mu(c: &Common, a: &MuArgs) -> CliResult<bool> {
    let (d, dv) = load_dist(c)?;
    let reps = replicates(c, DEFAULT_REPLICATES);
    let thetas = a.thetas.clone().unwrap_or_else(default_theta_grid);
    let est = estimate_mu_grid(&d, &thetas, &a.radii, reps, c.seed)?;
    let mut table = Table::new(&[
        "theta", "r", "x", "y", "replicates", "mean_T", "stderr_T", "mean_T_over_r", "stderr_T_over_r",
    ]);
    for e in &est {
        for cell in &e.cells {
            table.push(vec![
                fmt_f64(e.theta),
                fmt_f64(cell.r),
                cell.target.0.to_string(),
                cell.target.1.to_string(),
                reps.to_string(),
                fmt_f64(cell.t.mean),
                fmt_f64(cell.t.stderr),
                fmt_f64(cell.t_over_r.mean),
                fmt_f64(cell.t_over_r.stderr),
            ]);
        }
    }
    let summary: Vec<Value> = est
        .iter()
        .map(|e| {
            json!({
                "theta": e.theta,
                "mu_hat": e.mu_hat,
                "mu_stderr": e.mu_stderr,
                "lower_bound": e.lower_bound(CONFIDENCE),
                "nonincreasing": e.nonincreasing,
                "trend": e.trend,
            })
        })
        .collect();
    let cfg = config(c, Some(&dv), reps, a);
    emit(c, "estimate-mu", cfg, Output {
        stem: "estimate_mu".into(),
        table,
        extra: vec![],
        result: json!({ "directions": summary }),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct TailArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 256.0)]
    r: f64,
}

pub fn tail(c: &Common, a: &TailArgs) -> CliResult<bool> {
    let (d, dv) = load_dist(c)?;
    let reps = replicates(c, 10_000);
    let t = tail_probability(&d, a.theta, a.delta, a.r, reps, c.seed)?;
    let mut table = Table::new(&["theta", "delta", "r", "hits", "replicates", "frequency", "ci_low", "ci_high"]);
    table.push(vec![
        fmt_f64(t.theta),
        fmt_f64(t.delta),
        fmt_f64(t.r),
        t.hits.to_string(),
        t.replicates.to_string(),
        fmt_f64(t.frequency),
        fmt_f64(t.ci.0),
        fmt_f64(t.ci.1),
    ]);
    emit(c, "tail", config(c, Some(&dv), reps, a), Output {
        stem: "tail".into(),
        table,
        extra: vec![],
        result: serde_json::to_value(&t).unwrap(),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct MomentArgs {
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 1)]
    m: u32,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
    radii: Vec<f64>,
    /// Threshold estimate to use; estimated when omitted.
    #[arg(long)]
    pc: Option<f64>,
    /// Levels of oriented percolation used for the cone.
    #[arg(long, default_value_t = 10_000)]
    cone_levels: usize,
}

fn pc_or_estimate(pc: Option<f64>, seed: u64) -> CliResult<f64> {
    match pc {
        Some(p) => Ok(p),
        None => Ok(estimate_pc(&PcConfig::new(10_000, 0.01, seed))?.p_hat),
    }
}

pub fn moments(c: &Common, a: &MomentArgs) -> CliResult<bool> {
    let (d, dv) = load_dist(c)?;
    let reps = replicates(c, DEFAULT_REPLICATES);
    let pc = pc_or_estimate(a.pc, c.seed)?;
    let f0 = d.atom_at_zero();
    let cone = estimate_cone(f0, a.cone_levels, 50, DEFAULT_MARGIN, c.seed)?
        .ok_or_else(|| CliError::Config(format!("no cone: F(0) = {f0} has negative edge speed")))?;
    let p = moment_plateau(&d, a.theta, a.m, &a.radii, reps, c.seed, pc, &cone)?;
    let mut table = Table::new(&["theta", "m", "r", "moment", "stderr", "boot_low", "boot_high"]);
    for cell in &p.cells {
        table.push(vec![
            fmt_f64(p.theta),
            p.m.to_string(),
            fmt_f64(cell.r),
            fmt_f64(cell.moment.mean),
            fmt_f64(cell.moment.stderr),
            fmt_f64(cell.bootstrap_ci.0),
            fmt_f64(cell.bootstrap_ci.1),
        ]);
    }
    emit(c, "moments", config(c, Some(&dv), reps, a), Output {
        stem: "moments".into(),
        table,
        extra: vec![],
        result: json!({ "p_c_hat": pc, "cone": cone, "plateau": p }),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct SigmaArgs {
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 256.0)]
    r: f64,
}

pub fn sigma_tail(c: &Common, a: &SigmaArgs) -> CliResult<bool> {
    let (d, dv) = load_dist(c)?;
    let reps = replicates(c, 10_000);
    let s = core_sigma_tail(&d, a.theta, a.r, reps, c.seed)?;
    let mut table = Table::new(&["k", "survival"]);
    for (k, f) in &s.survival {
        table.push(vec![k.to_string(), fmt_f64(*f)]);
    }
    emit(c, "sigma-tail", config(c, Some(&dv), reps, a), Output {
        stem: "sigma_tail".into(),
        table,
        extra: vec![],
        result: serde_json::to_value(&s).unwrap(),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseArgs {
    /// Comma-separated values of F(0); the token `pc` stands for the
    /// estimated threshold and is classified as critical.
    #[arg(long, default_value = "0.4,pc,0.8")]
    p: String,
    #[arg(long, value_delimiter = ',')]
    thetas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
    radii: Vec<f64>,
    #[arg(long)]
    pc: Option<f64>,
}

pub fn phase_diagram(c: &Common, a: &PhaseArgs) -> CliResult<bool> {
    let reps = replicates(c, DEFAULT_REPLICATES);
    let thetas = a.thetas.clone().unwrap_or_else(default_theta_grid);
    let tokens: Vec<&str> = a.p.split(',').map(str::trim).collect();
    let pc = pc_or_estimate(a.pc, c.seed)?;
    let mut table = Table::new(&[
        "p", "phase", "alpha_hat", "theta_minus", "theta_plus", "theta", "mu_hat", "mu_stderr", "lower_bound",
        "decay_exponent", "expectation", "ok",
    ]);
    let mut rows = Vec::new();
    let mut all_ok = true;
    for tok in tokens {
        let (p, force) = if tok == "pc" {
            (pc, Some(Phase::Critical))
        } else {
            let p: f64 = tok
                .parse()
                .map_err(|_| CliError::Config(format!("field `p`: cannot parse {tok:?}")))?;
            if !(0.0 < p && p < 1.0) {
                return Err(CliError::Config(format!("field `p`: {p} outside (0, 1)")));
            }
            (p, None)
        };
        let d = EdgeTimeDistribution::bernoulli(p)?;
        let mut budget = PhaseBudget::new(c.seed);
        budget.r_schedule = a.radii.clone();
        budget.replicates = reps;
        budget.force = force;
        let rep = classify_phase(&d, pc, &thetas, &budget)?;
        all_ok &= rep.consistent;
        let phase = serde_json::to_value(rep.phase).unwrap();
        for (e, v) in rep.mu.iter().zip(&rep.verdicts) {
            table.push(vec![
                fmt_f64(p),
                phase.as_str().unwrap_or_default().to_string(),
                fmt_opt(rep.cone.as_ref().map(|c| c.alpha_hat)),
                fmt_opt(rep.cone.as_ref().map(|c| c.theta_minus)),
                fmt_opt(rep.cone.as_ref().map(|c| c.theta_plus)),
                fmt_f64(e.theta),
                fmt_f64(e.mu_hat),
                fmt_f64(e.mu_stderr),
                fmt_f64(v.lower_bound),
                fmt_opt(v.decay_exponent),
                serde_json::to_value(v.expectation).unwrap().as_str().unwrap_or_default().to_string(),
                v.ok.to_string(),
            ]);
        }
        rows.push(json!({
            "p": p,
            "phase": rep.phase,
            "cone": rep.cone,
            "verdicts": rep.verdicts,
            "consistent": rep.consistent,
        }));
    }
    emit(c, "phase-diagram", config(c, None, reps, a), Output {
        stem: "phase_diagram".into(),
        table,
        extra: vec![],
        result: json!({ "p_c_hat": pc, "rows": rows }),
    })?;
    Ok(all_ok)
}

#[derive(Debug, Args, Serialize)]
pub struct ConeArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: usize,
}

pub fn cone(c: &Common, a: &ConeArgs) -> CliResult<bool> {
    let reps = replicates(c, 50);
    let cone = estimate_cone(a.p, a.n, reps, a.margin, c.seed)?;
    let mut table = Table::new(&["p", "n", "alpha_hat", "alpha_stderr", "theta_minus", "theta_plus"]);
    table.push(vec![
        fmt_f64(a.p),
        a.n.to_string(),
        fmt_opt(cone.as_ref().map(|c| c.alpha_hat)),
        fmt_opt(cone.as_ref().map(|c| c.alpha_stderr)),
        fmt_opt(cone.as_ref().map(|c| c.theta_minus)),
        fmt_opt(cone.as_ref().map(|c| c.theta_plus)),
    ]);
    emit(c, "cone", config(c, None, reps, a), Output {
        stem: "cone".into(),
        table,
        extra: vec![],
        result: json!({ "cone": cone }),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct PcArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    tolerance: f64,
}

pub fn pc_estimate(c: &Common, a: &PcArgs) -> CliResult<bool> {
    let mut cfg = PcConfig::new(a.n, a.tolerance, c.seed);
    if let Some(r) = c.replicates {
        cfg.replicates = r;
    }
    let est = estimate_pc(&cfg)?;
    let mut table = Table::new(&["p", "n", "positive", "replicates", "drift"]);
    for s in &est.steps {
        table.push(vec![
            fmt_f64(s.p),
            s.n.to_string(),
            s.positive.to_string(),
            s.replicates.to_string(),
            serde_json::to_value(s.drift).unwrap().as_str().unwrap_or_default().to_string(),
        ]);
    }
    emit(c, "pc-estimate", config(c, None, cfg.replicates, a), Output {
        stem: "pc_estimate".into(),
        table,
        extra: vec![],
        result: serde_json::to_value(&est).unwrap(),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct RightEdgeArgs {
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: usize,
}

pub fn right_edge(c: &Common, a: &RightEdgeArgs) -> CliResult<bool> {
    let reps = replicates(c, 10);
    let traces = (0..reps as u64)
        .into_par_iter()
        .map(|rep| right_edge_trace(a.p, a.n, a.margin, c.seed, rep))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["replicate", "k", "r_k"]);
    for t in &traces {
        for (k, r) in t.r.iter().enumerate() {
            let v = match r {
                RightEdge::Finite(v) => v.to_string(),
                RightEdge::NegInfinity => "-inf".into(),
            };
            table.push(vec![t.replicate.to_string(), (k + 1).to_string(), v]);
        }
    }
    let finals: Vec<Option<i64>> = traces.iter().map(|t| t.last().finite()).collect();
    emit(c, "right-edge", config(c, None, reps, a), Output {
        stem: "right_edge".into(),
        table,
        extra: vec![],
        result: json!({ "p": a.p, "n": a.n, "final": finals }),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    #[arg(long)]
    p: f64,
    /// Sizes at or above this are recorded as exceeded.
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
}

pub fn cluster_tail(c: &Common, a: &ClusterArgs) -> CliResult<bool> {
    let reps = replicates(c, 100_000);
    let sizes = (0..reps as u64)
        .into_par_iter()
        .map(|rep| cluster_size(a.p, a.cap, c.seed, rep))
        .collect::<Result<Vec<_>, _>>()?;
    let exceeded = sizes.iter().filter(|s| **s == ClusterSize::Exceeded).count();
    let mut table = Table::new(&["k", "survival"]);
    let mut k = 1u64;
    while k < a.cap {
        let n = sizes
            .iter()
            .filter(|s| match s {
                ClusterSize::Finite(v) => *v >= k,
                ClusterSize::Exceeded => true,
            })
            .count();
        table.push(vec![k.to_string(), fmt_f64(n as f64 / reps as f64)]);
        k *= 2;
    }
    emit(c, "cluster-tail", config(c, None, reps, a), Output {
        stem: "cluster_tail".into(),
        table,
        extra: vec![],
        result: json!({ "p": a.p, "replicates": reps, "exceeded": exceeded }),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct ShapeArgs {
    /// Passage-time level of the shape.
    #[arg(long)]
    t: f64,
    #[arg(long, value_delimiter = ',')]
    thetas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 512)]
    window: usize,
}

pub fn shape(c: &Common, a: &ShapeArgs) -> CliResult<bool> {
    let (d, dv) = load_dist(c)?;
    let reps = replicates(c, 10);
    let thetas = a.thetas.clone().unwrap_or_else(default_theta_grid);
    let grid = GridSpec::new(a.window, a.window)?;
    let radii = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let pf = compute_passage(&generate_field(grid, &d, c.seed, rep));
            thetas
                .iter()
                .map(|&th| shape_boundary_radius(&pf, a.t, th))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["replicate", "theta", "rho"]);
    for (rep, row) in radii.iter().enumerate() {
        for (th, rho) in thetas.iter().zip(row) {
            table.push(vec![rep.to_string(), fmt_f64(*th), fmt_f64(*rho)]);
        }
    }
    let means: Vec<Value> = thetas
        .iter()
        .enumerate()
        .map(|(i, th)| {
            let m = radii.iter().map(|r| r[i]).sum::<f64>() / reps as f64;
            json!({ "theta": th, "mean_rho": m, "mean_rho_over_t": m / a.t })
        })
        .collect();
    emit(c, "shape", config(c, Some(&dv), reps, a), Output {
        stem: "shape".into(),
        table,
        extra: vec![],
        result: json!({ "directions": means }),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct GrowthArgs {
    #[arg(long)]
    n: usize,
    /// Use first passage with exponential edge clocks instead of the growth chain.
    #[arg(long)]
    fpp: bool,
}

pub fn growth(c: &Common, a: &GrowthArgs) -> CliResult<bool> {
    if a.n == 0 {
        return Err(CliError::Config("field `n` must be at least 1".into()));
    }
    let reps = replicates(c, 1000);
    let shapes = if a.fpp {
        simulate_fpp_growth(a.n, reps, c.seed)?
    } else {
        simulate_growth(a.n, reps, c.seed)
    };
    let h = OccupancyHistogram::from_shapes(a.n, shapes.iter().map(|s| s.as_slice()));
    let mut table = Table::new(&["x", "y", "frequency", "n", "replicates"]);
    for (x, y, f) in h.rows() {
        table.push(vec![x.to_string(), y.to_string(), fmt_f64(f), a.n.to_string(), reps.to_string()]);
    }
    let mut trajectory = Table::new(&["step", "x", "y"]);
    if let Some(first) = shapes.first() {
        for (i, (x, y)) in first.iter().enumerate() {
            trajectory.push(vec![(i + 1).to_string(), x.to_string(), y.to_string()]);
        }
    }
    emit(c, "growth", config(c, None, reps, a), Output {
        stem: "growth_occupancy".into(),
        table,
        extra: vec![("growth_trajectory".into(), trajectory)],
        result: json!({ "n": a.n, "replicates": reps, "fpp": a.fpp, "distinct_cells": h.rows().len() }),
    })?;
    Ok(true)
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// One of subcritical, critical, supercritical, structure, coupling, growth, oriented.
    #[arg(required_unless_present = "compare")]
    suite: Option<String>,
    /// Compare two result files byte for byte instead of running a suite.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    compare: Option<Vec<PathBuf>>,
}

pub fn verify(c: &Common, a: &VerifyArgs) -> CliResult<bool> {
    if let Some(files) = &a.compare {
        let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())));
        let same = compare_outputs(&read(&files[0])?, &read(&files[1])?)?;
        println!("{}", if same { "identical" } else { "different" });
        return Ok(same);
    }
    let suite: Suite = a.suite.as_deref().unwrap_or_default().parse()?;
    let out = run_suite(suite, &SuiteConfig { master_seed: c.seed })?;
    for v in &out.verdicts {
        eprintln!(
            "criterion {:>2} {:<30} {}  {}",
            v.criterion,
            v.check,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    let cfg = SuiteConfig { master_seed: c.seed };
    let files = out.files(&cfg)?;
    if let Some(dir) = &c.out {
        for (name, text) in &files {
            write_file(dir, name, text)?;
        }
    }
    let shown = match c.format {
        Format::Csv => &files[0].1,
        Format::Json => &files[1].1,
    };
    print!("{shown}");
    Ok(out.passed())
}
