use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use rmtlab_core::configspace::{
    core_approximation_report, Configuration, ConfigurationSampler, LocalFunction, PoissonSampler, SnapshotSampler,
    TestFunction, Window,
};
use rmtlab_core::fredholm::{gap_probability_sine, generating_functional, tracy_widom_cdf, TestFunctionBlock};
use rmtlab_core::isde::{drift_convergence, DriftField};
use rmtlab_core::kernels::{KernelSpec, DEFAULT_PANEL_ORDER};
use rmtlab_core::rng::run_replicas;
use rmtlab_core::sde::{
    self, default_dt, semicircle_cdf, simulate_replica, soft_edge_path_scale, DriftKind, PathScaling,
    SimulationConfig,
};
use rmtlab_core::stats::ks_distance;

use crate::output::{read_table, OutputTable, RunContext};
use crate::Common;

pub type CmdResult = Result<ExitCode, Box<dyn Error>>;

pub const SEED_ENV: &str = "RMT_LAB_SEED";

pub fn resolve_seed(flag: Option<u64>) -> Result<u64, Box<dyn Error>> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|e| format!("{SEED_ENV}={v}: {e}").into()),
        Err(_) => Ok(0),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|e| format!("'{t}': {e}"))).collect()
}

fn list_f64(s: &str) -> Result<Vec<f64>, String> {
    parse_list(s)
}

fn pair_f64(s: &str) -> Result<(f64, f64), String> {
    match list_f64(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two comma-separated numbers, got '{s}'")),
    }
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// free or ou.
    #[arg(long, default_value = "ou")]
    pub drift: DriftKind,
    /// Final time.
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_end: f64,
    /// Step size; defaults to 1e-3 times the squared bulk spacing.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every k-th step.
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn simulate(a: SimulateArgs) -> CmdResult {
    let seed = resolve_seed(a.common.seed)?;
    let mut cfg = SimulationConfig::new(a.n, a.drift, a.t_end, seed);
    cfg.beta = a.beta;
    cfg.dt = a.dt.unwrap_or_else(|| default_dt(a.beta));
    cfg.record_every = a.record_every;
    let traj = sde::simulate(&cfg)?;
    let mut table = OutputTable::new(std::iter::once("time".to_string()).chain((1..=a.n).map(|j| format!("x{j}"))));
    for (t, x) in traj.times.iter().zip(&traj.states) {
        table.push(std::iter::once(*t).chain(x.iter().copied()).collect());
    }
    let mut ctx = RunContext::new("simulate", a.common.out);
    ctx.seed = Some(seed);
    ctx.param("n", a.n).param("beta", a.beta).param("drift", format!("{:?}", a.drift).to_lowercase());
    ctx.param("T", a.t_end).param("dt", cfg.dt).param("record-every", a.record_every);
    ctx.emit(&table)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct GapArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 40)]
    pub order: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn gap_table(s: f64, order: usize) -> Result<OutputTable, Box<dyn Error>> {
    let v = gap_probability_sine(s, order)?;
    let mut table = OutputTable::new(["s", "order", "value", "error_estimate"]);
    table.push(vec![s, order as f64, v.value, v.error_estimate]);
    Ok(table)
}

pub fn gap(a: GapArgs) -> CmdResult {
    let table = gap_table(a.s, a.order)?;
    let mut ctx = RunContext::new("gap", a.common.out);
    ctx.param("s", a.s).param("order", a.order);
    ctx.emit(&table)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct TwArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 40)]
    pub order: usize,
    /// Upper end of the truncated half-line; defaults to s + 16.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

pub fn tw_table(s: f64, order: usize, cutoff: Option<f64>) -> Result<OutputTable, Box<dyn Error>> {
    let v = tracy_widom_cdf(s, order, cutoff)?;
    let mut table = OutputTable::new(["s", "order", "value", "error_estimate"]);
    table.push(vec![s, order as f64, v.value, v.error_estimate]);
    Ok(table)
}

pub fn tw(a: TwArgs) -> CmdResult {
    let table = tw_table(a.s, a.order, a.cutoff)?;
    let mut ctx = RunContext::new("tw", a.common.out);
    ctx.param("s", a.s).param("order", a.order);
    if let Some(c) = a.cutoff {
        ctx.param("cutoff", c);
    }
    ctx.emit(&table)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct GenfunArgs {
    /// sine or airy.
    #[arg(long, default_value = "sine")]
    pub kernel: String,
    /// Comma-separated non-decreasing times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    /// Support interval `a,b` shared by every time.
    #[arg(long, value_parser = pair_f64)]
    pub support: (f64, f64),
    /// Constant value of χ at each time.
    #[arg(long, value_delimiter = ',', required = true)]
    pub chi: Vec<f64>,
    #[arg(long, default_value_t = 24)]
    pub order: usize,
    #[arg(long, default_value_t = DEFAULT_PANEL_ORDER)]
    pub panel_order: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn genfun(a: GenfunArgs) -> CmdResult {
    let kernel = match a.kernel.as_str() {
        "sine" | "sin" => KernelSpec::extended_sine(a.panel_order)?,
        "airy" => KernelSpec::extended_airy(a.panel_order)?,
        other => return Err(format!("unknown kernel '{other}', expected sine or airy").into()),
    };
    let times = a.times;
    let chi = a.chi;
    if times.len() != chi.len() {
        return Err(format!("{} times but {} chi values", times.len(), chi.len()).into());
    }
    let block = TestFunctionBlock::constant(times.clone(), a.support, &chi)?;
    let v = generating_functional(&kernel, &block, a.order)?;
    let m = times.len();
    let header = ["order", "a", "b"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..=m).map(|i| format!("t{i}")))
        .chain((1..=m).map(|i| format!("chi{i}")))
        .chain(["value".to_string(), "error_estimate".to_string()]);
    let mut table = OutputTable::new(header);
    let mut row = vec![a.order as f64, a.support.0, a.support.1];
    row.extend(&times);
    row.extend(&chi);
    row.extend([v.value, v.error_estimate]);
    table.push(row);
    let mut ctx = RunContext::new("genfun", a.common.out);
    ctx.param("kernel", &a.kernel).param("order", a.order).param("panel-order", a.panel_order);
    ctx.param("times", join(&times)).param("chi", join(&chi)).param("support", join(&[a.support.0, a.support.1]));
    ctx.emit(&table)?;
    Ok(ExitCode::SUCCESS)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Args)]
pub struct SemicircleArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Number of steps.
    #[arg(long, default_value_t = 200_000)]
    pub steps: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep a snapshot every k steps.
    #[arg(long, default_value_t = 100)]
    pub record_every: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Pooled `x/(N sqrt(β/2))` from the second half of an OU run.
pub fn semicircle_samples(n: usize, beta: f64, steps: usize, dt: f64, every: usize, seed: u64) -> Result<Vec<f64>, Box<dyn Error>> {
    let mut cfg = SimulationConfig::new(n, DriftKind::Ou, steps as f64 * dt, seed);
    cfg.beta = beta;
    cfg.dt = dt;
    cfg.record_every = every;
    let traj = sde::simulate(&cfg)?;
    let half = traj.times.len() / 2;
    let scale = n as f64 * (0.5 * beta).sqrt();
    Ok(traj.states[half..].iter().flatten().map(|x| x / scale).collect())
}

pub fn semicircle_check(a: SemicircleArgs) -> CmdResult {
    let seed = resolve_seed(a.common.seed)?;
    let dt = a.dt.unwrap_or_else(|| default_dt(a.beta));
    let xs = semicircle_samples(a.n, a.beta, a.steps, dt, a.record_every, seed)?;
    let ks = ks_distance(&xs, semicircle_cdf);
    let mut table = OutputTable::new(["n", "beta", "steps", "dt", "samples", "ks"]);
    table.push(vec![a.n as f64, a.beta, a.steps as f64, dt, xs.len() as f64, ks]);
    let mut ctx = RunContext::new("semicircle-check", a.common.out);
    ctx.seed = Some(seed);
    ctx.param("n", a.n).param("beta", a.beta).param("steps", a.steps).param("dt", dt);
    ctx.param("record-every", a.record_every);
    ctx.emit(&table)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct SoftEdgeArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    /// Burn-in time before the maximum is read.
    #[arg(long, default_value_t = 100.0)]
    pub burn_in: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 40)]
    pub order: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Soft-edge-scaled largest particle at the end of independent OU runs.
pub fn soft_edge_maxima(n: usize, runs: usize, burn_in: f64, dt: f64, seed: u64) -> Result<Vec<f64>, Box<dyn Error>> {
    let mut cfg = SimulationConfig::new(n, DriftKind::Ou, burn_in, seed);
    cfg.dt = dt;
    cfg.record_every = usize::MAX;
    let maxima = run_replicas(seed, runs, |rep, _| -> Result<f64, String> {
        let traj = simulate_replica(&cfg, rep).map_err(|e| e.to_string())?;
        let scaled = soft_edge_path_scale(&traj, PathScaling::Ou, None, false).map_err(|e| e.to_string())?;
        Ok(scaled.states.last().and_then(|s| s.last().copied()).unwrap_or(f64::NAN))
    });
    Ok(maxima.into_iter().collect::<Result<Vec<_>, _>>()?)
}

pub fn soft_edge_check(a: SoftEdgeArgs) -> CmdResult {
    let seed = resolve_seed(a.common.seed)?;
    let dt = a.dt.unwrap_or_else(|| default_dt(2.0));
    let maxima = soft_edge_maxima(a.n, a.runs, a.burn_in, dt, seed)?;
    let mut failure = None;
    let ks = ks_distance(&maxima, |s| match tracy_widom_cdf(s, a.order, None) {
        Ok(v) => v.value,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    let mut table = OutputTable::new(["n", "runs", "burn_in", "dt", "ks"]);
    table.push(vec![a.n as f64, a.runs as f64, a.burn_in, dt, ks]);
    let mut ctx = RunContext::new("soft-edge-check", a.common.out);
    ctx.seed = Some(seed);
    ctx.param("n", a.n).param("runs", a.runs).param("burn-in", a.burn_in).param("dt", dt).param("order", a.order);
    ctx.emit(&table)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct CoreApproxArgs {
    /// Half-width of the window cube.
    #[arg(long, default_value_t = 1.0)]
    pub window_r: f64,
    /// Truncation orders, paired with --bern-n.
    #[arg(long, value_delimiter = ',', default_value = "2,4")]
    pub m: Vec<usize>,
    /// Bernstein orders, paired with --m.
    #[arg(long, value_delimiter = ',', default_value = "16,64")]
    pub bern_n: Vec<usize>,
    /// poisson:<intensity> or sde-snapshot:<trajectory csv>.
    #[arg(long, default_value = "poisson:2")]
    pub sampler: String,
    /// Half-width of the Poisson sampling box; defaults to window-r + 0.5.
    #[arg(long)]
    pub sampler_half_width: Option<f64>,
    /// quadratic, additive or counting.
    #[arg(long, default_value = "quadratic")]
    pub functional: String,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Rows of a trajectory CSV as one-dimensional configurations.
pub fn load_snapshots(path: &PathBuf) -> Result<Vec<Configuration>, Box<dyn Error>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let table = read_table(&text)?;
    let skip = usize::from(table.columns.first().is_some_and(|c| c == "time"));
    Ok(table.rows.iter().map(|r| Configuration::on_line(&r[skip..])).collect::<Result<Vec<_>, _>>()?)
}

pub fn core_approx(a: CoreApproxArgs) -> CmdResult {
    let seed = resolve_seed(a.common.seed)?;
    let ms = a.m.clone();
    let ns = a.bern_n.clone();
    if ms.len() != ns.len() {
        return Err(format!("--m has {} entries but --bern-n has {}", ms.len(), ns.len()).into());
    }
    let window = Window::new(a.window_r, 1)?;
    let phi = TestFunction::bump(&[0.0], a.window_r, 1.0)?;
    let f = match a.functional.as_str() {
        "quadratic" => LocalFunction::quadratic(window, phi)?,
        "additive" => LocalFunction::additive(window, phi)?,
        "counting" => LocalFunction::counting(window),
        other => return Err(format!("unknown functional '{other}'").into()),
    };
    let sampler: Box<dyn ConfigurationSampler> = match a.sampler.split_once(':') {
        Some(("poisson", lam)) => {
            let lam: f64 = lam.parse().map_err(|e| format!("poisson intensity '{lam}': {e}"))?;
            Box::new(PoissonSampler::new(lam, a.sampler_half_width.unwrap_or(a.window_r + 0.5), 1)?)
        }
        Some(("sde-snapshot", file)) => Box::new(SnapshotSampler::new(load_snapshots(&PathBuf::from(file))?)?),
        _ => return Err(format!("unknown sampler '{}', expected poisson:<λ> or sde-snapshot:<file>", a.sampler).into()),
    };
    let pairs: Vec<(usize, usize)> = ms.iter().copied().zip(ns.iter().copied()).collect();
    let rows = core_approximation_report(&f, None, &pairs, sampler.as_ref(), a.replicas, seed)?;
    let mut table = OutputTable::new(["m", "bern_n", "gap1_est", "gap1_se", "gap2_est", "gap2_se"]);
    for r in rows {
        table.push(vec![r.m as f64, r.bern_n as f64, r.gap1.norm, r.gap1.norm_se, r.gap2.norm, r.gap2.norm_se]);
    }
    let mut ctx = RunContext::new("core-approx", a.common.out);
    ctx.seed = Some(seed);
    ctx.param("window-r", a.window_r).param("m", join(&ms)).param("bern-n", join(&ns));
    ctx.param("sampler", &a.sampler).param("functional", &a.functional).param("replicas", a.replicas);
    ctx.emit(&table)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args)]
pub struct IsdeArgs {
    /// sin or airy.
    #[arg(long)]
    pub field: DriftField,
    /// Trajectory CSV written by `simulate`.
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Row of the trajectory; defaults to the last.
    #[arg(long)]
    pub row: Option<usize>,
    /// Evaluation point after scaling.
    #[arg(long, conflicts_with = "particle")]
    pub x: Option<f64>,
    /// Evaluate at this particle (1-based in the file's columns), excluding it.
    #[arg(long)]
    pub particle: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
    pub radii: Vec<f64>,
    /// none or soft; defaults to soft for airy and none for sin.
    #[arg(long)]
    pub scale: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

pub fn isde_diag(a: IsdeArgs) -> CmdResult {
    let text = fs::read_to_string(&a.snapshot).map_err(|e| format!("{}: {e}", a.snapshot.display()))?;
    let table = read_table(&text)?;
    let skip = usize::from(table.columns.first().is_some_and(|c| c == "time"));
    let row_idx = a.row.unwrap_or(table.rows.len().saturating_sub(1));
    let row = table.rows.get(row_idx).ok_or_else(|| format!("row {row_idx} not in snapshot"))?;
    let raw = &row[skip..];
    let n = raw.len() as f64;
    let scale = a.scale.clone().unwrap_or_else(|| match a.field {
        DriftField::Airy => "soft".into(),
        DriftField::Sine => "none".into(),
    });
    let map = |x: f64| -> Result<f64, String> {
        match scale.as_str() {
            "none" => Ok(x),
            "soft" => Ok(n.powf(-1.0 / 3.0) * x - 2.0 * n.powf(2.0 / 3.0)),
            other => Err(format!("unknown scale '{other}', expected none or soft")),
        }
    };
    let scaled = raw.iter().map(|&x| map(x)).collect::<Result<Vec<_>, _>>()?;
    let xi = Configuration::on_line(&scaled)?;
    let (x, self_index) = match (a.x, a.particle) {
        (Some(x), _) => (x, None),
        (None, Some(j)) => {
            let p = *scaled.get(j.wrapping_sub(1)).ok_or_else(|| format!("particle {j} not in row"))?;
            let idx = xi.points().position(|q| q[0] == p);
            (p, idx)
        }
        (None, None) => return Err("one of --x or --particle is required".into()),
    };
    let radii = a.radii.clone();
    let diag = drift_convergence(x, &xi, &radii, a.field, self_index)?;
    let mut out = OutputTable::new(["radius", "drift", "difference", "cauchy"]);
    for (i, (r, v)) in diag.radii.iter().zip(&diag.values).enumerate() {
        let diff = if i == 0 { f64::NAN } else { diag.differences[i - 1] };
        out.push(vec![*r, *v, diff, f64::from(u8::from(diag.cauchy))]);
    }
    let mut ctx = RunContext::new("isde-diag", a.common.out);
    ctx.param("field", format!("{:?}", a.field).to_lowercase()).param("snapshot", a.snapshot.display());
    ctx.param("row", row_idx).param("x", x).param("radii", join(&radii)).param("scale", &scale);
    ctx.emit(&out)?;
    Ok(ExitCode::SUCCESS)
}
