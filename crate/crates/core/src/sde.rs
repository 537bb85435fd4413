//! Finite-N Dyson Brownian motion and its static and path scalings.
//!
//! Particles follow
//!
//! ```text
//! dX_j = dB_j + (β/2) Σ_{k≠j} dt / (X_j - X_k)              (free)
//! dX_j = dB_j - X_j dt / (2N) + (β/2) Σ_{k≠j} dt / (X_j - X_k)  (ou)
//! ```
//!
//! At β = 2 the OU system is reversible for the bulk-scaled unitary
//! ensemble, whose empirical law of `x / N` is close to the semicircle.
//! Time stepping is Euler–Maruyama; a proposal that would reorder the
//! particles is thrown away and the step is redone as two half steps with
//! fresh noise.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{replica_stream, StreamRng};

/// Maximum number of successive halvings of a single step.
pub const MAX_HALVINGS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftKind {
    Free,
    Ou,
}

impl std::str::FromStr for DriftKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Self::Free),
            "ou" => Ok(Self::Ou),
            other => Err(Error::InvalidArgument(format!("unknown drift kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystemState {
    positions: Vec<f64>,
    pub time: f64,
    pub beta: f64,
    pub drift_kind: DriftKind,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite()) && xs.windows(2).all(|w| w[0] < w[1])
}

fn smallest_gap(xs: &[f64]) -> f64 {
    xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

impl ParticleSystemState {
    pub fn new(positions: Vec<f64>, beta: f64, drift_kind: DriftKind) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 particles, got {}", positions.len())));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        if !strictly_increasing(&positions) {
            return Err(Error::Domain("positions must be finite and strictly increasing".into()));
        }
        Ok(Self { positions, time: 0.0, beta, drift_kind })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }
}

fn drift_at(positions: &[f64], beta: f64, kind: DriftKind) -> Result<Vec<f64>> {
    let n = positions.len();
    let strength = 0.5 * beta;
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = positions[i] - positions[j];
            if d == 0.0 {
                return Err(Error::Singularity { index: j, position: positions[j] });
            }
            let f = strength / d;
            out[i] += f;
            out[j] -= f;
        }
    }
    if kind == DriftKind::Ou {
        let k = 0.5 / n as f64;
        for (o, x) in out.iter_mut().zip(positions) {
            *o -= k * x;
        }
    }
    Ok(out)
}

/// Drift vector of the state: pair repulsion plus the OU confinement if selected.
pub fn drift(state: &ParticleSystemState) -> Result<Vec<f64>> {
    drift_at(&state.positions, state.beta, state.drift_kind)
}

fn draw_noise<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Counts how often a step had to be subdivided.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub halvings: u64,
    pub smallest_dt: f64,
}

fn advance<R: Rng + ?Sized>(
    positions: &[f64],
    state: &ParticleSystemState,
    dt: f64,
    noise: &[f64],
    rng: &mut R,
    depth: u32,
    stats: &mut StepStats,
) -> Result<Vec<f64>> {
    let b = drift_at(positions, state.beta, state.drift_kind)?;
    let sq = dt.sqrt();
    let proposal: Vec<f64> = positions.iter().zip(&b).zip(noise).map(|((x, d), z)| x + d * dt + sq * z).collect();
    if strictly_increasing(&proposal) {
        if stats.smallest_dt == 0.0 || dt < stats.smallest_dt {
            stats.smallest_dt = dt;
        }
        return Ok(proposal);
    }
    if depth >= MAX_HALVINGS {
        return Err(Error::Stiffness { time: state.time, gap: smallest_gap(positions), halvings: depth });
    }
    stats.halvings += 1;
    let half = 0.5 * dt;
    let first = draw_noise(rng, positions.len());
    let mid = advance(positions, state, half, &first, rng, depth + 1, stats)?;
    let second = draw_noise(rng, positions.len());
    advance(&mid, state, half, &second, rng, depth + 1, stats)
}

/// One Euler–Maruyama step of length `dt` driven by the standard normals
/// `noise`. Sub-steps after a rejected proposal draw their noise from `rng`.
pub fn step<R: Rng + ?Sized>(
    state: &ParticleSystemState,
    dt: f64,
    noise: &[f64],
    rng: &mut R,
) -> Result<ParticleSystemState> {
    step_with_stats(state, dt, noise, rng, &mut StepStats::default())
}

pub fn step_with_stats<R: Rng + ?Sized>(
    state: &ParticleSystemState,
    dt: f64,
    noise: &[f64],
    rng: &mut R,
    stats: &mut StepStats,
) -> Result<ParticleSystemState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if noise.len() != state.n() {
        return Err(Error::InvalidArgument(format!("{} noise values for {} particles", noise.len(), state.n())));
    }
    let positions = advance(&state.positions, state, dt, noise, rng, 0, stats)?;
    Ok(ParticleSystemState { positions, time: state.time + dt, beta: state.beta, drift_kind: state.drift_kind })
}

/// Sampled path of a particle system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub seed: u64,
    pub beta: f64,
    pub dt: f64,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `x_j = N sqrt(β/2) q_j` with `q_j` the `j/(N+1)` semicircle quantile.
    SemicircleQuantiles,
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub n: usize,
    pub beta: f64,
    pub drift_kind: DriftKind,
    pub t_end: f64,
    pub dt: f64,
    pub seed: u64,
    pub init: InitialCondition,
    /// Record every `record_every`-th step (the last step is always kept).
    pub record_every: usize,
}

impl SimulationConfig {
    pub fn new(n: usize, drift_kind: DriftKind, t_end: f64, seed: u64) -> Self {
        Self {
            n,
            beta: 2.0,
            drift_kind,
            t_end,
            dt: default_dt(2.0),
            seed,
            init: InitialCondition::SemicircleQuantiles,
            record_every: 1,
        }
    }
}

/// Bulk spacing of the stationary OU system, `π sqrt(β/2)`.
pub fn bulk_spacing(beta: f64) -> f64 {
    PI * (0.5 * beta).sqrt()
}

/// `1e-3 * spacing²`.
pub fn default_dt(beta: f64) -> f64 {
    1e-3 * bulk_spacing(beta).powi(2)
}

pub fn initial_positions(n: usize, beta: f64, init: &InitialCondition) -> Result<Vec<f64>> {
    match init {
        InitialCondition::SemicircleQuantiles => {
            let scale = n as f64 * (0.5 * beta).sqrt();
            Ok((1..=n).map(|j| scale * semicircle_quantile(j as f64 / (n as f64 + 1.0))).collect())
        }
        InitialCondition::Custom(x) if x.len() == n => Ok(x.clone()),
        InitialCondition::Custom(x) => {
            Err(Error::InvalidArgument(format!("custom initial condition has {} points, expected {n}", x.len())))
        }
    }
}

/// Runs one trajectory on the stream of replica 0.
pub fn simulate(config: &SimulationConfig) -> Result<Trajectory> {
    simulate_replica(config, 0)
}

/// Runs one trajectory on the stream `(config.seed, replica)`.
pub fn simulate_replica(config: &SimulationConfig, replica: u64) -> Result<Trajectory> {
    let mut rng = replica_stream(config.seed, replica);
    simulate_with_rng(config, &mut rng)
}

fn simulate_with_rng(config: &SimulationConfig, rng: &mut StreamRng) -> Result<Trajectory> {
    if !(config.t_end > 0.0) || !(config.dt > 0.0) || config.record_every == 0 {
        return Err(Error::InvalidArgument(format!(
            "need positive T, dt and record interval (T = {}, dt = {}, every = {})",
            config.t_end, config.dt, config.record_every
        )));
    }
    let positions = initial_positions(config.n, config.beta, &config.init)?;
    let mut state = ParticleSystemState::new(positions, config.beta, config.drift_kind)?;
    let steps = (config.t_end / config.dt).round().max(1.0) as usize;

    let mut times = vec![0.0];
    let mut states = vec![state.positions.clone()];
    let mut stats = StepStats::default();
    for i in 1..=steps {
        let noise = draw_noise(rng, config.n);
        state = step_with_stats(&state, config.dt, &noise, rng, &mut stats)?;
        // recompute from the index so grid times carry no accumulated rounding
        state.time = i as f64 * config.dt;
        if i % config.record_every == 0 || i == steps {
            times.push(state.time);
            states.push(state.positions.clone());
        }
    }
    Ok(Trajectory { times, states, seed: config.seed, beta: config.beta, dt: config.dt, stats })
}

/// Semicircle density `(1/2π) sqrt(4 - x²)` on `[-2, 2]`.
pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (0.5 * x).asin() / PI
    }
}

/// Inverse of [`semicircle_cdf`] on `(0, 1)` by bisection.
pub fn semicircle_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-2.0, 2.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `sqrt(N) x`.
pub fn bulk_scale_static(x: f64, n: usize) -> f64 {
    (n as f64).sqrt() * x
}

/// `N^{1/6} (x - 2 sqrt(N))`.
pub fn soft_edge_scale_static(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(1.0 / 6.0) * (x - 2.0 * nf.sqrt())
}

/// Which soft-edge path scaling to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathScaling {
    /// For the free system: also removes the deterministic drift `N^{1/3} t - t²/4`.
    Free,
    /// For the OU system.
    Ou,
}

fn lookup_time(times: &[f64], target: f64, interpolate: bool) -> Result<(usize, usize, f64)> {
    let tol = 1e-9 * target.abs().max(1.0);
    let idx = times.partition_point(|&t| t < target - tol);
    if idx < times.len() && (times[idx] - target).abs() <= tol {
        return Ok((idx, idx, 0.0));
    }
    if !interpolate || idx == 0 || idx >= times.len() {
        return Err(Error::OffGrid(target));
    }
    let (t0, t1) = (times[idx - 1], times[idx]);
    Ok((idx - 1, idx, (target - t0) / (t1 - t0)))
}

/// Soft-edge rescaling `Y(t) = N^{-1/3} X(N^{2/3} t) - 2 N^{2/3} [- N^{1/3} t + t²/4]`.
///
/// With `times = None` every recorded sample is mapped. Otherwise each
/// requested scaled time must sit on the grid, unless `interpolate` allows
/// linear interpolation between neighbouring samples.
pub fn soft_edge_path_scale(
    traj: &Trajectory,
    variant: PathScaling,
    times: Option<&[f64]>,
    interpolate: bool,
) -> Result<Trajectory> {
    let nf = traj.n() as f64;
    let time_scale = nf.powf(2.0 / 3.0);
    let space = nf.powf(-1.0 / 3.0);
    let shift = 2.0 * time_scale;
    let requested: Vec<f64> = match times {
        Some(t) => t.to_vec(),
        None => traj.times.iter().map(|t| t / time_scale).collect(),
    };
    let mut states = Vec::with_capacity(requested.len());
    for &t in &requested {
        let (i0, i1, w) = lookup_time(&traj.times, t * time_scale, interpolate)?;
        let extra = match variant {
            PathScaling::Free => nf.powf(1.0 / 3.0) * t - 0.25 * t * t,
            PathScaling::Ou => 0.0,
        };
        let row = traj.states[i0]
            .iter()
            .zip(&traj.states[i1])
            .map(|(a, b)| space * ((1.0 - w) * a + w * b) - shift - extra)
            .collect();
        states.push(row);
    }
    Ok(Trajectory { times: requested, states, seed: traj.seed, beta: traj.beta, dt: traj.dt / time_scale, stats: traj.stats })
}
