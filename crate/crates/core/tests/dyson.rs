use std::f64::consts::PI;

use rmtlab_core::configspace::{correlation_estimate, Bins, Configuration};
use rmtlab_core::isde::{drift_convergence, DriftField};
use rmtlab_core::rng::run_replicas;
use rmtlab_core::sde::*;

fn long_ou_run(n: usize, steps: usize, every: usize, seed: u64) -> Trajectory {
    let mut cfg = SimulationConfig::new(n, DriftKind::Ou, 0.0, seed);
    cfg.t_end = steps as f64 * cfg.dt;
    cfg.record_every = every;
    simulate(&cfg).unwrap()
}

fn second_moment(rows: &[Vec<f64>], n: usize) -> f64 {
    let count = (rows.len() * n) as f64;
    rows.iter().flatten().map(|x| (x / n as f64).powi(2)).sum::<f64>() / count
}

#[test]
fn ou_second_moment_is_stationary() {
    let n = 32;
    let traj = long_ou_run(n, 200_000, 50, 11);
    let tail = &traj.states[traj.states.len() / 2..];
    let (a, b) = tail.split_at(tail.len() / 2);
    let (ma, mb) = (second_moment(a, n), second_moment(b, n));
    assert!((ma - mb).abs() / ma < 0.02, "second moment {ma} vs {mb}");
    assert!((mb - 1.0).abs() < 0.05, "semicircle second moment 1, got {mb}");
}

#[test]
fn raw_ou_density_near_origin_is_one_over_pi() {
    let n = 64;
    let traj = long_ou_run(n, 100_000, 100, 5);
    let snaps: Vec<Configuration> = traj.states[traj.states.len() / 2..]
        .iter()
        .map(|row| Configuration::on_line(row).unwrap())
        .collect();
    let est = correlation_estimate(&snaps, 1, Bins::new(-5.0, 5.0, 1).unwrap()).unwrap();
    let rho = est.get(0, 0);
    assert!((rho * PI - 1.0).abs() < 0.05, "rho = {rho}");
}

#[test]
fn airy_drift_settles_on_soft_edge_snapshots() {
    let n = 64;
    let mut cfg = SimulationConfig::new(n, DriftKind::Ou, 100.0, 17);
    cfg.record_every = usize::MAX;
    let radii = [4.0, 8.0, 16.0, 32.0];
    let cauchy: Vec<bool> = run_replicas(17, 50, |rep, _| {
        let traj = simulate_replica(&cfg, rep).unwrap();
        let y = soft_edge_path_scale(&traj, PathScaling::Ou, None, false).unwrap();
        let xi = Configuration::on_line(y.states.last().unwrap()).unwrap();
        let ys = xi.coords();
        let idx = (0..ys.len())
            .min_by(|&i, &j| (ys[i] + 5.0).abs().total_cmp(&(ys[j] + 5.0).abs()))
            .unwrap();
        drift_convergence(ys[idx], &xi, &radii, DriftField::Airy, Some(idx)).unwrap().cauchy
    });
    let hits = cauchy.iter().filter(|&&c| c).count();
    assert!(hits * 5 >= cauchy.len() * 4, "{hits} of {} runs Cauchy", cauchy.len());
}
