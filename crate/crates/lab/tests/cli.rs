use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rmtlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmtlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("RMT_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gap_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = rmtlab(&["gap", "--s", "1.0", "--order", "40"], dir.path());
    let b = rmtlab(&["gap", "--s", "1.0", "--order", "40"], dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let row: Vec<f64> = stdout(&a).lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[2] - 0.684_359_969_604_237).abs() < 1e-12);
}

#[test]
fn tw_deep_tail() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmtlab(&["tw", "--s", "8"], dir.path());
    assert!(o.status.success());
    let value: f64 = stdout(&o).lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(value >= 0.9999);
}

#[test]
fn simulate_is_reproducible_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--n", "4", "--T", "0.05", "--seed", "7", "--record-every", "10"];
    let a = rmtlab(&[&args[..], &["--out", "a.csv"]].concat(), dir.path());
    let b = rmtlab(&[&args[..], &["--out", "b.csv"]].concat(), dir.path());
    assert!(a.status.success() && b.status.success());
    let ta = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(ta, fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time,x1,x2,x3,x4");
    let first = lines.next().unwrap();
    assert!(first.split(',').all(|c| c.contains('e') && c.trim_start_matches('-').split('e').next().unwrap().len() == 18));
    let c = rmtlab(&["simulate", "--n", "4", "--T", "0.05", "--seed", "8", "--record-every", "10"], dir.path());
    assert_ne!(stdout(&c), text);
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rmtlab"));
        cmd.args(["simulate", "--n", "3", "--T", "0.02"]).args(extra).current_dir(dir.path());
        match env {
            Some(v) => cmd.env("RMT_LAB_SEED", v),
            None => cmd.env_remove("RMT_LAB_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("5"), &[]), run(None, &["--seed", "5"]));
    assert_ne!(run(Some("5"), &[]), run(Some("6"), &[]));
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rmtlab(&["gap", "--s", "1", "--nope"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmtlab(&["gap", "--s", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "# gap run\ns = 0.5\norder = 20\n").unwrap();
    let from_cfg = rmtlab(&["gap", "--config", "run.cfg"], dir.path());
    let direct = rmtlab(&["gap", "--s", "0.5", "--order", "20"], dir.path());
    assert_eq!(from_cfg.stdout, direct.stdout);
    let overridden = rmtlab(&["gap", "--config", "run.cfg", "--order", "30"], dir.path());
    assert!(stdout(&overridden).contains("3.0000000000000000e1"));
}

#[test]
fn manifest_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    assert!(rmtlab(&["gap", "--s", "2", "--out", "gap.csv"], dir.path()).status.success());
    let manifest = dir.path().join("gap.csv.manifest.json");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(json["subcommand"], "gap");
    assert_eq!(json["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let ok = rmtlab(&["verify", "gap.csv.manifest.json"], dir.path());
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert!(stdout(&ok).starts_with("PASS"));

    let mut bytes = fs::read(dir.path().join("gap.csv")).unwrap();
    let last = bytes.len() - 2;
    bytes[last] = if bytes[last] == b'1' { b'2' } else { b'1' };
    fs::write(dir.path().join("gap.csv"), bytes).unwrap();
    let bad = rmtlab(&["verify", "gap.csv.manifest.json"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("digest mismatch"));

    fs::remove_file(dir.path().join("gap.csv")).unwrap();
    let missing = rmtlab(&["verify", "gap.csv.manifest.json"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    assert!(stdout(&missing).contains("missing"));
}

#[test]
fn genfun_single_time_matches_gap() {
    let dir = tempfile::tempdir().unwrap();
    let g = rmtlab(&["genfun", "--times", "0", "--support", "0,1", "--chi", "-1", "--order", "24"], dir.path());
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let gap = rmtlab(&["gap", "--s", "1", "--order", "24"], dir.path());
    let value = |o: &Output, col: usize| -> f64 { stdout(o).lines().nth(1).unwrap().split(',').nth(col).unwrap().parse().unwrap() };
    assert!((value(&g, 5) - value(&gap, 2)).abs() < 1e-8);
}

#[test]
fn core_approx_and_isde_diag() {
    let dir = tempfile::tempdir().unwrap();
    let o = rmtlab(
        &["core-approx", "--m", "1", "--bern-n", "8", "--functional", "counting", "--replicas", "50", "--seed", "3"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "m,bern_n,gap1_est,gap1_se,gap2_est,gap2_se");
    let gap1: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(gap1, 0.0);

    assert!(rmtlab(&["simulate", "--n", "16", "--T", "0.5", "--seed", "1", "--out", "traj.csv"], dir.path()).status.success());
    let d = rmtlab(
        &["isde-diag", "--field", "sin", "--snapshot", "traj.csv", "--particle", "8", "--radii", "5,10,20,40"],
        dir.path(),
    );
    assert!(d.status.success(), "{}", String::from_utf8_lossy(&d.stderr));
    let lines: Vec<String> = stdout(&d).lines().map(String::from).collect();
    assert_eq!(lines[0], "radius,drift,difference,cauchy");
    assert_eq!(lines.len(), 5);
}
