use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Args;

use crate::commands::{gap_table, tw_table, CmdResult};
use crate::output::{read_table, sha256_hex, RunManifest};

#[derive(Args)]
pub struct VerifyArgs {
    /// Path to a `<out>.manifest.json`.
    pub manifest: PathBuf,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub subject: String,
    pub passed: bool,
    pub detail: String,
}

fn param<T: std::str::FromStr>(m: &RunManifest, key: &str) -> Option<T> {
    m.params.get(key).and_then(|v| v.parse().ok())
}

/// Reruns the deterministic quadrature subcommands and compares bytes.
fn rerun(m: &RunManifest) -> Option<Result<String, String>> {
    let table = match m.subcommand.as_str() {
        "gap" => gap_table(param(m, "s")?, param(m, "order")?),
        "tw" => tw_table(param(m, "s")?, param(m, "order")?, param(m, "cutoff")),
        _ => return None,
    };
    Some(table.map(|t| t.to_csv()).map_err(|e| e.to_string()))
}

pub fn check_manifest(path: &Path) -> Result<Vec<CheckLine>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut lines = Vec::new();
    if manifest.outputs.is_empty() {
        lines.push(CheckLine { subject: "outputs".into(), passed: false, detail: "manifest lists no outputs".into() });
    }
    for out in &manifest.outputs {
        let file = dir.join(&out.path);
        let line = |passed: bool, detail: String| CheckLine { subject: out.path.clone(), passed, detail };
        let bytes = match fs::read(&file) {
            Ok(b) => b,
            Err(e) => {
                lines.push(line(false, format!("missing: {e}")));
                continue;
            }
        };
        let digest = sha256_hex(&bytes);
        if digest != out.sha256 {
            lines.push(line(false, format!("digest mismatch: recorded {}, found {digest}", out.sha256)));
            continue;
        }
        let text = String::from_utf8_lossy(&bytes);
        if let Err(e) = read_table(&text) {
            lines.push(line(false, format!("malformed table: {e}")));
            continue;
        }
        match rerun(&manifest) {
            Some(Ok(fresh)) if fresh.as_bytes() != bytes.as_slice() => {
                lines.push(line(false, "rerun differs from recorded output".into()))
            }
            Some(Err(e)) => lines.push(line(false, format!("rerun failed: {e}"))),
            Some(Ok(_)) => lines.push(line(true, "digest ok, table ok, rerun identical".into())),
            None => lines.push(line(true, "digest ok, table ok".into())),
        }
    }
    Ok(lines)
}

pub fn run(a: VerifyArgs) -> CmdResult {
    let lines = check_manifest(&a.manifest)?;
    let mut ok = true;
    for l in &lines {
        println!("{} {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.subject, l.detail);
        ok &= l.passed;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
