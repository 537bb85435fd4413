use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A rectangular numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl OutputTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_real(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub subcommand: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Where a run's results go, plus what the manifest needs to know.
pub struct RunContext {
    pub subcommand: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
    pub out: Option<PathBuf>,
    started_at: String,
}

impl RunContext {
    pub fn new(subcommand: &str, out: Option<PathBuf>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            seed: None,
            params: BTreeMap::new(),
            out,
            started_at: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Writes the table to `--out` (then the manifest) or to standard output.
    pub fn emit(&self, table: &OutputTable) -> std::io::Result<()> {
        let csv = table.to_csv();
        let Some(out) = &self.out else {
            return std::io::stdout().write_all(csv.as_bytes());
        };
        fs::write(out, csv.as_bytes())?;
        let manifest = RunManifest {
            command_line: std::env::args().collect(),
            subcommand: self.subcommand.clone(),
            seed: self.seed,
            params: self.params.clone(),
            started_at: self.started_at.clone(),
            finished_at: chrono::Utc::now().to_rfc3339(),
            outputs: vec![OutputDigest {
                path: out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                sha256: sha256_hex(csv.as_bytes()),
            }],
        };
        let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        fs::write(manifest_path(out), json)
    }
}

/// Parses a CSV written by [`OutputTable::to_csv`].
pub fn read_table(text: &str) -> Result<OutputTable, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("empty file")?;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != columns.len() {
            return Err(format!("row {} has {} cells, header has {}", i + 1, row.len(), columns.len()));
        }
        rows.push(row);
    }
    Ok(OutputTable { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut t = OutputTable::new(["a", "b"]);
        t.push(vec![0.1, -3.0e-20]);
        t.push(vec![f64::NAN, 1.0 / 3.0]);
        let back = read_table(&t.to_csv()).unwrap();
        assert_eq!(back.rows[0], t.rows[0]);
        assert!(back.rows[1][0].is_nan());
        assert_eq!(back.rows[1][1], 1.0 / 3.0);
    }

    #[test]
    fn ragged_rejected() {
        assert!(read_table("a,b\n1,2\n3\n").is_err());
    }

    #[test]
    fn manifest_name() {
        assert_eq!(manifest_path(Path::new("/tmp/x/gap.csv")), PathBuf::from("/tmp/x/gap.csv.manifest.json"));
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
