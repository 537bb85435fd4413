use std::fs;

/// Reads a flat `key = value` file. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Replaces `--config <file>` with the file's entries as flags, skipping any
/// key already given on the command line.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let (path, consumed) = match args[pos].split_once('=') {
        Some((_, p)) => (p.to_string(), 1),
        None => (args.get(pos + 1).cloned().ok_or("--config needs a file")?, 2),
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let entries = parse_config(&text)?;
    let mut rest: Vec<String> = args[..pos].to_vec();
    rest.extend_from_slice(&args[pos + consumed..]);
    let given = |key: &str| {
        let flag = format!("--{key}");
        rest.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let extra: Vec<String> = entries
        .into_iter()
        .filter(|(k, _)| !given(k))
        .flat_map(|(k, v)| [format!("--{k}"), v])
        .collect();
    rest.extend(extra);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let kv = parse_config("# c\ns = 1.5\n\norder=40 # trailing\nwindow_r = 2\n").unwrap();
        assert_eq!(
            kv,
            vec![("s".into(), "1.5".into()), ("order".into(), "40".into()), ("window-r".into(), "2".into())]
        );
        assert!(parse_config("nonsense").is_err());
    }
}
