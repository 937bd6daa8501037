//! `key = value` configuration files with the same keys as the long flags.

use std::collections::BTreeMap;
use std::path::Path;

use ggm_core::{Error, Result};

pub const KEYS: [&str; 9] = ["model", "n", "def-order", "u-window", "tensor-cap", "weight-cap", "out", "format", "seed"];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse(format!("line {}: unknown key `{}`", i + 1, key)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = parse("# caps\nmodel = d\nn=3\nu_window = 2 # inline\n\n").unwrap();
        assert_eq!(c["model"], "d");
        assert_eq!(c["n"], "3");
        assert_eq!(c["u-window"], "2");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(parse("colour = red").is_err());
        assert!(parse("n 3").is_err());
    }
}
