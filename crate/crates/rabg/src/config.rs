//! key=value config files that can stand in for command-line flags.
//! Flags given on the command line always win over file values.

use std::collections::BTreeMap;
use std::path::Path;

/// Parses a config file of `key=value` lines. Blank lines and lines
/// starting with `#` are ignored; anything else without `=` is an error.
pub fn load(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value: {raw}", lineno + 1))?;
        map.insert(String::from(key.trim()), String::from(value.trim()));
    }
    Ok(map)
}
