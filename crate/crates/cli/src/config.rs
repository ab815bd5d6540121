//! Plain `key=value` config files. Lines starting with `#` (after optional
//! leading whitespace) and blank lines are ignored. Keys mirror the long
//! flag names with `-` replaced by `_`. Flags take precedence over config
//! entries, which take precedence over built-in defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Every key a config file may set. Unknown keys are rejected so typos
/// surface instead of silently falling back to defaults.
const KNOWN_KEYS: &[&str] = &[
    "out", "format", "tol", "seed", "family", "r", "eta", "phi", "eta1", "eta2", "phi1", "phi2",
    "grid", "x_max", "t_max", "c", "route", "case", "kind", "filter", "potential", "a", "eps",
    "l", "e_min", "e_max", "n", "spacing",
];

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: HashMap<String, String>,
}

pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::usage("ConfigUnreadable", format!("{}: {e}", path.display()))
    })?;
    let mut entries = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(
                "ConfigSyntax",
                format!("{}:{}: expected key=value, got '{line}'", path.display(), lineno + 1),
            ));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(CliError::usage(
                "ConfigUnknownKey",
                format!("{}:{}: unknown key '{key}'", path.display(), lineno + 1),
            ));
        }
        entries.insert(key, value.trim().to_string());
    }
    Ok(Config { entries })
}

impl Config {
    /// Raw string lookup.
    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    /// Typed lookup; a present-but-unparsable value is a usage error.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(text) => text.parse::<T>().map(Some).map_err(|_| {
                CliError::usage(
                    "ConfigBadValue",
                    format!("config key '{key}': cannot parse '{text}'"),
                )
            }),
        }
    }
}

/// `flag.or(config)` with typed config parsing.
pub fn merge<T: FromStr>(
    flag: Option<T>,
    cfg: &Config,
    key: &str,
) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}
