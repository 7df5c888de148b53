//! Optional TOML defaults for command-line options.
//!
//! Keys are option names without the leading dashes (`tree-size = 63`);
//! underscores are accepted in place of hyphens.

use std::path::{Path, PathBuf};

use toml::{Table, Value};

#[derive(Debug, Default)]
pub struct Config {
    table: Table,
    origin: String,
}

pub trait FromToml: Sized {
    fn from_toml(v: &Value) -> Option<Self>;
    const EXPECTED: &'static str;
}

impl FromToml for usize {
    const EXPECTED: &'static str = "a non-negative integer";
    fn from_toml(v: &Value) -> Option<Self> {
        v.as_integer().and_then(|i| usize::try_from(i).ok())
    }
}

impl FromToml for u64 {
    const EXPECTED: &'static str = "a non-negative integer";
    fn from_toml(v: &Value) -> Option<Self> {
        v.as_integer().and_then(|i| u64::try_from(i).ok())
    }
}

impl FromToml for f64 {
    const EXPECTED: &'static str = "a number";
    fn from_toml(v: &Value) -> Option<Self> {
        v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
    }
}

impl FromToml for String {
    const EXPECTED: &'static str = "a string";
    fn from_toml(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => Some(s.clone()),
            Value::Integer(i) => Some(i.to_string()),
            _ => None,
        }
    }
}

impl FromToml for PathBuf {
    const EXPECTED: &'static str = "a path string";
    fn from_toml(v: &Value) -> Option<Self> {
        v.as_str().map(PathBuf::from)
    }
}

impl FromToml for Vec<f64> {
    const EXPECTED: &'static str = "an array of numbers";
    fn from_toml(v: &Value) -> Option<Self> {
        v.as_array()?.iter().map(f64::from_toml).collect()
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let table: Table = text
            .parse()
            .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        Ok(Config {
            table,
            origin: path.display().to_string(),
        })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.table
            .get(key)
            .or_else(|| self.table.get(&key.replace('-', "_")))
    }

    /// `flag` if given, else the config value under `key`.
    pub fn pick<T: FromToml>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, String> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(v) => T::from_toml(v)
                .map(Some)
                .ok_or_else(|| format!("`{key}` in {} must be {}", self.origin, T::EXPECTED)),
        }
    }
}
