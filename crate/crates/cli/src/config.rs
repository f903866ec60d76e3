//! Optional `key = value` defaults file named by `L1LAB_CONFIG`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::failure::{CliResult, Failure};

pub const ENV_VAR: &str = "L1LAB_CONFIG";

const KNOWN: [&str; 9] = ["tol", "jobs", "seed", "trials", "samples", "out", "format", "n", "method"];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn from_env() -> CliResult<Self> {
        match std::env::var_os(ENV_VAR) {
            Some(p) if !p.is_empty() => Config::from_file(Path::new(&p)),
            _ => Ok(Config::default()),
        }
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text).map_err(|m| Failure::usage(format!("{}: {m}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            let k = k.trim().replace('_', "-");
            if !KNOWN.contains(&k.as_str()) {
                log::warn!("config line {}: unknown key {k:?} ignored", no + 1);
                continue;
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| Failure::usage(format!("config key {key} = {v:?}: {e}"))),
        }
    }

    /// Flag value if given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_unknown_keys() {
        let c = Config::parse("# c\n tol = 0.001 # trailing\nbogus = 1\n\nseed=4\n").unwrap();
        assert_eq!(c.get::<f64>("tol").unwrap(), Some(0.001));
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(4));
        assert_eq!(c.get::<u64>("bogus").unwrap(), None);
        assert_eq!(c.pick(Some(7u64), "seed", 0).unwrap(), 7);
        assert_eq!(c.pick(None, "seed", 0u64).unwrap(), 4);
        assert_eq!(c.pick(None, "trials", 50usize).unwrap(), 50);
    }

    #[test]
    fn rejects_malformed() {
        assert!(Config::parse("tol 0.1").is_err());
        let c = Config::parse("seed = x").unwrap();
        assert!(c.get::<u64>("seed").is_err());
    }
}
