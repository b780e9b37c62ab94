//! Flat `key = value` configuration merged with command-line flags.
//!
//! Blank lines and lines starting with `#` are skipped. `[section]` headers are
//! accepted for readability but do not namespace the keys.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::args::Cli;
use crate::{CliError, CliResult};

/// Keys accepted in a configuration file.
pub const KEYS: [&str; 24] = [
    "model",
    "a",
    "b",
    "R",
    "cv",
    "T",
    "p",
    "tr",
    "step",
    "builtin",
    "nu",
    "n0",
    "species",
    "mu",
    "omega",
    "moles",
    "components",
    "margules",
    "range",
    "samples",
    "seed",
    "out",
    "only",
    "json",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn from_pairs<I, K, V>(pairs: I) -> CliResult<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut s = Settings::default();
        for (k, v) in pairs {
            s.set(k.into(), v.into())?;
        }
        Ok(s)
    }

    fn set(&mut self, key: String, value: String) -> CliResult<()> {
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown setting {key:?}")));
        }
        self.values.insert(key, value);
        Ok(())
    }

    pub fn parse_file(text: &str) -> CliResult<Self> {
        let mut s = Settings::default();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty()
                || line.starts_with('#')
                || (line.starts_with('[') && line.ends_with(']'))
            {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected `key = value`, found {raw:?}",
                    number + 1
                )));
            };
            s.set(k.trim().to_string(), v.trim().to_string())?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse_file(&text)
    }

    /// File entries first, then flags on top.
    pub fn resolve(cli: &Cli) -> CliResult<Self> {
        let mut s = match &cli.config {
            Some(path) => Self::load(path)?,
            None => Settings::default(),
        };
        for (k, v) in cli.command.options().pairs() {
            s.set(k.to_string(), v)?;
        }
        Ok(s)
    }

    pub fn with(mut self, key: &str, value: &str) -> CliResult<Self> {
        self.set(key.to_string(), value.to_string())?;
        Ok(self)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.get_str(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Config(format!("cannot parse {key} = {v:?}")))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        self.get_or(key, false)
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>> {
        self.get_str(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse::<T>().map_err(|_| {
                            CliError::Config(format!("cannot parse element {x:?} of {key}"))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    /// `lo:hi` with `lo < hi`.
    pub fn range(&self, key: &str) -> CliResult<Option<(f64, f64)>> {
        let Some(v) = self.get_str(key) else {
            return Ok(None);
        };
        let bad = || {
            CliError::Config(format!(
                "{key} must look like lo:hi with lo < hi, found {v:?}"
            ))
        };
        let (lo, hi) = v.split_once(':').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(Some((lo, hi)))
    }

    /// Sample count, at least 2.
    pub fn samples(&self, default: usize) -> CliResult<usize> {
        let n = self.get_or("samples", default)?;
        if n < 2 {
            return Err(CliError::Config(format!("samples must be ≥ 2, found {n}")));
        }
        Ok(n)
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect()
}
