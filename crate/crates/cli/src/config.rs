//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment, blank lines are skipped. Keys
//! are the long flag names of the subcommand (`eta-up`, `length`, ...);
//! underscores are accepted in place of hyphens. A few settings also take
//! a unit-suffixed spelling (`kappa_o_hz`, `fiber_length_km`,
//! `attenuation_db_per_km`). Every key must be used by
//! the subcommand that reads the file.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Config {
    path: Option<PathBuf>,
    entries: BTreeMap<String, (usize, String)>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))?;
        cfg.path = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {lineno}: expected `key = value`"))?;
            let key = normalize(key);
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(format!("line {lineno}: empty key or value"));
            }
            if let Some((first, _)) = entries.insert(key.clone(), (lineno, value.to_string())) {
                return Err(format!("line {lineno}: '{key}' already set on line {first}"));
            }
        }
        Ok(Self {
            path: None,
            entries,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        let entry = self.entries.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(entry.1.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        let Some(value) = self.raw(key) else {
            return Ok(None);
        };
        value.parse().map(Some).map_err(|_| {
            let line = self.entries[key].0;
            CliError::Usage(format!("{}line {line}: invalid value '{value}' for '{key}'", self.origin()))
        })
    }

    /// `flag`, else the config value, else nothing.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => {
                // still mark the key so an overridden entry is not reported as unknown
                self.raw(key);
                Ok(Some(v))
            }
            None => self.get(key),
        }
    }

    /// Like `pick`, for a setting spelled several ways; at most one spelling
    /// may appear in the file.
    pub fn pick_any<T: FromStr>(&self, flag: Option<T>, keys: &[&str]) -> Result<Option<T>, CliError> {
        let present: Vec<&str> = keys.iter().copied().filter(|k| self.entries.contains_key(*k)).collect();
        if present.len() > 1 {
            return Err(CliError::Usage(format!("{}'{}' are the same setting", self.origin(), present.join("' and '"))));
        }
        match (flag, present.first()) {
            (Some(v), _) => {
                keys.iter().for_each(|k| {
                    self.raw(k);
                });
                Ok(Some(v))
            }
            (None, Some(k)) => self.get(k),
            (None, None) => Ok(None),
        }
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(self.pick(flag.then_some(true), key)?.unwrap_or(false))
    }

    /// Rejects entries that no lookup touched.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        let unknown: Vec<String> = self
            .entries
            .iter()
            .filter(|(k, _)| !used.contains(*k))
            .map(|(k, (line, _))| format!("'{k}' (line {line})"))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!("{}unknown keys {}", self.origin(), unknown.join(", "))))
        }
    }

    fn origin(&self) -> String {
        self.path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default()
    }
}

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

/// Seed precedence: flag, config file, `QTLINK_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, cfg: &Config) -> Result<u64, CliError> {
    if let Some(seed) = cfg.pick(flag, "seed")? {
        return Ok(seed);
    }
    match std::env::var("QTLINK_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("QTLINK_SEED = '{v}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}
