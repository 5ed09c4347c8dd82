//! Flat `key = value` run configuration.
//!
//! Layers, lowest precedence first: config file, positional `key=value`
//! overrides, then the `--seed` / `--out` flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

pub const KNOWN_KEYS: &[&str] = &[
    "seed",
    "out",
    "name",
    "method",
    "instance.path",
    "instance.d",
    "instance.n",
    "instance.sigma",
    "model.variant",
    "model.s",
    "model.g",
    "model.C",
    "model.graph_path",
    "graph.edges",
    "graph.rewire",
    "solver.option",
    "solver.step",
    "solver.beta",
    "solver.eta_init",
    "solver.delta",
    "solver.L",
    "solver.max_iters",
    "solver.rel_tol",
    "dmo.variant",
    "dmo.theta",
    "dmo.seed",
    "pgd.step",
    "pgd.alpha",
    "pgd.max_iters",
    "pgd.rel_tol",
    "pgd.seed",
    "trace.wall_clock",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = Config::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = split_pair(line)
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", k + 1)))?;
            if cfg.values.contains_key(key) {
                return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", k + 1)));
            }
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Applies a `key=value` override.
    pub fn apply(&mut self, pair: &str) -> CliResult<()> {
        let (key, value) =
            split_pair(pair).ok_or_else(|| CliError::Config(format!("override `{pair}` is not key=value")))?;
        self.set(key, value)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown config key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("invalid value `{v}` for `{key}`"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    /// The config as a file that reproduces this run.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty()).then_some((k, v))
}
