//! Option resolution: command-line flags, then the `--config` file, then defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command};

use crate::CliError;

/// Where a resolved value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Flag,
    Config,
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    flags: BTreeMap<String, String>,
    config: BTreeMap<String, String>,
}

impl Settings {
    /// Collect the flags given on the command line for `cmd` and the entries of its
    /// config file, if any. Config keys must name options of the same subcommand.
    pub fn collect(cmd: &Command, matches: &ArgMatches) -> Result<Self, CliError> {
        let mut flags = BTreeMap::new();
        for id in matches.ids() {
            let id = id.as_str();
            if matches.value_source(id) == Some(ValueSource::CommandLine) {
                if let Some(v) = matches.get_one::<String>(id) {
                    flags.insert(id.to_string(), v.clone());
                }
            }
        }
        let config = match flags.get("config") {
            Some(path) => {
                let known: Vec<&str> = cmd.get_arguments().map(|a| a.get_id().as_str()).collect();
                parse_config(Path::new(path), &known)?
            }
            None => BTreeMap::new(),
        };
        Ok(Settings { flags, config })
    }

    pub fn raw(&self, key: &str) -> Option<(&str, Layer)> {
        self.flags
            .get(key)
            .map(|v| (v.as_str(), Layer::Flag))
            .or_else(|| self.config.get(key).map(|v| (v.as_str(), Layer::Config)))
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.raw(key).map(|(v, _)| v)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.str(key) {
            None => Ok(None),
            Some(v) => v.trim().parse().map(Some).map_err(|_| CliError::Usage(format!("--{key}: cannot parse `{v}`"))),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parse(key)?.ok_or_else(|| CliError::Usage(format!("missing required option --{key}")))
    }

    /// Comma-separated list of numbers.
    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.str(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--{key}: `{x}` is not a number")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    /// Every resolved value, flags overriding config entries; recorded in manifests.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let mut all = self.config.clone();
        all.extend(self.flags.iter().map(|(k, v)| (k.clone(), v.clone())));
        all.remove("config");
        all
    }
}

/// Flat `key = value` lines; `#` starts a comment. Keys are option names without dashes.
pub fn parse_config(path: &Path, known: &[&str]) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key = value", path.display(), n + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if key == "config" || !known.contains(&key) {
            return Err(CliError::Usage(format!("{}:{}: unknown key `{key}`", path.display(), n + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}
