//! Run configuration from an ini file plus command-line overrides.
//!
//! Keys live in a `[default]` section, one `key = value` per line. Dashes and
//! underscores in key names are interchangeable. Every key can also be given
//! as a `--key=value` flag, which takes precedence over the ini file.

use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches};
use ini::Ini;
use statemerge_core::{evaluation_by_name, EvalParams, Mode};
use thiserror::Error;

pub const DEFAULT_BEAM_WIDTH: usize = 100;

/// Every accepted key, in canonical underscore spelling.
pub const KEYS: &[&str] = &[
    "heuristic_name",
    "data_name",
    "mode",
    "aptafile",
    "beam_width",
    "include_sinks",
    "confidence_bound",
    "largestblue",
    "shallowfirst",
    "extend",
    "blueblue",
    "redfixed",
    "markovian",
    "ktail",
    "sinkson",
    "sink_count",
    "state_count",
    "symbol_count",
    "correction",
    "finalprob",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("ini syntax: {0}")]
    Syntax(String),
    #[error("unexpected ini section [{0}]")]
    Section(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    Value { key: String, value: String },
    #[error("unknown heuristic `{0}`")]
    Heuristic(String),
    #[error("predict mode needs an aptafile")]
    MissingModel,
    #[error("no input file given")]
    MissingInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: EvalParams,
    pub heuristic_name: String,
    pub data_name: String,
    pub input: PathBuf,
    pub aptafile: Option<PathBuf>,
    pub beam_width: usize,
    pub include_sinks: bool,
}

impl RunConfig {
    fn with_input(input: PathBuf) -> Self {
        RunConfig {
            params: EvalParams::default(),
            heuristic_name: "alergia".into(),
            data_name: String::new(),
            input,
            aptafile: None,
            beam_width: DEFAULT_BEAM_WIDTH,
            include_sinks: false,
        }
    }

    pub fn mode(&self) -> Mode {
        self.params.mode
    }
}

pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

fn set(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    let key = normalize_key(key);
    let v = value.trim();
    let bad = || ConfigError::Value {
        key: key.clone(),
        value: v.to_string(),
    };
    let flag = || parse_bool(v).ok_or_else(bad);
    let p = &mut cfg.params;
    match key.as_str() {
        "heuristic_name" => cfg.heuristic_name = v.to_string(),
        "data_name" => cfg.data_name = v.to_string(),
        "mode" => p.mode = Mode::from_name(v).ok_or_else(bad)?,
        "aptafile" => cfg.aptafile = (!v.is_empty()).then(|| PathBuf::from(v)),
        "beam_width" => {
            cfg.beam_width = v.parse().ok().filter(|&w| w >= 1).ok_or_else(bad)?;
        }
        "include_sinks" => cfg.include_sinks = flag()?,
        "confidence_bound" => {
            p.confidence_bound = v
                .parse()
                .ok()
                .filter(|a: &f64| *a > 0.0 && *a <= 1.0)
                .ok_or_else(bad)?;
        }
        "largestblue" => p.largestblue = flag()?,
        "shallowfirst" => p.shallowfirst = flag()?,
        "extend" => p.extend = flag()?,
        "blueblue" => p.blueblue = flag()?,
        "redfixed" => p.redfixed = flag()?,
        "markovian" => p.markovian = v.parse().map_err(|_| bad())?,
        "ktail" => p.ktail = v.parse().map_err(|_| bad())?,
        "sinkson" => p.sinkson = flag()?,
        "sink_count" => p.sink_count = v.parse().map_err(|_| bad())?,
        "state_count" => p.state_count = v.parse().map_err(|_| bad())?,
        "symbol_count" => p.symbol_count = v.parse().map_err(|_| bad())?,
        "correction" => {
            p.correction = v
                .parse()
                .ok()
                .filter(|c: &f64| c.is_finite() && *c >= 0.0)
                .ok_or_else(bad)?;
        }
        "finalprob" => p.finalprob = flag()?,
        _ => return Err(ConfigError::UnknownKey(key)),
    }
    Ok(())
}

/// One `--key VALUE` flag per configuration key, also accepted with dashes.
pub fn flag_args() -> Vec<Arg> {
    KEYS.iter()
        .map(|&key| {
            let arg = Arg::new(key)
                .long(key)
                .value_name("VALUE")
                .action(ArgAction::Set);
            let dashed = key.replace('_', "-");
            if dashed == key {
                arg
            } else {
                arg.alias(dashed)
            }
        })
        .collect()
}

/// Flags given on the command line, in key order.
pub fn overrides_from(matches: &ArgMatches) -> Vec<(String, String)> {
    KEYS.iter()
        .filter_map(|&k| {
            matches
                .get_one::<String>(k)
                .map(|v| (k.to_string(), v.clone()))
        })
        .collect()
}

/// Reads `ini` (may be empty), then applies `overrides` in order.
pub fn load_config(
    ini: &str,
    overrides: &[(String, String)],
    input: Option<PathBuf>,
) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::with_input(input.ok_or(ConfigError::MissingInput)?);
    let doc = Ini::load_from_str(ini).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    for (section, props) in doc.iter() {
        match section {
            None | Some("default") => {}
            Some(other) => return Err(ConfigError::Section(other.to_string())),
        }
        for (k, v) in props.iter() {
            set(&mut cfg, k, v)?;
        }
    }
    for (k, v) in overrides {
        set(&mut cfg, k, v)?;
    }
    if evaluation_by_name(&cfg.heuristic_name).is_none() {
        return Err(ConfigError::Heuristic(cfg.heuristic_name));
    }
    if cfg.params.mode == Mode::Predict && cfg.aptafile.is_none() {
        return Err(ConfigError::MissingModel);
    }
    Ok(cfg)
}
