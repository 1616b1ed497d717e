//! Flag and config-file resolution. Flags win over `--config` keys.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use eg_core::SolveConfig;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Loss id, `gamma_hinge:<gamma>`, or a comma-separated list for `bounds`.
    #[arg(long)]
    pub loss: Option<String>,
    /// Label noise rate (comma-separated list for `bounds`).
    #[arg(long)]
    pub nu: Option<String>,
    /// Norm bound (comma-separated list for `bounds`). Also the norm cap for `estimate`.
    #[arg(long = "B")]
    pub b: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// Gadget margin; accepts fractions such as `1/9`.
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Beta grid size.
    #[arg(long = "grid-beta")]
    pub grid_beta: Option<String>,
    /// Alpha grid size for the Eq3-style recipe.
    #[arg(long = "grid-alpha")]
    pub grid_alpha: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Output path; stdout when omitted. Relative paths resolve against `EGLAB_OUT_DIR` when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Fail with exit status 3 unless the hinge sandwich holds.
    #[arg(long = "assert-sandwich")]
    pub assert_sandwich: bool,
    #[arg(long)]
    pub tol: Option<String>,
    /// JSON file whose keys mirror the flags, plus an optional `solver` object.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "loss",
    "nu",
    "B",
    "beta",
    "M",
    "grid-beta",
    "grid-alpha",
    "seed",
    "out",
    "format",
    "assert-sandwich",
    "tol",
    "kind",
    "source",
    "n",
    "trials",
    "solver",
];

pub struct Settings {
    flags: Flags,
    extra: Vec<(&'static str, String)>,
    config: Map<String, Value>,
}

impl Settings {
    pub fn load(flags: Flags) -> Result<Self, CliError> {
        let mut config = Map::new();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| {
                CliError::Validation(format!("malformed config {}: {e}", path.display()))
            })?;
            let Value::Object(obj) = v else {
                return Err(CliError::Validation("config must be a JSON object".into()));
            };
            for (k, v) in obj {
                let key = k.replace('_', "-");
                if !KEYS.contains(&key.as_str()) {
                    return Err(CliError::Validation(format!("unknown config key `{k}`")));
                }
                config.insert(key, v);
            }
        }
        Ok(Settings {
            flags,
            extra: Vec::new(),
            config,
        })
    }

    /// Registers a subcommand-specific flag value under a config key.
    pub fn with(mut self, key: &'static str, flag: Option<String>) -> Self {
        if let Some(v) = flag {
            self.extra.push((key, v));
        }
        self
    }

    fn raw(&self, key: &str, flag: Option<String>) -> Result<Option<String>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.config.get(key).map(|v| value_text(key, v)).transpose()
    }

    pub fn text(&self, key: &str) -> Result<Option<String>, CliError> {
        let f = &self.flags;
        let flag = match key {
            "loss" => f.loss.clone(),
            "nu" => f.nu.clone(),
            "B" => f.b.clone(),
            "beta" => f.beta.clone(),
            "M" => f.m.clone(),
            "grid-beta" => f.grid_beta.clone(),
            "grid-alpha" => f.grid_alpha.clone(),
            "seed" => f.seed.clone(),
            "tol" => f.tol.clone(),
            _ => self
                .extra
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| v.clone()),
        };
        self.raw(key, flag)
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<String>>, CliError> {
        Ok(self.text(key)?.map(|s| {
            s.split(',')
                .map(|t| t.trim().to_string())
                .filter(|t| !t.is_empty())
                .collect()
        }))
    }

    pub fn num(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.text(key)?.map(|s| parse_num(key, &s)).transpose()
    }

    pub fn nums(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.list(key)?
            .map(|v| v.iter().map(|s| parse_num(key, s)).collect())
            .transpose()
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.text(key)?.map(|s| parse_count(key, &s)).transpose()
    }

    pub fn counts(&self, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        self.list(key)?
            .map(|v| v.iter().map(|s| parse_count(key, s)).collect())
            .transpose()
    }

    pub fn require_num(&self, key: &str) -> Result<f64, CliError> {
        self.num(key)?.ok_or_else(|| missing(key))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        match self.text("seed")? {
            None => Ok(0),
            Some(s) => s
                .parse()
                .map_err(|_| CliError::Validation(format!("invalid seed `{s}`"))),
        }
    }

    pub fn format(&self, default: Format) -> Result<Format, CliError> {
        if let Some(f) = self.flags.format {
            return Ok(f);
        }
        match self.config.get("format") {
            None => Ok(default),
            Some(v) => {
                let s = value_text("format", v)?;
                Format::from_str(&s, true).map_err(|_| {
                    CliError::Validation(format!("invalid format `{s}`: expected csv or json"))
                })
            }
        }
    }

    pub fn assert_sandwich(&self) -> Result<bool, CliError> {
        if self.flags.assert_sandwich {
            return Ok(true);
        }
        match self.config.get("assert-sandwich") {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => Err(CliError::Validation(
                "`assert-sandwich` must be a boolean".into(),
            )),
        }
    }

    pub fn path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        Ok(self.text(key)?.map(PathBuf::from))
    }

    pub fn out(&self) -> Result<Option<PathBuf>, CliError> {
        match &self.flags.out {
            Some(p) => Ok(Some(p.clone())),
            None => self.path("out"),
        }
    }

    /// Solver settings from the config `solver` object with the seed applied.
    pub fn solver(&self, seed: u64) -> Result<SolveConfig, CliError> {
        let mut cfg: SolveConfig = match self.config.get("solver") {
            None => SolveConfig::default(),
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|e| CliError::Validation(format!("invalid solver config: {e}")))?,
        };
        cfg.seed = seed;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn missing(key: &str) -> CliError {
    CliError::Validation(format!("missing required --{key}"))
}

fn value_text(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::Array(_) | Value::Object(_) => Err(CliError::Validation(format!(
                    "config key `{key}` has nested values"
                ))),
                other => value_text(key, other),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.join(",")),
        _ => Err(CliError::Validation(format!(
            "config key `{key}` has an unsupported value"
        ))),
    }
}

/// A finite decimal or a fraction `a/b`.
pub fn parse_num(key: &str, s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Validation(format!("invalid number `{s}` for {key}"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn parse_count(key: &str, s: &str) -> Result<usize, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("invalid count `{s}` for {key}")))
}
