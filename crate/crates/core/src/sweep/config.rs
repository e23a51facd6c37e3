//! Text config files for sweeps.
//!
//! One `key = value` pair per line; blank lines and lines starting with `#`
//! are ignored. Keys:
//!
//! ```text
//! dataset = <path>:<column>    # repeatable; paths resolve against the
//!                              # config file's directory
//! identity = on|off            # default on
//! maxL = on|off                # default on (one instance per dataset)
//! blk = off                    # drop a parameterized kind entirely
//! blk.sz = 2..16:2             # integer range lo..hi[:step], or a single
//! blk.min = 2..32:2            # integer
//! pwr.b = 2..4
//! pwr.min = 1..16:3
//! rndBlk.sz = 2..8:2
//! rndBlk.blks = 2..4
//! rndBlk.min = 2..16:2
//! rndLen.len = 1..32
//! taBlk.l = 2..20:2
//! taBlk.m = 5..45:5
//! taBlk.r = 30..40:5
//! beta_cap = 2.0               # optional; drops records with larger β
//! k_threshold = 100            # optional; enables the by_threshold winner
//! ```
//!
//! A parameterized kind is configured all-or-nothing: give every `<kind>.*`
//! key, or give none and inherit the built-in default grid (whose `taBlk`
//! upper band is anchored at the largest dataset length).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{GridSpec, IntRange, SweepConfig, SweepError};
use crate::freqdist::{FreqError, FrequencyTable};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("config line {line}: bad value for `{key}`: {detail}")]
    BadValue {
        line: usize,
        key: String,
        detail: String,
    },
    #[error(
        "grid kind `{kind}` needs `{kind}.{key}` (give all `{kind}.*` keys, or none for defaults)"
    )]
    MissingKey {
        kind: &'static str,
        key: &'static str,
    },
    #[error("grid kind `{kind}` is off but `{kind}.*` keys are present")]
    DisabledKindHasRanges { kind: &'static str },
    #[error("config has no `dataset = <path>:<column>` entries")]
    NoDatasets,
    #[error(transparent)]
    Dataset(#[from] FreqError),
    #[error(transparent)]
    Grid(#[from] SweepError),
}

/// Reads and parses a config file; dataset paths resolve against the file's
/// directory.
pub fn load_config(path: &Path) -> Result<SweepConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base_dir)
}

/// Parses config text, loading each referenced dataset CSV relative to
/// `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<SweepConfig, ConfigError> {
    let raw = RawConfig::from_text(text)?;

    if raw.datasets.is_empty() {
        return Err(ConfigError::NoDatasets);
    }
    let datasets = raw
        .datasets
        .iter()
        .map(|(path, column)| FrequencyTable::from_csv_path(base_dir.join(path), column))
        .collect::<Result<Vec<_>, _>>()?;

    let max_len = datasets
        .iter()
        .filter_map(FrequencyTable::max_length)
        .max()
        .unwrap_or(1);
    let defaults = GridSpec::default_grid(max_len);

    let grid = GridSpec {
        identity: raw.toggle("identity").unwrap_or(true),
        max_l: raw.toggle("maxL").unwrap_or(true),
        blk: raw
            .kind_ranges("blk", ["sz", "min"], pair(defaults.blk))?
            .map(|[a, b]| (a, b)),
        pwr: raw
            .kind_ranges("pwr", ["b", "min"], pair(defaults.pwr))?
            .map(|[a, b]| (a, b)),
        rnd_blk: raw
            .kind_ranges("rndBlk", ["sz", "blks", "min"], triple(defaults.rnd_blk))?
            .map(|[a, b, c]| (a, b, c)),
        rnd_len: raw
            .kind_ranges("rndLen", ["len"], defaults.rnd_len.map(|r| [r]))?
            .map(|[a]| a),
        ta_blk: raw
            .kind_ranges("taBlk", ["l", "m", "r"], triple(defaults.ta_blk))?
            .map(|[a, b, c]| (a, b, c)),
    };

    Ok(SweepConfig {
        datasets,
        grid,
        beta_cap: raw.beta_cap,
        k_threshold: raw.k_threshold,
    })
}

fn pair(v: Option<(IntRange, IntRange)>) -> Option<[IntRange; 2]> {
    v.map(|(a, b)| [a, b])
}

fn triple(v: Option<(IntRange, IntRange, IntRange)>) -> Option<[IntRange; 3]> {
    v.map(|(a, b, c)| [a, b, c])
}

const RANGE_KEYS: [&str; 11] = [
    "blk.sz",
    "blk.min",
    "pwr.b",
    "pwr.min",
    "rndBlk.sz",
    "rndBlk.blks",
    "rndBlk.min",
    "rndLen.len",
    "taBlk.l",
    "taBlk.m",
    "taBlk.r",
];

const TOGGLE_KEYS: [&str; 7] = [
    "identity", "maxL", "blk", "pwr", "rndBlk", "rndLen", "taBlk",
];

#[derive(Default)]
struct RawConfig {
    datasets: Vec<(PathBuf, String)>,
    toggles: BTreeMap<String, bool>,
    ranges: BTreeMap<String, IntRange>,
    beta_cap: Option<f64>,
    k_threshold: Option<u64>,
}

impl RawConfig {
    fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (idx, full_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = full_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            raw.take_entry(line, key, value)?;
        }
        Ok(raw)
    }

    fn take_entry(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |detail: String| ConfigError::BadValue {
            line,
            key: key.to_string(),
            detail,
        };
        match key {
            "dataset" => {
                let (path, column) = value
                    .rsplit_once(':')
                    .ok_or_else(|| bad("expected `<path>:<column>`".to_string()))?;
                if path.is_empty() || column.is_empty() {
                    return Err(bad("expected `<path>:<column>`".to_string()));
                }
                self.datasets
                    .push((PathBuf::from(path), column.to_string()));
                Ok(())
            }
            "beta_cap" => {
                self.check_fresh(line, key, self.beta_cap.is_some())?;
                let cap: f64 = value
                    .parse()
                    .map_err(|_| bad("expected a real".to_string()))?;
                if !(cap.is_finite() && cap > 0.0) {
                    return Err(bad("expected a positive real".to_string()));
                }
                self.beta_cap = Some(cap);
                Ok(())
            }
            "k_threshold" => {
                self.check_fresh(line, key, self.k_threshold.is_some())?;
                let k: u64 = value
                    .parse()
                    .map_err(|_| bad("expected a positive integer".to_string()))?;
                if k == 0 {
                    return Err(bad("expected a positive integer".to_string()));
                }
                self.k_threshold = Some(k);
                Ok(())
            }
            _ if TOGGLE_KEYS.contains(&key) => {
                self.check_fresh(line, key, self.toggles.contains_key(key))?;
                let on = match value {
                    "on" | "true" => true,
                    "off" | "false" => false,
                    _ => return Err(bad("expected on/off".to_string())),
                };
                self.toggles.insert(key.to_string(), on);
                Ok(())
            }
            _ if RANGE_KEYS.contains(&key) => {
                self.check_fresh(line, key, self.ranges.contains_key(key))?;
                let range = parse_range(value).map_err(bad)?;
                self.ranges.insert(key.to_string(), range);
                Ok(())
            }
            _ => Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            }),
        }
    }

    fn check_fresh(&self, line: usize, key: &str, already: bool) -> Result<(), ConfigError> {
        if already {
            Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            })
        } else {
            Ok(())
        }
    }

    fn toggle(&self, key: &str) -> Option<bool> {
        self.toggles.get(key).copied()
    }

    /// Resolves the ranges for one parameterized kind: `off` wins, explicit
    /// keys must be complete, and no keys at all means the default.
    fn kind_ranges<const N: usize>(
        &self,
        kind: &'static str,
        keys: [&'static str; N],
        default: Option<[IntRange; N]>,
    ) -> Result<Option<[IntRange; N]>, ConfigError> {
        let given: Vec<Option<IntRange>> = keys
            .iter()
            .map(|k| self.ranges.get(&format!("{kind}.{k}")).copied())
            .collect();
        let any_given = given.iter().any(Option::is_some);
        if self.toggle(kind) == Some(false) {
            if any_given {
                return Err(ConfigError::DisabledKindHasRanges { kind });
            }
            return Ok(None);
        }
        if !any_given {
            return Ok(default);
        }
        let mut out = [IntRange::single(1); N];
        for (i, slot) in given.iter().enumerate() {
            match slot {
                Some(r) => out[i] = *r,
                None => return Err(ConfigError::MissingKey { kind, key: keys[i] }),
            }
        }
        Ok(Some(out))
    }
}

/// `lo..hi[:step]` or a single integer.
fn parse_range(value: &str) -> Result<IntRange, String> {
    let int = |s: &str| -> Result<u32, String> {
        s.parse::<u32>()
            .map_err(|_| format!("`{s}` is not a non-negative integer"))
    };
    let bounds = |s: &str| -> Result<(u32, u32), String> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("`{s}` is not `lo..hi`"))?;
        Ok((int(lo)?, int(hi)?))
    };

    let (lo, hi, step) = if let Some((head, step)) = value.rsplit_once(':') {
        let (lo, hi) = bounds(head)?;
        (lo, hi, int(step)?)
    } else if value.contains("..") {
        let (lo, hi) = bounds(value)?;
        (lo, hi, 1)
    } else {
        let v = int(value)?;
        (v, v, 1)
    };
    IntRange::new(lo, hi, step).map_err(|e| e.to_string())
}
