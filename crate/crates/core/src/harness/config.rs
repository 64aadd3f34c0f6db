//! Flat `key = value` configuration.

use std::path::Path;

use thiserror::Error;

use super::gen::GenParams;
use crate::controller::{ControllerConfig, Mode, SimConfig};
use crate::llc::CacheConfig;
use crate::marker::{LitOverflow, MarkerBits, MarkerMode};
use crate::predictor::LlpUpdate;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub llc: CacheConfig,
    pub ctrl: ControllerConfig,
    pub gen: GenParams,
    /// Latency proxy cost of one memory transfer, in nanoseconds.
    pub latency_per_access: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            llc: CacheConfig::default(),
            ctrl: ControllerConfig::default(),
            gen: GenParams::default(),
            latency_per_access: 50.0,
        }
    }
}

/// Byte size with an optional `k`/`m`/`g` (binary) suffix.
fn parse_size(v: &str) -> Option<u64> {
    let v = v.trim().to_ascii_lowercase();
    let v = v.strip_suffix('b').unwrap_or(&v);
    let (num, mul) = match v.chars().last()? {
        'k' => (&v[..v.len() - 1], 1u64 << 10),
        'm' => (&v[..v.len() - 1], 1 << 20),
        'g' => (&v[..v.len() - 1], 1 << 30),
        _ => (v, 1),
    };
    num.trim().parse::<u64>().ok()?.checked_mul(mul)
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "1" | "yes" | "on" => Some(true),
        "false" | "0" | "no" | "off" => Some(false),
        _ => None,
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
            c.set(line, k.trim(), v.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: v.to_string(),
        };
        fn num<T: std::str::FromStr>(
            v: &str,
            bad: impl Fn() -> ConfigError,
        ) -> Result<T, ConfigError> {
            v.parse().map_err(|_| bad())
        }
        let size = |v: &str| parse_size(v).ok_or_else(bad);
        match key {
            "marker_mode" => {
                self.ctrl.markers.mode = match v {
                    "perline" => MarkerMode::PerLine,
                    "fixed" => MarkerMode::Fixed,
                    _ => return Err(bad()),
                }
            }
            "marker_bits" => {
                self.ctrl.markers.bits = match v {
                    "32" => MarkerBits::B32,
                    "8" => MarkerBits::B8,
                    _ => return Err(bad()),
                }
            }
            "per_line_il" => self.ctrl.markers.per_line_il = parse_bool(v).ok_or_else(bad)?,
            "lit_overflow" => {
                self.ctrl.lit_overflow = match v {
                    "mmap" => LitOverflow::MemoryMapped,
                    "rekey" => LitOverflow::Rekey,
                    _ => return Err(bad()),
                }
            }
            "lit_entries" => self.ctrl.lit_entries = num(v, bad)?,
            "seed" => self.set_seed(num(v, bad)?),
            "llc_capacity" => self.llc.capacity = size(v)? as usize,
            "llc_assoc" => self.llc.assoc = num(v, bad)?,
            "sampled_fraction" => self.llc.sampled_fraction = num(v, bad)?,
            "lct_entries" => self.ctrl.lct.entries = num(v, bad)?,
            "page_size" => self.ctrl.lct.page_size = size(v)?,
            "llp_update" => {
                self.ctrl.lct.update = match v {
                    "every" => LlpUpdate::EveryAccess,
                    "mispredict" => LlpUpdate::MispredictOnly,
                    _ => return Err(bad()),
                }
            }
            "memory_lines" => self.ctrl.memory_lines = size(v)?,
            "cores" => self.ctrl.cores = num(v, bad)?,
            "cost_clean_writeback" => self.ctrl.weights.clean_writeback = num(v, bad)?,
            "cost_invalidate" => self.ctrl.weights.invalidate = num(v, bad)?,
            "cost_second_access" => self.ctrl.weights.second_access = num(v, bad)?,
            "benefit_weight" => self.ctrl.weights.benefit = num(v, bad)?,
            "metadata_cache_bytes" => self.ctrl.metadata_cache_bytes = size(v)? as usize,
            "metadata_assoc" => self.ctrl.metadata_assoc = num(v, bad)?,
            "latency_per_access" => self.latency_per_access = num(v, bad)?,
            "gen_lines" => self.gen.lines = size(v)?,
            "gen_passes" => self.gen.passes = num(v, bad)?,
            "gen_write_fraction" => self.gen.write_fraction = num(v, bad)?,
            "gen_cores" => self.gen.cores = num(v, bad)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// One seed drives the marker key, the predictor hash and generators.
    pub fn set_seed(&mut self, seed: u64) {
        self.ctrl.seed = seed;
        self.ctrl.lct.seed = seed;
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let inv = |m: String| Err(ConfigError::Invalid(m));
        if let Err(e) = self.llc.validate() {
            return inv(e.to_string());
        }
        let c = &self.ctrl;
        if c.memory_lines == 0 || c.memory_lines > 1 << 30 || !c.memory_lines.is_multiple_of(4) {
            return inv(format!(
                "memory_lines {} must be a multiple of 4 in 4..=2^30",
                c.memory_lines
            ));
        }
        if c.lit_entries == 0 {
            return inv("lit_entries must be positive".into());
        }
        if c.lct.entries == 0 || c.lct.page_size < 64 || !c.lct.page_size.is_power_of_two() {
            return inv("lct_entries must be positive and page_size a power of two >= 64".into());
        }
        if c.cores == 0 || c.cores > 8 {
            return inv(format!("cores {} not in 1..=8", c.cores));
        }
        let blocks = c.metadata_cache_bytes / 64;
        if c.metadata_assoc == 0
            || blocks < c.metadata_assoc
            || !blocks.is_multiple_of(c.metadata_assoc)
        {
            return inv("metadata cache size must be a whole number of sets".into());
        }
        if !(0.0..=1.0).contains(&self.gen.write_fraction) {
            return inv("gen_write_fraction outside [0, 1]".into());
        }
        if self.latency_per_access.is_nan() || self.latency_per_access < 0.0 {
            return inv("latency_per_access must be non-negative".into());
        }
        Ok(())
    }

    pub fn sim_config(&self, mode: Mode) -> SimConfig {
        SimConfig {
            mode,
            llc: self.llc,
            ctrl: self.ctrl,
        }
    }
}
