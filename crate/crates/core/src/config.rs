//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! zero_store_path = zeros.txt
//! threads = 4
//! out_format = json
//! epsilon = 0.1
//! ```
//!
//! Unknown or repeated keys are rejected, as is any value outside its
//! admissible range (see [`RunConfig::set`]).

use crate::ladder::LadderParams;
use crate::{Error, Result};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(OutFormat::Json),
            "csv" => Ok(OutFormat::Csv),
            _ => Err(format!("unknown format '{s}' (expected json or csv)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub zero_store_path: Option<PathBuf>,
    pub threads: usize,
    pub out_format: OutFormat,
    pub epsilon: f64,
    pub l: u32,
    pub k: usize,
    pub seed: u64,
    pub z_floor: f64,
    pub delta_gap: f64,
    pub residual_cap: f64,
    pub budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = LadderParams::default();
        RunConfig {
            zero_store_path: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get().min(1024)),
            out_format: OutFormat::Json,
            epsilon: crate::moments::DEFAULT_EPSILON,
            l: 1,
            k: 2,
            seed: p.seed,
            z_floor: p.z_floor,
            delta_gap: p.delta_gap,
            residual_cap: p.residual_cap,
            budget: p.budget,
        }
    }
}

pub const KEYS: [&str; 11] = [
    "zero_store_path",
    "threads",
    "out_format",
    "epsilon",
    "l",
    "k",
    "seed",
    "z_floor",
    "delta_gap",
    "residual_cap",
    "budget",
];

fn parse_num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("{key}: cannot parse '{v}'"))
}

fn in_range<T: PartialOrd + std::fmt::Display>(
    key: &str,
    v: T,
    lo: T,
    hi: T,
    open_lo: bool,
) -> std::result::Result<T, String> {
    let ok = if open_lo { v > lo } else { v >= lo } && v <= hi;
    if ok {
        Ok(v)
    } else {
        let l = if open_lo { '(' } else { '[' };
        Err(format!("{key} = {v} outside {l}{lo}, {hi}]"))
    }
}

impl RunConfig {
    /// Set one key from its textual value. Admissible ranges:
    /// threads in [1, 1024], epsilon in (0, 0.2], l in [1, 4], k in [1, 8],
    /// z_floor in (0, 0.01], delta_gap in (0, 0.5], residual_cap in (0, 1],
    /// budget in [1, 10^9].
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "zero_store_path" => {
                if v.is_empty() {
                    return Err("zero_store_path is empty".into());
                }
                self.zero_store_path = Some(PathBuf::from(v));
            }
            "threads" => self.threads = in_range(key, parse_num(key, v)?, 1, 1024, false)?,
            "out_format" => self.out_format = v.parse()?,
            "epsilon" => self.epsilon = in_range(key, parse_num(key, v)?, 0.0, crate::moments::MAX_EPSILON, true)?,
            "l" => self.l = in_range(key, parse_num(key, v)?, 1, crate::moments::MAX_L, false)?,
            "k" => self.k = in_range(key, parse_num(key, v)?, 1, crate::report::K0, false)?,
            "seed" => self.seed = parse_num(key, v)?,
            "z_floor" => self.z_floor = in_range(key, parse_num(key, v)?, 0.0, 1e-2, true)?,
            "delta_gap" => self.delta_gap = in_range(key, parse_num(key, v)?, 0.0, 0.5, true)?,
            "residual_cap" => self.residual_cap = in_range(key, parse_num(key, v)?, 0.0, 1.0, true)?,
            "budget" => self.budget = in_range(key, parse_num(key, v)?, 1, 1_000_000_000, false)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    pub fn ladder_params(&self) -> LadderParams {
        LadderParams {
            z_floor: self.z_floor,
            delta_gap: self.delta_gap,
            residual_cap: self.residual_cap,
            budget: self.budget,
            seed: self.seed,
            ..LadderParams::default()
        }
    }
}

pub fn parse_run_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Ingestion { line: i + 1, msg };
        let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
        let key = key.trim();
        if seen.contains(&key) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        cfg.set(key, value).map_err(err)?;
        seen.push(key);
    }
    Ok(cfg)
}

pub fn load_run_config(path: impl AsRef<std::path::Path>) -> Result<RunConfig> {
    parse_run_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_file() {
        let text = "# run\nzero_store_path = z.txt\nthreads=3\nout_format = csv\n\nepsilon = 0.05\nl = 2\nk = 3\nseed = 42\nz_floor = 1e-7\ndelta_gap = 0.2\nresidual_cap = 1e-4\nbudget = 5000\n";
        let c = parse_run_config(text).unwrap();
        assert_eq!(c.zero_store_path.as_deref(), Some(std::path::Path::new("z.txt")));
        assert_eq!((c.threads, c.l, c.k, c.seed, c.budget), (3, 2, 3, 42, 5000));
        assert_eq!(c.out_format, OutFormat::Csv);
        assert_eq!(
            (c.epsilon, c.z_floor, c.delta_gap, c.residual_cap),
            (0.05, 1e-7, 0.2, 1e-4)
        );
        let p = c.ladder_params();
        assert_eq!((p.seed, p.budget, p.delta_gap), (42, 5000, 0.2));
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(parse_run_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_run_config("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn rejections() {
        for bad in [
            "colour = blue",
            "threads",
            "threads = 0",
            "epsilon = 0.3",
            "epsilon = 0",
            "l = 5",
            "k = 9",
            "out_format = xml",
            "seed = -1",
            "z_floor = nan",
            "budget = 0",
            "threads = 2\nthreads = 3",
            "zero_store_path =",
        ] {
            assert!(parse_run_config(bad).is_err(), "{bad}");
        }
        match parse_run_config("k = 2\n\nl = 7") {
            Err(Error::Ingestion { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_key_is_settable() {
        let mut c = RunConfig::default();
        let sample = ["p", "2", "json", "0.1", "1", "2", "7", "1e-8", "0.15", "0.001", "10"];
        for (k, v) in KEYS.iter().zip(sample) {
            c.set(k, v).unwrap();
        }
    }
}
