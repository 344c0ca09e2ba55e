//! Flat `key = value` parameter files. Names follow the usual simulation
//! details table; flags given on the command line win over file values.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "simulation_time",
    "mac_layer",
    "width",
    "length",
    "nodes",
    "pause_time",
    "min_speed",
    "max_speed",
    "radio_range",
    "tick",
    "grid",
    "seed",
    "dwell",
];

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl FromStr for ConfigFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config(format!("unknown config key `{key}` on line {}", i + 1)));
            }
            if values.insert(key.to_owned(), value.trim().to_owned()).is_some() {
                return Err(Error::Config(format!("config key `{key}` given twice")));
            }
        }
        if let Some(mac) = values.get("mac_layer") {
            log::info!("mac_layer = {mac} is recorded but not modelled");
        }
        Ok(ConfigFile { values })
    }
}

impl ConfigFile {
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("config key `{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }

    /// The command-line value if present, else the file value, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }
}

/// Grid dimensions written `ROWSxCOLS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct GridDims {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for GridDims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid `{s}` is not of the form ROWSxCOLS"));
        let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows: usize = r.trim().parse().map_err(|_| bad())?;
        let cols: usize = c.trim().parse().map_err(|_| bad())?;
        if rows == 0 || cols == 0 {
            return Err(bad());
        }
        Ok(GridDims { rows, cols })
    }
}
