//! Flat `key = value` parameter files.
//!
//! ```text
//! # dispersive regime
//! delta_e = -35
//! cooperativity = 1000   # sets g2N from gamma_c
//! damping = dephasing
//! ```
//!
//! Rates and detunings are in units of `gamma_e`, `c6` in `gamma_e µm^6`,
//! `volume` in `µm^3`. Keys may appear in any order; later assignments win,
//! which is how `--set` overrides are applied.

use std::collections::BTreeMap;
use std::path::Path;

use rydberg_cavity_core::params::check_coupling_consistency;
use rydberg_cavity_core::{DampingMode, KernelMode, PointOptions, SystemParams};

use crate::error::ConfigError;

const NUMERIC_KEYS: [&str; 15] = [
    "delta_c",
    "delta_e",
    "delta_r",
    "gamma_c_L",
    "gamma_c_R",
    "gamma_e",
    "gamma_r",
    "gamma_d",
    "omega_cf",
    "g2N",
    "cooperativity",
    "alpha",
    "c6",
    "volume",
    "n_atoms",
];

const REQUIRED_KEYS: [&str; 9] =
    ["delta_c", "delta_e", "delta_r", "gamma_c_L", "gamma_r", "omega_cf", "alpha", "c6", "volume"];

/// A parsed configuration: the physical parameters plus solver options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub params: SystemParams,
    pub options: PointOptions,
}

/// Raw assignments, kept until every override has been applied.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    numbers: BTreeMap<&'static str, f64>,
    damping: Option<DampingMode>,
    kernel: Option<KernelMode>,
}

fn parse_number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError::BadValue { key: key.to_string(), value: value.to_string() })
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies one `key = value` assignment.
    pub fn assign(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "damping" => {
                self.damping = Some(match value {
                    "radiative" => DampingMode::Radiative,
                    "dephasing" => DampingMode::Dephasing,
                    _ => return Err(ConfigError::BadValue { key: key.into(), value: value.into() }),
                })
            }
            "kernel" => {
                self.kernel = Some(match value {
                    "analytic" => KernelMode::Analytic,
                    "sphere" => KernelMode::Sphere,
                    _ => return Err(ConfigError::BadValue { key: key.into(), value: value.into() }),
                })
            }
            _ => {
                let name = NUMERIC_KEYS
                    .iter()
                    .find(|k| **k == key)
                    .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
                self.numbers.insert(name, parse_number(key, value)?);
            }
        }
        Ok(())
    }

    /// Applies every assignment of a config text. `origin` names the source
    /// in error messages.
    pub fn read_str(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                origin: origin.to_string(),
                line: i + 1,
                text: raw.to_string(),
            })?;
            self.assign(key.trim(), value).map_err(|e| e.at(origin, i + 1))?;
        }
        Ok(())
    }

    pub fn read_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        self.read_str(&text, &path.display().to_string())
    }

    /// Applies a `key=value` override from the command line.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { origin: "--set".into(), line: 0, text: assignment.into() })?;
        self.assign(key.trim(), value)
    }

    pub fn build(&self) -> Result<Config, ConfigError> {
        for key in REQUIRED_KEYS {
            if !self.numbers.contains_key(key) {
                return Err(ConfigError::MissingKey(key.to_string()));
            }
        }
        let get = |k: &str| self.numbers.get(k).copied();
        let n_atoms = match get("n_atoms") {
            Some(n) if n >= 0.0 && n.fract() == 0.0 => n as u64,
            Some(n) => return Err(ConfigError::BadValue { key: "n_atoms".into(), value: n.to_string() }),
            None => 0,
        };
        let mode = self.damping.unwrap_or_default();
        if mode == DampingMode::Dephasing && (get("n_atoms").is_none() || get("gamma_d").is_none()) {
            return Err(ConfigError::MissingKey("n_atoms and gamma_d (required with damping = dephasing)".into()));
        }
        let mut p = SystemParams {
            delta_c: get("delta_c").unwrap(),
            delta_e: get("delta_e").unwrap(),
            delta_r: get("delta_r").unwrap(),
            gamma_c_l: get("gamma_c_L").unwrap(),
            gamma_c_r: get("gamma_c_R").unwrap_or(0.0),
            gamma_e: get("gamma_e").unwrap_or(1.0),
            gamma_r: get("gamma_r").unwrap(),
            gamma_d: get("gamma_d").unwrap_or(0.0),
            omega_cf: get("omega_cf").unwrap(),
            g2n: 0.0,
            alpha: get("alpha").unwrap(),
            c6: get("c6").unwrap(),
            volume: get("volume").unwrap(),
            n_atoms,
        };
        match (get("g2N"), get("cooperativity")) {
            (Some(g), Some(c)) => {
                p.g2n = g;
                check_coupling_consistency(&p, c).map_err(ConfigError::Invalid)?;
            }
            (Some(g), None) => p.g2n = g,
            (None, Some(c)) => p.set_cooperativity(c),
            (None, None) => return Err(ConfigError::MissingKey("g2N or cooperativity".into())),
        }
        p.validate().map_err(ConfigError::Invalid)?;
        Ok(Config { params: p, options: PointOptions { mode, kernel: self.kernel.unwrap_or_default() } })
    }
}

/// Reads an optional file, then applies the overrides in order.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Config, ConfigError> {
    let mut b = ConfigBuilder::new();
    if let Some(path) = path {
        b.read_file(path)?;
    }
    for s in overrides {
        b.set(s)?;
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    const RESONANT: &str = "
        # resonant case
        delta_c = 0
        delta_e = 0
        delta_r = 0
        gamma_c_L = 0.3
        gamma_r = 0.1   # n = 100
        omega_cf = 5
        cooperativity = 30
        alpha = 0.01
        c6 = -8.83e6
        volume = 62831.85307179586
    ";

    #[test]
    fn cooperativity_sets_coupling() {
        let mut b = ConfigBuilder::new();
        b.read_str(RESONANT, "test").unwrap();
        let c = b.build().unwrap();
        assert!((c.params.g2n - 18.0).abs() < 1e-12);
        assert_eq!(c.options, PointOptions::default());
    }

    #[test]
    fn overrides_win_and_consistency_is_checked() {
        let mut b = ConfigBuilder::new();
        b.read_str(RESONANT, "test").unwrap();
        b.set("g2N=18").unwrap();
        assert!(b.build().is_ok());
        b.set("g2N = 19").unwrap();
        assert!(matches!(b.build(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn errors_name_the_line() {
        let mut b = ConfigBuilder::new();
        let e = b.read_str("delta_c = 0\nomega = 3\n", "f.cfg").unwrap_err();
        assert_eq!(e.to_string(), "f.cfg:2: unknown key `omega`");
        let e = b.read_str("delta_c 0\n", "f.cfg").unwrap_err();
        assert!(e.to_string().starts_with("f.cfg:1:"));
        assert!(matches!(ConfigBuilder::new().build(), Err(ConfigError::MissingKey(_))));
    }

    #[test]
    fn dephasing_needs_atom_number() {
        let mut b = ConfigBuilder::new();
        b.read_str(RESONANT, "test").unwrap();
        b.set("damping=dephasing").unwrap();
        b.set("gamma_d=0.15").unwrap();
        assert!(b.build().is_err());
        b.set("n_atoms=10000").unwrap();
        assert_eq!(b.build().unwrap().options.mode, DampingMode::Dephasing);
    }
}
