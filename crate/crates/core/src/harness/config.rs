//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored; a key may appear
//! more than once only if it is `axis`. Recognised keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `N`, `alpha`, `p`, `sigma`, `m`, `c0`, `c_inf` | problem parameters |
//! | `u0`, `w` | profiles, e.g. `gaussian:0.1`, `bump:1:2` |
//! | `axis` | sweep axis `var:lo:hi:step`, `var` one of `p alpha sigma m N` |
//! | `radius`, `cells`, `dt_init`, `dt_min`, `safety`, `blow_cap`, `horizon`, `max_steps`, `growth_floor` | solver |
//! | `scheme` | `imex` (default) or `rk2` |
//! | `theta` | θ of the IMEX scheme |
//! | `gate` | `true` runs the convergence gate on global candidates |
//! | `output` | CSV destination |

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{LabError, Result};
use crate::evolve::mol::{Scheme, SolverConfig};
use crate::params::Parameters;
use crate::profile::Profile;

use super::sweep::{Axis, SweepSpec};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, Vec<String>>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(LabError::Parse(format!("line {}: empty key", lineno + 1)));
            }
            let slot = entries.entry(k.clone()).or_default();
            if !slot.is_empty() && k != "axis" {
                return Err(LabError::Parse(format!("line {}: duplicate key '{k}'", lineno + 1)));
            }
            slot.push(v);
        }
        Ok(KeyValues { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).and_then(|v| v.first()).map(String::as_str)
    }

    pub fn get_all(&self, key: &str) -> &[String] {
        self.entries.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| LabError::Parse(format!("{key}: '{v}' is not a number"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| LabError::Parse(format!("{key}: '{v}' is not a count"))),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(LabError::Parse(format!("{key}: '{v}' is not a boolean"))),
        }
    }

    pub fn profile_or(&self, key: &str, default: Profile) -> Result<Profile> {
        self.get(key).map_or(Ok(default), str::parse)
    }
}

const KNOWN: &[&str] = &[
    "N", "alpha", "p", "sigma", "m", "c0", "c_inf", "u0", "w", "axis", "radius", "cells", "dt_init", "dt_min",
    "safety", "blow_cap", "horizon", "max_steps", "growth_floor", "scheme", "theta", "gate", "output",
];

pub fn solver_config(kv: &KeyValues) -> Result<SolverConfig> {
    let d = SolverConfig::default();
    let theta = kv.f64_or("theta", 1.0)?;
    let scheme = match kv.get("scheme").unwrap_or("imex") {
        "imex" => Scheme::Imex { theta },
        "rk2" => Scheme::ExplicitRk2,
        other => return Err(LabError::Parse(format!("scheme: unknown '{other}'"))),
    };
    let config = SolverConfig {
        radius: kv.f64_or("radius", d.radius)?,
        cells: kv.usize_or("cells", d.cells)?,
        dt_init: kv.f64_or("dt_init", d.dt_init)?,
        dt_min: kv.f64_or("dt_min", d.dt_min)?,
        safety: kv.f64_or("safety", d.safety)?,
        blow_cap: kv.f64_or("blow_cap", d.blow_cap)?,
        horizon: kv.f64_or("horizon", d.horizon)?,
        scheme,
        max_steps: kv.usize_or("max_steps", d.max_steps)?,
        growth_floor: kv.f64_or("growth_floor", d.growth_floor)?,
        convergence_gate: kv.bool_or("gate", d.convergence_gate)?,
        ..d
    };
    config.validate()?;
    Ok(config)
}

pub fn parameters(kv: &KeyValues) -> Result<Parameters> {
    Parameters::with_scales(
        kv.f64_or("N", 3.0)?,
        kv.f64_or("alpha", 0.0)?,
        kv.f64_or("p", 2.0)?,
        kv.f64_or("sigma", 0.0)?,
        kv.f64_or("m", 0.0)?,
        kv.f64_or("c0", 1.0)?,
        kv.f64_or("c_inf", 1.0)?,
    )
}

pub fn sweep_spec(kv: &KeyValues) -> Result<SweepSpec> {
    if let Some(bad) = kv.keys().find(|k| !KNOWN.contains(k)) {
        return Err(LabError::Parse(format!("unknown key '{bad}'")));
    }
    let axes: Vec<Axis> = kv
        .get_all("axis")
        .iter()
        .flat_map(|v| v.split(','))
        .map(str::parse)
        .collect::<Result<_>>()?;
    let spec = SweepSpec {
        base: parameters(kv)?,
        axes,
        u0: kv.profile_or("u0", Profile::Zero)?,
        w: kv.profile_or("w", Profile::Zero)?,
        solver: solver_config(kv)?,
        output: kv.get("output").map(PathBuf::from),
    };
    spec.validate()?;
    Ok(spec)
}

impl SweepSpec {
    pub fn from_config_text(text: &str) -> Result<Self> {
        sweep_spec(&KeyValues::parse(text)?)
    }
}
