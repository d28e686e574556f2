//! Named radial data profiles for initial data and spatial forcing.
//!
//! Profiles are written as `name:arg[:arg]` on the command line and in
//! configuration files:
//!
//! | spec                | function                                   |
//! |---------------------|--------------------------------------------|
//! | `zero`              | `0`                                        |
//! | `gaussian:a`        | `a e^{-r²}`                                |
//! | `bump:a:R0`         | `a e^{1 - 1/(1 - (r/R0)²)}` for `r < R0`   |
//! | `signchanging:a`    | `a (1 - r²) e^{-r²}`                       |

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Gaussian { a: f64 },
    Bump { a: f64, r0: f64 },
    SignChanging { a: f64 },
}

impl Profile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { a } => a * (-r * r).exp(),
            Profile::Bump { a, r0 } => {
                let s = r / r0;
                if s >= 1.0 {
                    0.0
                } else {
                    a * (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            Profile::SignChanging { a } => a * (1.0 - r * r) * (-r * r).exp(),
        }
    }

    /// Radius beyond which the profile is zero to double precision.
    pub fn support_radius(&self) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Gaussian { .. } | Profile::SignChanging { .. } => 28.0,
            Profile::Bump { r0, .. } => r0,
        }
    }

    pub fn scaled(&self, c: f64) -> Profile {
        match *self {
            Profile::Zero => Profile::Zero,
            Profile::Gaussian { a } => Profile::Gaussian { a: c * a },
            Profile::Bump { a, r0 } => Profile::Bump { a: c * a, r0 },
            Profile::SignChanging { a } => Profile::SignChanging { a: c * a },
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Gaussian { a } | Profile::Bump { a, .. } | Profile::SignChanging { a } => a == 0.0,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Gaussian { a } | Profile::Bump { a, .. } => a >= 0.0,
            Profile::SignChanging { a } => a == 0.0,
        }
    }

    /// Breakpoints for quadrature of the profile on `[0, support]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Profile::Zero => vec![0.0, 1.0],
            Profile::Bump { r0, .. } => vec![0.0, 0.5 * r0, r0],
            _ => vec![0.0, 1.0, 2.0, 4.0, 8.0, self.support_radius()],
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "zero"),
            Profile::Gaussian { a } => write!(f, "gaussian:{a}"),
            Profile::Bump { a, r0 } => write!(f, "bump:{a}:{r0}"),
            Profile::SignChanging { a } => write!(f, "signchanging:{a}"),
        }
    }
}

impl FromStr for Profile {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let args: Vec<f64> = parts
            .map(|a| a.parse::<f64>().map_err(|_| LabError::Parse(format!("bad profile argument '{a}' in '{s}'"))))
            .collect::<Result<_>>()?;
        if args.iter().any(|a| !a.is_finite()) {
            return Err(LabError::Parse(format!("profile arguments must be finite: '{s}'")));
        }
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(LabError::Parse(format!("profile '{name}' takes {n} argument(s), got {}", args.len())))
            }
        };
        match name.as_str() {
            "zero" => arity(0).map(|_| Profile::Zero),
            "gaussian" => arity(1).map(|_| Profile::Gaussian { a: args[0] }),
            "signchanging" => arity(1).map(|_| Profile::SignChanging { a: args[0] }),
            "bump" => {
                arity(2)?;
                if args[1] <= 0.0 {
                    return Err(LabError::Parse(format!("bump radius must be positive in '{s}'")));
                }
                Ok(Profile::Bump { a: args[0], r0: args[1] })
            }
            _ => Err(LabError::Parse(format!("unknown profile '{s}'"))),
        }
    }
}

/// Anything that can be sampled onto a radial grid.
pub trait RadialData {
    fn sample(&self, grid: &RadialGrid) -> RadialField;
}

impl RadialData for Profile {
    fn sample(&self, grid: &RadialGrid) -> RadialField {
        RadialField::from_fn(*grid, |r| self.eval(r))
    }
}

impl RadialData for RadialField {
    fn sample(&self, grid: &RadialGrid) -> RadialField {
        if self.grid() == grid {
            return self.clone();
        }
        RadialField::from_fn(*grid, |r| self.interpolate(r))
    }
}
