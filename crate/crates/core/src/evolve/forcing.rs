//! Time profile `ζ` of the forcing term `ζ(t) w(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::params::Parameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForcingShape {
    /// `c0 t^σ` for all `t > 0`.
    Pure,
    /// `c0 t^σ` on `(0, 1)`, `c∞ t^m` on `[1, ∞)`.
    Spliced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingProfile {
    pub sigma: f64,
    pub m: f64,
    pub c0: f64,
    pub c_inf: f64,
    pub shape: ForcingShape,
}

impl ForcingProfile {
    pub fn new(sigma: f64, m: f64, c0: f64, c_inf: f64, shape: ForcingShape) -> Result<Self> {
        if !(sigma > -1.0) || !sigma.is_finite() {
            return Err(LabError::Domain(format!("sigma = {sigma} must be > -1")));
        }
        if !m.is_finite() {
            return Err(LabError::Domain(format!("m = {m} must be finite")));
        }
        if !(c0 > 0.0) || !(c_inf > 0.0) {
            return Err(LabError::Domain(format!("c0 = {c0}, c_inf = {c_inf} must be > 0")));
        }
        if shape == ForcingShape::Spliced && c0 != c_inf {
            log::warn!("forcing profile is discontinuous at t = 1: c0 = {c0}, c_inf = {c_inf}");
        }
        Ok(ForcingProfile { sigma, m, c0, c_inf, shape })
    }

    pub fn pure(sigma: f64, c0: f64) -> Result<Self> {
        Self::new(sigma, sigma, c0, c0, ForcingShape::Pure)
    }

    pub fn spliced(sigma: f64, m: f64) -> Result<Self> {
        Self::new(sigma, m, 1.0, 1.0, ForcingShape::Spliced)
    }

    /// The spliced profile with the exponents and scales of `params`.
    pub fn from_params(params: &Parameters) -> Result<Self> {
        Self::new(params.sigma, params.m, params.c0, params.c_inf, ForcingShape::Spliced)
    }

    /// Jump `c∞ - c0` of the spliced profile at `t = 1`.
    pub fn splice_mismatch(&self) -> f64 {
        match self.shape {
            ForcingShape::Pure => 0.0,
            ForcingShape::Spliced => self.c_inf - self.c0,
        }
    }

    pub fn zeta_eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(LabError::Domain(format!("forcing profile needs t > 0, got {t}")));
        }
        Ok(match self.shape {
            ForcingShape::Spliced if t >= 1.0 => self.c_inf * t.powf(self.m),
            _ => self.c0 * t.powf(self.sigma),
        })
    }

    fn antiderivative_early(&self, t: f64) -> f64 {
        let e = self.sigma + 1.0;
        self.c0 * t.powf(e) / e
    }

    /// `∫_1^t c∞ s^m ds`.
    fn antiderivative_late(&self, t: f64) -> f64 {
        let e = self.m + 1.0;
        if e == 0.0 {
            self.c_inf * t.ln()
        } else {
            self.c_inf * (t.powf(e) - 1.0) / e
        }
    }

    /// `∫_{t0}^{t1} ζ`, exact.
    pub fn zeta_step_integral(&self, t0: f64, t1: f64) -> Result<f64> {
        if !(t0 >= 0.0) || !(t1 >= t0) {
            return Err(LabError::Domain(format!("need 0 <= t0 <= t1, got [{t0}, {t1}]")));
        }
        if self.shape == ForcingShape::Pure || t1 <= 1.0 {
            return Ok(self.antiderivative_early(t1) - self.antiderivative_early(t0));
        }
        if t0 >= 1.0 {
            return Ok(self.antiderivative_late(t1) - self.antiderivative_late(t0));
        }
        Ok(self.antiderivative_early(1.0) - self.antiderivative_early(t0) + self.antiderivative_late(t1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        let pure = ForcingProfile::pure(-0.5, 1.0).unwrap();
        assert!((pure.zeta_eval(4.0).unwrap() - 0.5).abs() < 1e-15);
        let sp = ForcingProfile::spliced(-0.5, 1.0).unwrap();
        assert!((sp.zeta_eval(4.0).unwrap() - 4.0).abs() < 1e-15);
        let one = ForcingProfile::spliced(0.0, 0.0).unwrap();
        for t in [0.01, 0.5, 1.0, 7.0] {
            assert_eq!(one.zeta_eval(t).unwrap(), 1.0);
        }
        assert!(sp.zeta_eval(0.0).is_err());
        assert!(ForcingProfile::spliced(-1.0, 0.0).is_err());
    }

    #[test]
    fn step_integrals() {
        let pure = ForcingProfile::pure(-0.5, 1.0).unwrap();
        assert!((pure.zeta_step_integral(0.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        let flat = ForcingProfile::new(0.0, 0.0, 1.0, 1.5, ForcingShape::Spliced).unwrap();
        assert!((flat.zeta_step_integral(1.0, 3.0).unwrap() - 3.0).abs() < 1e-15);
        let sp = ForcingProfile::spliced(-0.5, 1.0).unwrap();
        assert!((sp.zeta_step_integral(0.25, 4.0).unwrap() - 8.5).abs() < 1e-14);
        let inv = ForcingProfile::spliced(0.0, -1.0).unwrap();
        assert!((inv.zeta_step_integral(1.0, std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!(sp.zeta_step_integral(2.0, 1.0).is_err());
    }

    #[test]
    fn step_integrals_are_additive() {
        let sp = ForcingProfile::new(-0.3, 0.7, 1.0, 2.0, ForcingShape::Spliced).unwrap();
        let whole = sp.zeta_step_integral(0.1, 5.0).unwrap();
        let parts = sp.zeta_step_integral(0.1, 0.9).unwrap()
            + sp.zeta_step_integral(0.9, 1.3).unwrap()
            + sp.zeta_step_integral(1.3, 5.0).unwrap();
        assert!((whole - parts).abs() < 1e-13);
    }
}
