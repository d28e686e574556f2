//! Problem parameters and the closed-form critical exponents.
//!
//! All formulas take a real dimension `N` so that they can be evaluated for
//! the generalized radial dimension used by the solver; the validity guards
//! are the same as for integer `N`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{LabError, Result};

/// An exponent that may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn is_finite(&self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Exponent::Finite(v) => Some(v),
            Exponent::Infinite => None,
        }
    }

    /// `f64` view, mapping `Infinite` to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// Position of `p` relative to a threshold exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSide {
    Below,
    /// `p` equals the threshold: no theorem decides this case.
    Critical,
    Above,
}

pub fn classify_against(p: f64, threshold: Exponent) -> ThresholdSide {
    match threshold {
        Exponent::Infinite => ThresholdSide::Below,
        Exponent::Finite(thr) => {
            if (p - thr).abs() <= 1e-12 * thr.abs().max(1.0) {
                ThresholdSide::Critical
            } else if p < thr {
                ThresholdSide::Below
            } else {
                ThresholdSide::Above
            }
        }
    }
}

/// The problem tuple `(N, α, p, σ, m, c0, c∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Spatial dimension (real-valued, `≥ 1`).
    pub dim: f64,
    /// Exponent of the spatial weight `|x|^α`.
    pub alpha: f64,
    /// Power of the nonlinearity.
    pub p: f64,
    /// Behaviour of `ζ` near `t = 0`.
    pub sigma: f64,
    /// Behaviour of `ζ` as `t → ∞`.
    pub m: f64,
    pub c0: f64,
    pub c_inf: f64,
}

impl Parameters {
    pub fn new(dim: f64, alpha: f64, p: f64, sigma: f64, m: f64) -> Result<Self> {
        Self::with_scales(dim, alpha, p, sigma, m, 1.0, 1.0)
    }

    pub fn with_scales(
        dim: f64,
        alpha: f64,
        p: f64,
        sigma: f64,
        m: f64,
        c0: f64,
        c_inf: f64,
    ) -> Result<Self> {
        let params = Parameters { dim, alpha, p, sigma, m, c0, c_inf };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.dim, self.alpha, self.p, self.sigma, self.m, self.c0, self.c_inf];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Domain("parameters must be finite".into()));
        }
        if self.dim < 1.0 {
            return Err(LabError::Domain(format!("dimension N = {} < 1", self.dim)));
        }
        if self.p <= 1.0 {
            return Err(LabError::Domain(format!("p = {} must exceed 1", self.p)));
        }
        if self.alpha <= -2.0 {
            return Err(LabError::Domain(format!("alpha = {} must exceed -2", self.alpha)));
        }
        if self.sigma <= -1.0 {
            return Err(LabError::Domain(format!("sigma = {} must exceed -1", self.sigma)));
        }
        if self.c0 <= 0.0 || self.c_inf <= 0.0 {
            return Err(LabError::Domain("forcing scales c0, c_inf must be positive".into()));
        }
        Ok(())
    }

    /// Conjugate exponent `p' = p / (p - 1)`.
    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// Scale-invariant Lebesgue index `p_c = N (p - 1) / (2 + α)`.
    pub fn p_crit_lebesgue(&self) -> f64 {
        self.dim * (self.p - 1.0) / (2.0 + self.alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -2.0) {
        return Err(LabError::Domain(format!("alpha = {alpha} must exceed -2")));
    }
    Ok(())
}

fn check_dim(dim: f64) -> Result<()> {
    if !(dim >= 1.0) || !dim.is_finite() {
        return Err(LabError::Domain(format!("dimension N = {dim} must be >= 1")));
    }
    Ok(())
}

/// Fujita exponent `p_F = 1 + (2 + α) / N`.
pub fn fujita_exponent(dim: f64, alpha: f64) -> Result<f64> {
    check_dim(dim)?;
    check_alpha(alpha)?;
    // One rounding, so (3, 0) gives the double nearest 5/3.
    Ok((dim + 2.0 + alpha) / dim)
}

/// Critical exponent `p*(σ)` of the unweighted problem forced by `t^σ`.
pub fn jks_exponent(dim: f64, sigma: f64) -> Result<Exponent> {
    check_dim(dim)?;
    if !(sigma > -1.0) {
        return Err(LabError::Domain(format!("sigma = {sigma} must exceed -1")));
    }
    if sigma == 0.0 {
        return Err(LabError::NotCovered("sigma = 0 is not covered by the p*(sigma) formula".into()));
    }
    if sigma > 0.0 {
        return Ok(Exponent::Infinite);
    }
    let den = dim - 2.0 * sigma - 2.0;
    if den <= 0.0 {
        return Err(LabError::Domain(format!(
            "N - 2 sigma - 2 = {den} <= 0: formula degenerate"
        )));
    }
    Ok(Exponent::Finite((dim - 2.0 * sigma) / den))
}

/// Upper end of the blow-up range for forcing that behaves like `t^m` at
/// infinity: every `1 < p <` threshold forbids global solutions when
/// `∫ w > 0`.
pub fn blowup_threshold(dim: f64, alpha: f64, m: f64) -> Result<Exponent> {
    check_dim(dim)?;
    check_alpha(alpha)?;
    if !m.is_finite() {
        return Err(LabError::Domain("m must be finite".into()));
    }
    if m > 0.0 {
        return Ok(Exponent::Infinite);
    }
    let low_dim = dim == 1.0 || dim == 2.0;
    let covered = (dim >= 3.0 && m <= 0.0) || (low_dim && m < dim / 2.0 - 1.0);
    if !covered {
        return Err(LabError::NotCovered(format!(
            "no blow-up threshold is known for N = {dim}, m = {m}"
        )));
    }
    let den = dim - 2.0 * m - 2.0;
    Ok(Exponent::Finite((dim - 2.0 * m + alpha) / den))
}

/// Exponents attached to small-data global existence for `ζ(t) = t^σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub p_fujita: f64,
    /// `None` when the formula is degenerate or not covered for these inputs.
    pub p_jks: Option<Exponent>,
    pub p_blow_threshold: Option<Exponent>,
    /// `1 + (2 + α) / (N - 2(σ + 1))`.
    pub p_global_min: f64,
    /// `p_c = N (p - 1) / (2 + α)`.
    pub p_crit_lebesgue: f64,
    /// `ℓ = N p_c / (N + 2 (σ + 1) p_c)`.
    pub ell_lebesgue: f64,
    /// Whether `p ≥ p_global_min`.
    pub p_in_global_range: bool,
}

/// Fills an [`ExponentReport`]. Requires `-2 < α < 0`, `-1 < σ < 0`, `N ≥ 2`.
pub fn global_existence_exponents(params: &Parameters) -> Result<ExponentReport> {
    let Parameters { dim, alpha, p, sigma, m, .. } = *params;
    if !(dim >= 2.0) {
        return Err(LabError::Domain(format!("global existence needs N >= 2, got {dim}")));
    }
    if !(alpha > -2.0 && alpha < 0.0) {
        return Err(LabError::Domain(format!("global existence needs -2 < alpha < 0, got {alpha}")));
    }
    if !(sigma > -1.0 && sigma < 0.0) {
        return Err(LabError::Domain(format!("global existence needs -1 < sigma < 0, got {sigma}")));
    }
    if !(p > 1.0) {
        return Err(LabError::Domain(format!("p = {p} must exceed 1")));
    }
    let den = dim - 2.0 * (sigma + 1.0);
    if den <= 0.0 {
        return Err(LabError::Domain(format!("N - 2(sigma + 1) = {den} <= 0")));
    }
    let p_global_min = 1.0 + (2.0 + alpha) / den;
    let p_c = dim * (p - 1.0) / (2.0 + alpha);
    let ell = dim * p_c / (dim + 2.0 * (sigma + 1.0) * p_c);
    Ok(ExponentReport {
        p_fujita: fujita_exponent(dim, alpha)?,
        p_jks: jks_exponent(dim, sigma).ok(),
        p_blow_threshold: blowup_threshold(dim, alpha, m).ok(),
        p_global_min,
        p_crit_lebesgue: p_c,
        ell_lebesgue: ell,
        p_in_global_range: p >= p_global_min,
    })
}
