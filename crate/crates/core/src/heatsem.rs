//! Heat semigroup on radial fields and checks of its smoothing estimates.
//!
//! `e^{tΔ}` acts by convolution with `G_t(x) = (4πt)^{-N/2} e^{-|x|²/4t}`.
//! Two exact radial paths are implemented:
//!
//! - `N = 1`: even extension, `u(r) = ∫_0^∞ [K_t(r-s) + K_t(r+s)] φ(s) ds`;
//! - `N = 3`: with `v = r u` the problem is one-dimensional with odd
//!   extension, `u(r) = r^{-1} ∫_0^∞ [K_t(r-s) - K_t(r+s)] s φ(s) ds`,
//!
//! where `K_t` is the one-dimensional kernel. Both integrals use the
//! cell-centred midpoint rule, which for these symmetric extensions is the
//! trapezoid rule on the whole line. Other dimensions go through the
//! method-of-lines solver in [`crate::evolve`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{LabError, Result};
use crate::grid::{lq_norm, RadialField, RadialGrid};
use crate::quad::GaussLegendre;

/// Kernel exponents beyond this are treated as exact zeros (e^{-50} ~ 2e-22).
const KERNEL_EXP_CUTOFF: f64 = 50.0;

/// The heat kernel `G_t` in dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub dim: f64,
    pub t: f64,
}

impl KernelSpec {
    pub fn new(dim: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(LabError::Domain(format!("heat kernel needs t > 0, got {t}")));
        }
        Ok(KernelSpec { dim, t })
    }

    pub fn eval(&self, r: f64) -> f64 {
        (4.0 * PI * self.t).powf(-self.dim / 2.0) * (-r * r / (4.0 * self.t)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExactPath {
    Line,
    Sphere,
}

fn exact_path(dim: f64) -> Result<ExactPath> {
    if dim == 1.0 {
        Ok(ExactPath::Line)
    } else if dim == 3.0 {
        Ok(ExactPath::Sphere)
    } else {
        Err(LabError::Unsupported(format!(
            "exact semigroup path exists only for N = 1 and N = 3 (got N = {dim}); use the MOL solver instead"
        )))
    }
}

/// Whether `semigroup_apply` has an exact path for this dimension.
pub fn has_exact_path(dim: f64) -> bool {
    exact_path(dim).is_ok()
}

/// Quadrature weight coupling output radius `r` to input node `s`.
#[inline]
fn coupling(path: ExactPath, r: f64, s: f64, t: f64, h: f64) -> f64 {
    let norm = (4.0 * PI * t).sqrt().recip();
    let d = r - s;
    let near = norm * (-d * d / (4.0 * t)).exp();
    match path {
        ExactPath::Line => {
            let e = r + s;
            h * (near + norm * (-e * e / (4.0 * t)).exp())
        }
        ExactPath::Sphere => {
            // K(r-s) - K(r+s) = K(r-s) (1 - e^{-rs/t})
            if r == 0.0 {
                h * s * (s / t) * near
            } else {
                h * (s / r) * near * (-(-r * s / t).exp_m1())
            }
        }
    }
}

fn node_window(grid: &RadialGrid, r: f64, t: f64) -> (usize, usize) {
    let h = grid.spacing();
    let cut = (4.0 * t * KERNEL_EXP_CUTOFF).sqrt();
    let lo = ((r - cut) / h - 0.5).ceil().max(0.0) as usize;
    let hi = (((r + cut) / h - 0.5).floor().max(-1.0) + 1.0) as usize;
    (lo.min(grid.cells()), hi.min(grid.cells()))
}

/// `(e^{tΔ} φ)(r)` at an arbitrary radius `r ≥ 0`; the data are taken as
/// zero beyond the grid radius.
pub fn semigroup_eval(field: &RadialField, t: f64, r: f64) -> Result<f64> {
    let grid = field.grid();
    let path = exact_path(grid.dim())?;
    if t < 0.0 || r < 0.0 {
        return Err(LabError::Domain("semigroup evaluation needs t >= 0 and r >= 0".into()));
    }
    if t == 0.0 {
        return Ok(field.interpolate(r));
    }
    let h = grid.spacing();
    let (lo, hi) = node_window(grid, r, t);
    let vals = field.values();
    Ok((lo..hi).map(|j| coupling(path, r, grid.node(j), t, h) * vals[j]).sum())
}

/// `e^{tΔ} φ` sampled on the grid of `φ`.
pub fn semigroup_apply(field: &RadialField, t: f64) -> Result<RadialField> {
    let grid = *field.grid();
    let path = exact_path(grid.dim())?;
    if !(t >= 0.0) {
        return Err(LabError::Domain(format!("semigroup needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    let h = grid.spacing();
    let vals = field.values();
    let out: Vec<f64> = (0..grid.cells())
        .map(|i| {
            let r = grid.node(i);
            let (lo, hi) = node_window(&grid, r, t);
            (lo..hi).map(|j| coupling(path, r, grid.node(j), t, h) * vals[j]).sum()
        })
        .collect();
    RadialField::new(grid, out)
}

/// Banded matrix of `e^{tΔ}` for repeated application. Row `i` holds the
/// couplings to nodes `start[i]..start[i] + len` inside the kernel window.
#[derive(Debug, Clone)]
pub struct HeatOperator {
    grid: RadialGrid,
    t: f64,
    start: Vec<usize>,
    offsets: Vec<usize>,
    coeffs: Vec<f64>,
}

impl HeatOperator {
    pub fn new(grid: RadialGrid, t: f64) -> Result<Self> {
        let path = exact_path(grid.dim())?;
        if !(t >= 0.0) {
            return Err(LabError::Domain(format!("semigroup needs t >= 0, got {t}")));
        }
        let m = grid.cells();
        let h = grid.spacing();
        let mut start = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m + 1);
        let mut coeffs = Vec::new();
        offsets.push(0);
        for i in 0..m {
            if t == 0.0 {
                start.push(i);
                coeffs.push(1.0);
            } else {
                let r = grid.node(i);
                let (lo, hi) = node_window(&grid, r, t);
                start.push(lo);
                coeffs.extend((lo..hi).map(|j| coupling(path, r, grid.node(j), t, h)));
            }
            offsets.push(coeffs.len());
        }
        Ok(HeatOperator { grid, t, start, offsets, coeffs })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        let row = &self.coeffs[self.offsets[i]..self.offsets[i + 1]];
        row.iter().zip(&v[self.start[i]..]).map(|(a, b)| a * b).sum()
    }

    pub fn apply_values(&self, v: &[f64]) -> Vec<f64> {
        (0..self.grid.cells()).map(|i| self.row_dot(i, v)).collect()
    }

    /// `out += c · e^{tΔ} v`.
    pub fn apply_accumulate(&self, v: &[f64], c: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o += c * self.row_dot(i, v);
        }
    }
}

fn check_gamma(dim: f64, gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) {
        return Err(LabError::Domain(format!("gamma = {gamma} must be >= 0")));
    }
    if gamma >= dim {
        return Err(LabError::Domain(format!("gamma = {gamma} must be < N = {dim}")));
    }
    Ok(())
}

/// `S_γ(t) φ = e^{tΔ}(|·|^{-γ} φ)`.
pub fn smoothing_apply(field: &RadialField, gamma: f64, t: f64) -> Result<RadialField> {
    check_gamma(field.grid().dim(), gamma)?;
    if !(t > 0.0) {
        return Err(LabError::Domain(format!("smoothing operator needs t > 0, got {t}")));
    }
    if gamma == 0.0 {
        return semigroup_apply(field, t);
    }
    semigroup_apply(&field.map(|r, v| r.powf(-gamma) * v), t)
}

/// `(S_γ(t) φ)(r)` at an arbitrary radius.
pub fn smoothing_eval(field: &RadialField, gamma: f64, t: f64, r: f64) -> Result<f64> {
    check_gamma(field.grid().dim(), gamma)?;
    semigroup_eval(&field.map(|s, v| s.powf(-gamma) * v), t, r)
}

/// Exponent pair `(q1, q2)` and weight `γ` of a smoothing estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingExponents {
    pub dim: f64,
    pub gamma: f64,
    pub q1: f64,
    pub q2: f64,
    /// `1/q2 = γ/N + 1/q1`: accepted, but reported separately.
    pub endpoint: bool,
}

impl SmoothingExponents {
    /// Validates the admissibility conditions of the estimate. For `γ > 0`:
    /// `0 < γ < N`, `1 < q1, q2 ≤ ∞`, `1/q2 < γ/N + 1/q1 < 1` (the left
    /// inequality may be an equality when both `q1, q2 < ∞`). For `γ = 0`:
    /// `1 ≤ q1 ≤ q2 ≤ ∞`.
    pub fn new(dim: f64, gamma: f64, q1: f64, q2: f64) -> Result<Self> {
        check_gamma(dim, gamma)?;
        if q1.is_nan() || q2.is_nan() {
            return Err(LabError::Domain("q1, q2 must be numbers".into()));
        }
        if gamma == 0.0 {
            if !(q1 >= 1.0) {
                return Err(LabError::Domain(format!("gamma = 0 needs 1 <= q1, got q1 = {q1}")));
            }
            if !(q1 <= q2) {
                return Err(LabError::Domain(format!("gamma = 0 needs q1 <= q2, got q1 = {q1}, q2 = {q2}")));
            }
            return Ok(SmoothingExponents { dim, gamma, q1, q2, endpoint: false });
        }
        if !(q1 > 1.0) || !(q2 > 1.0) {
            return Err(LabError::Domain(format!("gamma > 0 needs 1 < q1, q2; got q1 = {q1}, q2 = {q2}")));
        }
        let mid = gamma / dim + 1.0 / q1;
        let inv_q2 = 1.0 / q2;
        if !(mid < 1.0) {
            return Err(LabError::Domain(format!(
                "violates gamma/N + 1/q1 < 1: gamma/N + 1/q1 = {mid}"
            )));
        }
        let tol = 1e-14;
        let endpoint = (inv_q2 - mid).abs() <= tol;
        if endpoint {
            if q1.is_infinite() || q2.is_infinite() {
                return Err(LabError::Domain(
                    "endpoint 1/q2 = gamma/N + 1/q1 needs finite q1 and q2".into(),
                ));
            }
        } else if !(inv_q2 < mid) {
            return Err(LabError::Domain(format!(
                "violates 1/q2 < gamma/N + 1/q1: 1/q2 = {inv_q2}, gamma/N + 1/q1 = {mid}"
            )));
        }
        Ok(SmoothingExponents { dim, gamma, q1, q2, endpoint })
    }

    /// `(N/2)(1/q1 - 1/q2) + γ/2`, the power of `t` that compensates the decay.
    pub fn compensating_power(&self) -> f64 {
        0.5 * self.dim * (1.0 / self.q1 - 1.0 / self.q2) + 0.5 * self.gamma
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRow {
    pub field: usize,
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub exponents: SmoothingExponents,
    pub rows: Vec<SmoothingRow>,
    /// Empirical constant: sup over all rows.
    pub sup_ratio: f64,
    /// Per field, `max_t ratio / min_t ratio`.
    pub variation: Vec<f64>,
}

impl SmoothingReport {
    pub fn max_variation(&self) -> f64 {
        self.variation.iter().cloned().fold(1.0, f64::max)
    }

    /// CSV with columns `gamma,q1,q2,t,ratio`, field-major row order.
    pub fn to_csv(&self) -> String {
        let e = &self.exponents;
        let mut out = String::from("# smoothing-estimate v1\ngamma,q1,q2,t,ratio\n");
        for row in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", e.gamma, e.q1, e.q2, row.t, row.ratio);
        }
        out
    }
}

/// Compensated ratios `‖S_γ(t)φ‖_{q2} t^{(N/2)(1/q1-1/q2)+γ/2} / ‖φ‖_{q1}`
/// over every `(φ, t)` pair.
pub fn verify_smoothing_estimate(
    exponents: SmoothingExponents,
    times: &[f64],
    fields: &[RadialField],
) -> Result<SmoothingReport> {
    if times.iter().any(|&t| !(t > 0.0)) {
        return Err(LabError::Domain("smoothing check needs t > 0".into()));
    }
    for f in fields {
        if f.grid().dim() != exponents.dim {
            return Err(LabError::Domain("test field dimension differs from N".into()));
        }
    }
    let power = exponents.compensating_power();
    let pairs: Vec<(usize, f64)> =
        (0..fields.len()).flat_map(|i| times.iter().map(move |&t| (i, t))).collect();
    let rows: Vec<SmoothingRow> = pairs
        .par_iter()
        .map(|&(i, t)| {
            let phi = &fields[i];
            let den = lq_norm(phi, exponents.q1)?;
            if den == 0.0 {
                return Err(LabError::Domain(format!("test field {i} has zero L^q1 norm")));
            }
            let out = smoothing_apply(phi, exponents.gamma, t)?;
            let num = lq_norm(&out, exponents.q2)?;
            Ok(SmoothingRow { field: i, t, ratio: num * t.powf(power) / den })
        })
        .collect::<Result<_>>()?;
    let sup_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let variation = (0..fields.len())
        .map(|i| {
            let (lo, hi) = rows
                .iter()
                .filter(|r| r.field == i)
                .fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
            hi / lo
        })
        .collect();
    Ok(SmoothingReport { exponents, rows, sup_ratio, variation })
}

/// Five fixed test fields: `e^{-r²}`, `e^{-4r²}`, a unit bump,
/// `r² e^{-r²}` and `(1 - r²) e^{-r²}`.
pub fn standard_test_fields(grid: RadialGrid) -> Vec<RadialField> {
    let bump = |r: f64| if r < 1.0 { (1.0 - 1.0 / (1.0 - r * r)).exp() } else { 0.0 };
    vec![
        RadialField::from_fn(grid, |r| (-r * r).exp()),
        RadialField::from_fn(grid, |r| (-4.0 * r * r).exp()),
        RadialField::from_fn(grid, bump),
        RadialField::from_fn(grid, |r| r * r * (-r * r).exp()),
        RadialField::from_fn(grid, |r| (1.0 - r * r) * (-r * r).exp()),
    ]
}

/// Five near-critical fields `r^{-(N/q1 - ε)} (1 + r²)^{-ε}`,
/// `ε ∈ {0.05, 0.1, 0.15, 0.2, 0.25}`: homogeneous of degree `-N/q1` up to
/// `r^{±ε}` at both ends, so their compensated smoothing ratio stays close
/// to the optimal constant at every time scale. Compactly supported fields
/// only probe the scale of their support.
pub fn critical_test_fields(grid: RadialGrid, q1: f64) -> Vec<RadialField> {
    let n = grid.dim();
    let inv = if q1.is_infinite() { 0.0 } else { 1.0 / q1 };
    [0.05, 0.1, 0.15, 0.2, 0.25]
        .iter()
        .map(|&eps| {
            let a = (n * inv - eps).max(0.0);
            RadialField::from_fn(grid, move |r| r.powf(-a) * (1.0 + r * r).powf(-eps))
        })
        .collect()
}

/// `count` log-spaced times from `t_lo` to `t_hi`.
pub fn log_times(t_lo: f64, t_hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![t_lo];
    }
    let (a, b) = (t_lo.ln(), t_hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelWeightReport {
    pub dim: f64,
    pub gamma: f64,
    pub kappa: f64,
    /// `sup_{x, λ} (1 + |x|)^γ ∫ e^{-|z|²} (1 + |x - λz|)^{-γ} dz`.
    pub sup_ratio: f64,
    pub argmax_x: f64,
    pub argmax_lambda: f64,
}

/// `∫_{ℝ^N} e^{-|z|²} (1 + |x - λz|)^{-γ} dz` for `N ∈ {1, 3}`.
pub fn kernel_weight_integral(dim: f64, gamma: f64, x: f64, lambda: f64) -> Result<f64> {
    const ZMAX: f64 = 9.0;
    let gl = GaussLegendre::new(10);
    let x = x.abs();
    match exact_path(dim)? {
        ExactPath::Line => {
            let f = |z: f64| (-z * z).exp() * (1.0 + (x - lambda * z).abs()).powf(-gamma);
            let mut breaks = vec![-ZMAX, 0.0, ZMAX];
            if lambda > 0.0 && x / lambda < ZMAX {
                breaks.insert(2, x / lambda);
            }
            breaks.dedup();
            Ok(gl.composite(&breaks, 24, f))
        }
        ExactPath::Sphere => {
            // angular average: ∫_{-1}^{1} (1 + d(c))^{-γ} dc = (1/(xλρ)) ∫_{|x-λρ|}^{x+λρ} d (1+d)^{-γ} dd
            let angular = |rho: f64| -> f64 {
                let lr = lambda * rho;
                let prod = x * lr;
                if prod <= 1e-12 * (1.0 + x * x + lr * lr) {
                    return 2.0 * (1.0 + x.max(lr)).powf(-gamma);
                }
                let (a, b) = ((x - lr).abs(), x + lr);
                // geometric panels in 1 + d keep the rule accurate for large d
                let mut breaks = vec![a];
                let mut edge = a;
                while (1.0 + b) / (1.0 + edge) > 2.0 {
                    edge = 2.0 * (1.0 + edge) - 1.0;
                    breaks.push(edge);
                }
                breaks.push(b);
                gl.composite(&breaks, 1, |d| d * (1.0 + d).powf(-gamma)) / prod
            };
            let f = |rho: f64| rho * rho * (-rho * rho).exp() * angular(rho);
            let mut breaks = vec![0.0, ZMAX];
            if lambda > 0.0 && x / lambda < ZMAX {
                breaks.insert(1, x / lambda);
            }
            breaks.dedup();
            Ok(2.0 * PI * gl.composite(&breaks, 16, f))
        }
    }
}

/// Supremum of `(1 + |x|)^γ ∫ e^{-|z|²}(1 + |x - λz|)^{-γ} dz` over the grids.
pub fn verify_kernel_weight_bound(
    dim: f64,
    gamma: f64,
    kappa: f64,
    xs: &[f64],
    lambdas: &[f64],
) -> Result<KernelWeightReport> {
    if !(gamma > 0.0) || !(kappa > 0.0) {
        return Err(LabError::Domain("kernel weight bound needs gamma, kappa > 0".into()));
    }
    if let Some(&l) = lambdas.iter().find(|&&l| !(0.0..=kappa).contains(&l)) {
        return Err(LabError::Domain(format!("lambda = {l} outside [0, kappa = {kappa}]")));
    }
    exact_path(dim)?;
    let pairs: Vec<(f64, f64)> = xs.iter().flat_map(|&x| lambdas.iter().map(move |&l| (x, l))).collect();
    let ratios: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|&(x, l)| {
            let lhs = kernel_weight_integral(dim, gamma, x, l)?;
            Ok((x, l, lhs * (1.0 + x.abs()).powf(gamma)))
        })
        .collect::<Result<_>>()?;
    let (argmax_x, argmax_lambda, sup_ratio) =
        ratios.into_iter().fold((0.0, 0.0, 0.0), |best, cur| if cur.2 > best.2 { cur } else { best });
    Ok(KernelWeightReport { dim, gamma, kappa, sup_ratio, argmax_x, argmax_lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{Profile, RadialData};
    use statrs::function::erf::erf;

    fn gaussian_field(grid: RadialGrid, s: f64) -> RadialField {
        RadialField::from_fn(grid, |r| (-r * r / (4.0 * s)).exp())
    }

    #[test]
    fn constants_are_preserved_away_from_the_truncation() {
        for dim in [1.0, 3.0] {
            let g = RadialGrid::new(dim, 40.0, 800).unwrap();
            let c = RadialField::from_fn(g, |_| 2.5);
            let out = semigroup_apply(&c, 1.0).unwrap();
            for (r, v) in g.nodes().zip(out.values()) {
                if r < 20.0 {
                    assert!((v - 2.5).abs() < 1e-10, "N={dim} r={r} v={v}");
                }
            }
        }
    }

    #[test]
    fn gaussian_reproduces_itself() {
        let (s, t) = (1.0, 1.0);
        let g = RadialGrid::new(3.0, 25.0, 4000).unwrap();
        let out = semigroup_apply(&gaussian_field(g, s), t).unwrap();
        let exact = |r: f64| (s / (s + t)).powf(1.5) * (-r * r / (4.0 * (s + t))).exp();
        let mut err = 0.0_f64;
        for (r, v) in g.nodes().zip(out.values()) {
            err = err.max((v - exact(r)).abs());
        }
        assert!(err / exact(0.0) < 1e-6, "relative sup error {err}");
    }

    #[test]
    fn indicator_at_origin_is_an_error_function() {
        let g = RadialGrid::new(1.0, 10.0, 2000).unwrap();
        let ind = RadialField::from_fn(g, |r| if r < 1.0 { 1.0 } else { 0.0 });
        let v = semigroup_eval(&ind, 1.0, 0.0).unwrap();
        assert!((v - erf(0.5)).abs() < 1e-5, "{v}");
    }

    #[test]
    fn smoothing_value_at_origin() {
        // (4π)^{-3/2} 4π ∫ r e^{-5r²/4} dr = (4π)^{-3/2} 4π (2/5)
        let g = RadialGrid::new(3.0, 12.0, 4800).unwrap();
        let phi = Profile::Gaussian { a: 1.0 }.sample(&g);
        let v = smoothing_eval(&phi, 1.0, 1.0, 0.0).unwrap();
        let expect = (4.0 * PI).powf(-1.5) * 4.0 * PI * 0.4;
        assert!((v - expect).abs() < 1e-5, "{v} vs {expect}");
    }

    #[test]
    fn smoothing_with_zero_gamma_is_the_semigroup() {
        let g = RadialGrid::new(1.0, 10.0, 200).unwrap();
        let phi = Profile::Gaussian { a: 1.0 }.sample(&g);
        assert_eq!(smoothing_apply(&phi, 0.0, 0.5).unwrap(), semigroup_apply(&phi, 0.5).unwrap());
        let z = RadialField::zeros(g);
        assert!(smoothing_apply(&z, 0.5, 0.5).unwrap().values().iter().all(|&v| v == 0.0));
        assert!(smoothing_apply(&phi, 1.0, 0.5).is_err());
    }

    #[test]
    fn unsupported_dimension_is_reported() {
        let g = RadialGrid::new(2.0, 10.0, 200).unwrap();
        let phi = RadialField::zeros(g);
        assert!(matches!(semigroup_apply(&phi, 1.0), Err(LabError::Unsupported(_))));
    }

    #[test]
    fn semigroup_property() {
        for dim in [1.0, 3.0] {
            let g = RadialGrid::new(dim, 30.0, 1500).unwrap();
            for phi in [
                gaussian_field(g, 0.5),
                Profile::Bump { a: 1.0, r0: 2.0 }.sample(&g),
            ] {
                let two = semigroup_apply(&semigroup_apply(&phi, 0.4).unwrap(), 0.6).unwrap();
                let one = semigroup_apply(&phi, 1.0).unwrap();
                let diff = two.values().iter().zip(one.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(diff < 1e-9, "N={dim} diff={diff}");
            }
        }
    }

    #[test]
    fn positivity_and_mass() {
        let g = RadialGrid::new(1.0, 40.0, 2000).unwrap();
        let phi = Profile::Bump { a: 1.0, r0: 3.0 }.sample(&g);
        let out = semigroup_apply(&phi, 2.0).unwrap();
        assert!(out.values().iter().all(|&v| v >= 0.0));
        assert!((out.integral() - phi.integral()).abs() < 1e-8 * phi.integral());
    }

    #[test]
    fn smoothing_preconditions() {
        assert!(SmoothingExponents::new(3.0, 1.0, 2.0, 3.0).is_ok());
        assert!(SmoothingExponents::new(3.0, 1.0, 4.0, 2.0).is_ok());
        assert!(SmoothingExponents::new(1.0, 0.0, 1.0, f64::INFINITY).is_ok());
        // 1/q2 = 1/1.1 > γ/N + 1/q1 = 1/3 + 1/2
        let err = SmoothingExponents::new(3.0, 1.0, 2.0, 1.1).unwrap_err();
        assert!(err.to_string().contains("1/q2 < gamma/N + 1/q1"), "{err}");
        let err = SmoothingExponents::new(3.0, 2.0, 1.5, 3.0).unwrap_err();
        assert!(err.to_string().contains("gamma/N + 1/q1 < 1"), "{err}");
        assert!(SmoothingExponents::new(3.0, 0.0, 3.0, 2.0).is_err());
        let e = SmoothingExponents::new(3.0, 1.0, 3.0, 1.5).unwrap();
        assert!(e.endpoint);
    }

    #[test]
    fn contraction_for_equal_exponents() {
        let g = RadialGrid::new(1.0, 30.0, 1500).unwrap();
        let fields = vec![gaussian_field(g, 0.25), Profile::Bump { a: 1.0, r0: 2.0 }.sample(&g)];
        let e = SmoothingExponents::new(1.0, 0.0, 2.0, 2.0).unwrap();
        let rep = verify_smoothing_estimate(e, &[0.01, 0.1, 1.0, 10.0], &fields).unwrap();
        assert!(rep.sup_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn gaussian_l1_to_linf_ratio_matches_closed_form() {
        // φ = G_s: ratio(t) = (4π(s+t))^{-1/2} t^{1/2}
        let s = 0.05;
        let g = RadialGrid::new(1.0, 60.0, 6000).unwrap();
        let phi = RadialField::from_fn(g, |r| KernelSpec::new(1.0, s).unwrap().eval(r));
        let e = SmoothingExponents::new(1.0, 0.0, 1.0, f64::INFINITY).unwrap();
        let times = [0.01, 0.1, 1.0, 10.0];
        let rep = verify_smoothing_estimate(e, &times, &[phi]).unwrap();
        for row in &rep.rows {
            let expect = (4.0 * PI * (s + row.t)).powf(-0.5) * row.t.sqrt();
            assert!((row.ratio - expect).abs() < 1e-3 * expect, "{row:?} vs {expect}");
            assert!(row.ratio <= (4.0 * PI).powf(-0.5));
        }
    }

    #[test]
    fn kernel_weight_without_shift() {
        for dim in [1.0, 3.0] {
            for x in [0.0, 1.0, 7.5] {
                let lhs = kernel_weight_integral(dim, 1.5, x, 0.0).unwrap();
                let expect = PI.powf(dim / 2.0) * (1.0 + x).powf(-1.5);
                assert!((lhs - expect).abs() < 1e-10 * expect, "N={dim} x={x}: {lhs} vs {expect}");
            }
            let at0 = kernel_weight_integral(dim, 1.0, 0.0, 1.7).unwrap();
            assert!(at0 <= PI.powf(dim / 2.0));
        }
        assert!(verify_kernel_weight_bound(1.0, 1.0, 2.0, &[1.0], &[2.5]).is_err());
    }
}
