//! Picard iteration of the mild formulation
//!
//! ```text
//! u(t) = e^{tΔ} u0 + ∫_0^t e^{(t-s)Δ} |·|^α |u(s)|^p ds + ∫_0^t e^{(t-s)Δ} ζ(s) w ds
//! ```
//!
//! on a uniform coarse time grid, with the exact semigroup of
//! [`crate::heatsem`]. The nonlinear Duhamel term uses the trapezoid rule in
//! `s`; the forcing term uses `e^{(t-s)Δ}` at the midpoint of each step times
//! the exact integral of `ζ` over the step.

use serde::{Deserialize, Serialize};

use super::forcing::ForcingProfile;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::heatsem::{semigroup_apply, HeatOperator};
use crate::params::Parameters;
use crate::profile::RadialData;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub radius: f64,
    pub cells: usize,
    pub horizon: f64,
    /// Number of uniform time steps on `[0, horizon]`.
    pub steps: usize,
    pub iterations: usize,
    pub include_nonlinearity: bool,
    /// Iterates whose sup-norm exceeds this are reported as divergent.
    pub cap: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            radius: 16.0,
            cells: 320,
            horizon: 0.25,
            steps: 25,
            iterations: 8,
            include_nonlinearity: true,
            cap: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub times: Vec<f64>,
    /// `iterates[k][i]` is `u^{(k)}(t_i)`; `u^{(0)}(t) = e^{tΔ} u0`.
    pub iterates: Vec<Vec<RadialField>>,
    /// `d(u^{(k+1)}, u^{(k)})`, sup over time and space.
    pub differences: Vec<f64>,
    /// `d(u^{(k+1)}, u^{(k)}) / d(u^{(k)}, u^{(k-1)})`.
    pub contraction_ratios: Vec<f64>,
    /// Iteration at which an iterate exceeded the cap.
    pub diverged_at: Option<usize>,
}

impl PicardReport {
    pub fn final_trajectory(&self) -> &[RadialField] {
        self.iterates.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Last iterate at the final time.
    pub fn terminal(&self) -> Option<&RadialField> {
        self.final_trajectory().last()
    }
}

fn trajectory_distance(a: &[RadialField], b: &[RadialField]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.values().iter().zip(y.values()).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

pub fn picard_iterate(
    params: &Parameters,
    forcing: &ForcingProfile,
    u0: &dyn RadialData,
    w: &dyn RadialData,
    config: &PicardConfig,
) -> Result<PicardReport> {
    params.validate()?;
    if !(config.horizon > 0.0) || config.steps == 0 {
        return Err(LabError::Domain("Picard iteration needs T > 0 and at least one step".into()));
    }
    let grid = RadialGrid::new(params.dim, config.radius, config.cells)?;
    let n = config.steps;
    let dt = config.horizon / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let ops: Vec<HeatOperator> = (0..=n).into_par_iter().map(|l| HeatOperator::new(grid, l as f64 * dt)).collect::<Result<_>>()?;

    let u0 = u0.sample(&grid);
    let linear: Vec<Vec<f64>> = ops.iter().map(|op| op.apply_values(u0.values())).collect();

    let w = w.sample(&grid);
    let m = grid.cells();
    let mut forced = vec![vec![0.0; m]; n + 1];
    if w.values().iter().any(|&v| v != 0.0) {
        let mid: Vec<RadialField> =
            (1..=n).map(|l| semigroup_apply(&w, (l as f64 - 0.5) * dt)).collect::<Result<_>>()?;
        let z: Vec<f64> = (1..=n).map(|j| forcing.zeta_step_integral(times[j - 1], times[j])).collect::<Result<_>>()?;
        for i in 1..=n {
            for j in 1..=i {
                let src = mid[i - j].values();
                for (o, v) in forced[i].iter_mut().zip(src) {
                    *o += z[j - 1] * v;
                }
            }
        }
    }

    let weight: Vec<f64> = grid.nodes().map(|r| r.powf(params.alpha)).collect();
    let to_fields = |vs: Vec<Vec<f64>>| -> Result<Vec<RadialField>> {
        vs.into_iter().map(|v| RadialField::new(grid, v)).collect()
    };
    let mut iterates = vec![to_fields(linear.clone())?];
    let mut differences = Vec::new();
    let mut contraction_ratios = Vec::new();
    let mut diverged_at = None;

    for k in 0..config.iterations {
        let prev = &iterates[k];
        let source: Vec<Vec<f64>> = prev
            .iter()
            .map(|u| {
                if config.include_nonlinearity {
                    u.values().iter().zip(&weight).map(|(v, a)| a * v.abs().powf(params.p)).collect()
                } else {
                    vec![0.0; m]
                }
            })
            .collect();
        let next: Vec<Vec<f64>> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let mut v: Vec<f64> = linear[i].iter().zip(&forced[i]).map(|(a, b)| a + b).collect();
                if config.include_nonlinearity && i > 0 {
                    ops[i].apply_accumulate(&source[0], 0.5 * dt, &mut v);
                    for j in 1..i {
                        ops[i - j].apply_accumulate(&source[j], dt, &mut v);
                    }
                    for (o, s) in v.iter_mut().zip(&source[i]) {
                        *o += 0.5 * dt * s;
                    }
                }
                v
            })
            .collect();
        let next = to_fields(next)?;
        let d = trajectory_distance(&next, prev);
        if let Some(&last) = differences.last() {
            contraction_ratios.push(if last > 0.0 { d / last } else { 0.0 });
        }
        differences.push(d);
        let sup = next.iter().map(RadialField::sup_norm).fold(0.0, f64::max);
        iterates.push(next);
        if !(sup <= config.cap) {
            log::warn!("Picard iterate {} exceeded the cap {}", k + 1, config.cap);
            diverged_at = Some(k + 1);
            break;
        }
    }
    Ok(PicardReport { times, iterates, differences, contraction_ratios, diverged_at })
}
