//! Ordered data, ordered solutions: a lockstep double run.

use serde::{Deserialize, Serialize};

use super::forcing::ForcingProfile;
use super::mol::{MolStepper, SolverConfig};
use crate::error::{LabError, Result};
use crate::params::Parameters;
use crate::profile::RadialData;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `max_{t, r} (u_low - u_high)_+`.
    pub order_violation: f64,
    pub compared_until: f64,
    pub horizon_reached: bool,
    /// Set when the data or `w` change sign: monotonicity of `|u|^p` is then
    /// not guaranteed and the result is informative only.
    pub advisory: bool,
    pub steps: usize,
    pub note: Option<String>,
}

impl ComparisonReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.order_violation <= tolerance
    }
}

/// Runs both problems with a common step and records the worst inversion.
pub fn comparison_check(
    params: &Parameters,
    forcing: &ForcingProfile,
    u0_low: &dyn RadialData,
    u0_high: &dyn RadialData,
    w: &dyn RadialData,
    config: &SolverConfig,
) -> Result<ComparisonReport> {
    let stepper = MolStepper::new(params, forcing, w, config)?;
    let grid = *stepper.grid();
    let mut low = u0_low.sample(&grid).into_values();
    let mut high = u0_high.sample(&grid).into_values();
    if low.iter().zip(&high).any(|(a, b)| a > b) {
        return Err(LabError::Domain("comparison needs u0_low <= u0_high at every node".into()));
    }
    let w_neg = w.sample(&grid).values().iter().any(|&v| v < 0.0);
    let advisory = w_neg || low.iter().any(|&v| v < 0.0);

    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |a, x| if x.is_nan() { f64::NAN } else { a.max(x.abs()) });
    let violation = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).max(0.0)).fold(0.0, f64::max);

    let (mut t, mut dt, mut steps) = (0.0_f64, stepper.dt_cap(), 0usize);
    let (mut sl, mut sh) = (sup(&low), sup(&high));
    let mut worst = 0.0_f64;
    let mut note = None;
    while t < config.horizon {
        if steps >= config.max_steps {
            note = Some("step budget exhausted".to_string());
            break;
        }
        let hits = config.horizon - t <= dt;
        let h = if hits { config.horizon - t } else { dt };
        let nl = stepper.step(&low, t, h)?;
        let nh = stepper.step(&high, t, h)?;
        let (a, b) = (sup(&nl), sup(&nh));
        if a.is_nan() || b.is_nan() {
            note = Some("numerical overflow".to_string());
            break;
        }
        let growth = ((a - sl) / sl.max(config.growth_floor)).max((b - sh) / sh.max(config.growth_floor));
        if !a.is_finite() || !b.is_finite() || growth > 0.10 {
            dt = h / 2.0;
            if dt < config.dt_min {
                note = Some(format!("time step below dt_min at t = {t}; compared up to the earlier blow-up"));
                break;
            }
            continue;
        }
        t = if hits { config.horizon } else { t + h };
        low = nl;
        high = nh;
        sl = a;
        sh = b;
        steps += 1;
        worst = worst.max(violation(&low, &high));
        if a >= config.blow_cap || b >= config.blow_cap {
            note = Some(format!("cap reached at t = {t}; compared up to the earlier blow-up"));
            break;
        }
        if growth < 0.01 {
            dt = (2.0 * dt).min(stepper.dt_cap());
        }
    }
    Ok(ComparisonReport {
        order_violation: worst,
        compared_until: t,
        horizon_reached: t >= config.horizon,
        advisory,
        steps,
        note,
    })
}
