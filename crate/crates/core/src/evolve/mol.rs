//! Method-of-lines solver for the radial problem
//!
//! ```text
//! u_t = u_rr + ((N-1)/r) u_r + r^α |u|^p + ζ(t) w(r),   u_r(0) = 0,   u(R) = 0
//! ```
//!
//! Space: conservative finite volumes on the cell-centred grid. Time: the
//! diffusion is treated with the θ-method (one tridiagonal solve per step),
//! the reaction explicitly through the exact flow of `u' = r^α |u|^p` over
//! the step, and the forcing through `w ∫ζ` added after the solve.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::forcing::ForcingProfile;
use crate::digest::content_hash;
use crate::error::{LabError, Result};
use crate::grid::{lq_norm, RadialField, RadialGrid};
use crate::params::Parameters;
use crate::profile::RadialData;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// θ-weighted implicit diffusion, `θ ∈ [1/2, 1]`.
    Imex { theta: f64 },
    /// Heun's method on the whole right-hand side; `dt ≤ safety · h²/2`.
    ExplicitRk2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub radius: f64,
    pub cells: usize,
    pub dt_init: f64,
    pub dt_min: f64,
    pub safety: f64,
    /// `U_max`: sup-norm at which a run stops and blow-up is assessed.
    pub blow_cap: f64,
    pub horizon: f64,
    pub scheme: Scheme,
    pub max_steps: usize,
    /// Sup-norm floor below which step growth is measured absolutely.
    pub growth_floor: f64,
    pub snapshot_times: Vec<f64>,
    /// Re-run with `(h, dt)/2` and `2R`; downgrade a global candidate whose
    /// terminal sup-norm moves by more than 1%.
    pub convergence_gate: bool,
    /// Include the `r^α |u|^p` term.
    pub reaction: bool,
    /// Extra `L^r` norm recorded in the trace.
    pub trace_lr: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            radius: 40.0,
            cells: 800,
            dt_init: 1e-2,
            dt_min: 1e-12,
            safety: 0.8,
            blow_cap: 1e8,
            horizon: 10.0,
            scheme: Scheme::Imex { theta: 1.0 },
            max_steps: 2_000_000,
            growth_floor: 1e-3,
            snapshot_times: Vec::new(),
            convergence_gate: false,
            reaction: true,
            trace_lr: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_min > 0.0) || !(self.dt_init >= self.dt_min) {
            return Err(LabError::Domain(format!(
                "need 0 < dt_min <= dt_init, got dt_min = {}, dt_init = {}",
                self.dt_min, self.dt_init
            )));
        }
        if !(self.horizon > 0.0) {
            return Err(LabError::Domain(format!("horizon {} must be > 0", self.horizon)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(LabError::Domain(format!("safety factor {} outside (0, 1]", self.safety)));
        }
        if !(self.blow_cap > 0.0) {
            return Err(LabError::Domain("blow-up cap must be positive".into()));
        }
        if let Scheme::Imex { theta } = self.scheme {
            if !(0.5..=1.0).contains(&theta) {
                return Err(LabError::Domain(format!("theta = {theta} outside [1/2, 1]")));
            }
        }
        if self.snapshot_times.iter().any(|&s| !(s > 0.0 && s <= self.horizon)) {
            return Err(LabError::Domain("snapshot times must lie in (0, horizon]".into()));
        }
        Ok(())
    }

    pub fn grid(&self, dim: f64) -> Result<RadialGrid> {
        RadialGrid::new(dim, self.radius, self.cells)
    }

    /// `(h, dt)` halved.
    pub fn refined(&self) -> Self {
        SolverConfig {
            cells: self.cells * 2,
            dt_init: self.dt_init / 2.0,
            dt_min: self.dt_min / 2.0,
            convergence_gate: false,
            snapshot_times: Vec::new(),
            ..self.clone()
        }
    }

    /// Domain radius doubled at fixed `h`.
    pub fn extended(&self) -> Self {
        SolverConfig {
            radius: self.radius * 2.0,
            cells: self.cells * 2,
            convergence_gate: false,
            snapshot_times: Vec::new(),
            ..self.clone()
        }
    }
}

/// Tridiagonal radial Laplacian,
/// `(Lu)_j = a_j (u_{j-1} - u_j) + b_j (u_{j+1} - u_j)` with `u_M = 0`.
#[derive(Debug, Clone)]
pub struct RadialLaplacian {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl RadialLaplacian {
    pub fn new(grid: &RadialGrid) -> Self {
        let m = grid.cells();
        let n = grid.dim();
        let h2 = grid.spacing() * grid.spacing();
        // face j sits at r = j h; a cell's coefficient is N f^{N-1} / (h² ((j+1)^N - j^N))
        let vol: Vec<f64> = (0..m).map(|j| ((j + 1) as f64).powf(n) - (j as f64).powf(n)).collect();
        let face = |j: usize| (j as f64).powf(n - 1.0);
        let lower = (0..m).map(|j| if j == 0 { 0.0 } else { n * face(j) / (h2 * vol[j]) }).collect();
        let upper = (0..m)
            .map(|j| {
                let c = n * face(j + 1) / (h2 * vol[j]);
                // half-cell distance to the Dirichlet boundary
                if j + 1 == m { 2.0 * c } else { c }
            })
            .collect();
        RadialLaplacian { lower, upper }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        (0..m)
            .map(|j| {
                let left = if j == 0 { 0.0 } else { self.lower[j] * (u[j - 1] - u[j]) };
                let right = if j + 1 == m { -self.upper[j] * u[j] } else { self.upper[j] * (u[j + 1] - u[j]) };
                left + right
            })
            .collect()
    }

    /// Largest eigenvalue magnitude bound (Gershgorin).
    pub fn spectral_bound(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| 2.0 * (a + b)).fold(0.0, f64::max)
    }

    /// Solves `(I - c L) x = rhs` by the Thomas algorithm.
    pub fn solve_shifted(&self, c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = rhs.len();
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        for j in 0..m {
            let a = if j == 0 { 0.0 } else { -c * self.lower[j] };
            let b = 1.0 + c * (self.lower[j] + self.upper[j]);
            let up = if j + 1 == m { 0.0 } else { -c * self.upper[j] };
            let denom = if j == 0 { b } else { b - a * cp[j - 1] };
            if !(denom.abs() > 0.0) {
                return Err(LabError::Numerical("tridiagonal solve hit a zero pivot".into()));
            }
            cp[j] = up / denom;
            dp[j] = (rhs[j] - if j == 0 { 0.0 } else { a * dp[j - 1] }) / denom;
        }
        for j in (0..m - 1).rev() {
            dp[j] -= cp[j] * dp[j + 1];
        }
        Ok(dp)
    }
}

/// Increment of the exact flow of `u' = k |u|^p` over `dt`; `+∞` when the
/// flow blows up within the step.
#[inline]
pub fn reaction_increment(u: f64, k: f64, p: f64, dt: f64) -> f64 {
    if u == 0.0 || k == 0.0 {
        return 0.0;
    }
    let q = p - 1.0;
    let v = u.abs();
    let c = q * k * dt * v.powf(q);
    if u > 0.0 {
        let bracket = 1.0 - c;
        if bracket <= 0.0 {
            f64::INFINITY
        } else {
            u * bracket.powf(-1.0 / q) - u
        }
    } else {
        // -v moves up toward 0
        -v * (1.0 + c).powf(-1.0 / q) + v
    }
}

/// Holds everything needed to advance the solution by one step.
#[derive(Debug, Clone)]
pub struct MolStepper {
    params: Parameters,
    forcing: ForcingProfile,
    grid: RadialGrid,
    w: Vec<f64>,
    weight: Vec<f64>,
    lap: RadialLaplacian,
    scheme: Scheme,
    reaction: bool,
    dt_cap: f64,
}

impl MolStepper {
    pub fn new(params: &Parameters, forcing: &ForcingProfile, w: &dyn RadialData, config: &SolverConfig) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        let grid = config.grid(params.dim)?;
        let lap = RadialLaplacian::new(&grid);
        let dt_cap = match config.scheme {
            Scheme::Imex { .. } => config.dt_init,
            Scheme::ExplicitRk2 => config.dt_init.min(config.safety * 2.0 / lap.spectral_bound()),
        };
        Ok(MolStepper {
            params: *params,
            forcing: *forcing,
            grid,
            w: w.sample(&grid).into_values(),
            weight: grid.nodes().map(|r| r.powf(params.alpha)).collect(),
            lap,
            scheme: config.scheme,
            reaction: config.reaction,
            dt_cap,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Largest step the scheme allows.
    pub fn dt_cap(&self) -> f64 {
        self.dt_cap
    }

    fn reaction_rhs(&self, u: &[f64]) -> Vec<f64> {
        if !self.reaction {
            return vec![0.0; u.len()];
        }
        u.iter().zip(&self.weight).map(|(v, k)| k * v.abs().powf(self.params.p)).collect()
    }

    /// Advances `u` from `t` to `t + dt`.
    pub fn step(&self, u: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
        let mut next = match self.scheme {
            Scheme::Imex { theta } => {
                let lu = self.lap.apply(u);
                let rhs: Vec<f64> = u
                    .iter()
                    .zip(&lu)
                    .zip(&self.weight)
                    .map(|((&v, &l), &k)| {
                        let dr = if self.reaction { reaction_increment(v, k, self.params.p, dt) } else { 0.0 };
                        v + (1.0 - theta) * dt * l + dr
                    })
                    .collect();
                self.lap.solve_shifted(theta * dt, &rhs)?
            }
            Scheme::ExplicitRk2 => {
                let f = |v: &[f64]| -> Vec<f64> {
                    let lu = self.lap.apply(v);
                    let re = self.reaction_rhs(v);
                    lu.iter().zip(re).map(|(a, b)| a + b).collect()
                };
                let k1 = f(u);
                let mid: Vec<f64> = u.iter().zip(&k1).map(|(v, k)| v + dt * k).collect();
                let k2 = f(&mid);
                u.iter().zip(k1.iter().zip(&k2)).map(|(v, (a, b))| v + 0.5 * dt * (a + b)).collect()
            }
        };
        let z = self.forcing.zeta_step_integral(t, t + dt)?;
        if z != 0.0 {
            for (v, w) in next.iter_mut().zip(&self.w) {
                *v += w * z;
            }
        }
        Ok(next)
    }
}

/// One step of the solver on the grid of `u`.
pub fn mol_step(
    u: &RadialField,
    t: f64,
    dt: f64,
    params: &Parameters,
    forcing: &ForcingProfile,
    w: &dyn RadialData,
    config: &SolverConfig,
) -> Result<RadialField> {
    let config = SolverConfig { radius: u.grid().radius(), cells: u.grid().cells(), ..config.clone() };
    let stepper = MolStepper::new(params, forcing, w, &config)?;
    RadialField::new(*u.grid(), stepper.step(u.values(), t, dt)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormTrend {
    Decreasing,
    Flat,
    Increasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeKind {
    BlewUp { t_star: f64, method: String },
    GlobalCandidate { horizon: f64, terminal_sup: f64, trend: NormTrend },
    Inconclusive { reason: String },
}

impl OutcomeKind {
    pub const BLOWUP_LABEL: &'static str = "blew_up";
    pub const GLOBAL_LABEL: &'static str = "global_candidate";
    pub const INCONCLUSIVE_LABEL: &'static str = "inconclusive";

    pub fn label(&self) -> &'static str {
        match self {
            OutcomeKind::BlewUp { .. } => Self::BLOWUP_LABEL,
            OutcomeKind::GlobalCandidate { .. } => Self::GLOBAL_LABEL,
            OutcomeKind::Inconclusive { .. } => Self::INCONCLUSIVE_LABEL,
        }
    }

    pub fn is_blow_up(&self) -> bool {
        matches!(self, OutcomeKind::BlewUp { .. })
    }

    pub fn is_global_candidate(&self) -> bool {
        matches!(self, OutcomeKind::GlobalCandidate { .. })
    }

    pub fn t_star(&self) -> Option<f64> {
        match self {
            OutcomeKind::BlewUp { t_star, .. } => Some(*t_star),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub dt: f64,
    pub sup_norm: f64,
    /// `‖u‖_{p_c}`, absent when `p_c < 1`.
    pub lpc_norm: Option<f64>,
    pub lr_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub field: RadialField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub terminal_sup: f64,
    pub refined_sup: f64,
    pub extended_sup: f64,
    pub refined_change: f64,
    pub extended_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub kind: OutcomeKind,
    pub trace: Vec<TracePoint>,
    pub final_time: f64,
    pub final_state: RadialField,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub rejected_steps: usize,
    pub gate: Option<GateReport>,
    pub config_hash: String,
}

#[derive(Serialize)]
struct OutcomeRecord<'a> {
    kind: &'a OutcomeKind,
    final_time: f64,
    steps: usize,
    rejected_steps: usize,
    gate: &'a Option<GateReport>,
    config_hash: &'a str,
}

impl SimulationOutcome {
    /// Trace as CSV: `t,dt,sup_norm,lpc_norm` plus `lr_norm` when recorded.
    pub fn trace_csv(&self) -> String {
        let with_lr = self.trace.iter().any(|p| p.lr_norm.is_some());
        let mut out = String::from("t,dt,sup_norm,lpc_norm");
        out.push_str(if with_lr { ",lr_norm\n" } else { "\n" });
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.trace {
            let _ = write!(out, "{},{},{},{}", p.t, p.dt, p.sup_norm, opt(p.lpc_norm));
            if with_lr {
                let _ = write!(out, ",{}", opt(p.lr_norm));
            }
            out.push('\n');
        }
        out
    }

    /// Outcome summary as JSON (without trace and fields).
    pub fn to_json(&self) -> Result<String> {
        let rec = OutcomeRecord {
            kind: &self.kind,
            final_time: self.final_time,
            steps: self.steps,
            rejected_steps: self.rejected_steps,
            gate: &self.gate,
            config_hash: &self.config_hash,
        };
        Ok(serde_json::to_string_pretty(&rec)?)
    }
}

/// Least-squares zero of `‖u‖_∞^{1-p}` over the last samples of the trace.
pub fn extrapolate_blowup_time(trace: &[TracePoint], p: f64) -> Option<f64> {
    const WINDOW: usize = 20;
    let pts: Vec<(f64, f64)> = trace
        .iter()
        .rev()
        .take(WINDOW)
        .filter(|q| q.sup_norm > 0.0 && q.sup_norm.is_finite())
        .map(|q| (q.t, q.sup_norm.powf(1.0 - p)))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|q| q.0).sum::<f64>() / n;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|q| (q.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|q| (q.0 - mt) * (q.1 - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    if !(slope < 0.0) {
        return None;
    }
    let t_star = mt - my / slope;
    t_star.is_finite().then_some(t_star)
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-300 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Adaptive run to `config.horizon`, classified by the blow-up criterion.
pub fn run(
    params: &Parameters,
    forcing: &ForcingProfile,
    u0: &dyn RadialData,
    w: &dyn RadialData,
    config: &SolverConfig,
) -> Result<SimulationOutcome> {
    let stepper = MolStepper::new(params, forcing, w, config)?;
    let grid = *stepper.grid();
    let config_hash = content_hash(&(params, forcing, config))?;
    let mut u = u0.sample(&grid).into_values();
    let sup = |v: &[f64]| v.iter().fold(0.0_f64, |a, x| if x.is_nan() { f64::NAN } else { a.max(x.abs()) });
    let sup0 = sup(&u);
    if !(sup0 < config.blow_cap) {
        return Err(LabError::Domain(format!("initial sup-norm {sup0} must be below the cap {}", config.blow_cap)));
    }
    let p_c = params.p_crit_lebesgue();
    let norms = |v: &[f64], s: f64| -> Result<(Option<f64>, Option<f64>)> {
        let f = RadialField::new(grid, v.to_vec())?;
        let lpc = if p_c >= 1.0 && s.is_finite() { Some(lq_norm(&f, p_c)?) } else { None };
        let lr = match config.trace_lr {
            Some(q) if s.is_finite() => Some(lq_norm(&f, q)?),
            _ => None,
        };
        Ok((lpc, lr))
    };

    let mut targets: Vec<f64> = config.snapshot_times.clone();
    targets.push(config.horizon);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let (lpc, lr) = norms(&u, sup0)?;
    let mut trace = vec![TracePoint { t: 0.0, dt: 0.0, sup_norm: sup0, lpc_norm: lpc, lr_norm: lr }];
    let mut snapshots = Vec::new();
    let (mut t, mut dt, mut steps, mut rejected) = (0.0_f64, stepper.dt_cap(), 0usize, 0usize);
    let mut next_target = 0usize;
    let mut sup_old = sup0;

    let finish = |kind: OutcomeKind, t: f64, u: Vec<f64>, trace, snapshots, steps, rejected| -> Result<SimulationOutcome> {
        Ok(SimulationOutcome {
            kind,
            trace,
            final_time: t,
            final_state: RadialField::new(grid, u)?,
            snapshots,
            steps,
            rejected_steps: rejected,
            gate: None,
            config_hash: config_hash.clone(),
        })
    };

    while next_target < targets.len() {
        if steps >= config.max_steps {
            let kind = OutcomeKind::Inconclusive { reason: "step budget exhausted".into() };
            return finish(kind, t, u, trace, snapshots, steps, rejected);
        }
        let target = targets[next_target];
        let hits = target - t <= dt;
        let h = if hits { target - t } else { dt };
        let next = match stepper.step(&u, t, h) {
            Ok(v) => v,
            Err(e) => {
                let kind = OutcomeKind::Inconclusive { reason: format!("step failed: {e}") };
                return finish(kind, t, u, trace, snapshots, steps, rejected);
            }
        };
        let s = sup(&next);
        if s.is_nan() {
            let kind = OutcomeKind::Inconclusive { reason: "numerical overflow".into() };
            return finish(kind, t, u, trace, snapshots, steps, rejected);
        }
        let growth = (s - sup_old) / sup_old.max(config.growth_floor);
        if !s.is_finite() || growth > 0.10 {
            rejected += 1;
            dt = h / 2.0;
            if dt < config.dt_min {
                let kind = match extrapolate_blowup_time(&trace, params.p) {
                    Some(ts) if ts <= config.horizon => OutcomeKind::BlewUp {
                        t_star: ts.max(t),
                        method: "sup-norm^(1-p) extrapolation after time step fell below dt_min".into(),
                    },
                    _ => OutcomeKind::Inconclusive { reason: "time step below dt_min".into() },
                };
                return finish(kind, t, u, trace, snapshots, steps, rejected);
            }
            continue;
        }
        t = if hits { target } else { t + h };
        u = next;
        steps += 1;
        sup_old = s;
        let (lpc, lr) = norms(&u, s)?;
        trace.push(TracePoint { t, dt: h, sup_norm: s, lpc_norm: lpc, lr_norm: lr });
        if hits {
            if config.snapshot_times.contains(&target) {
                snapshots.push(Snapshot { t, field: RadialField::new(grid, u.clone())? });
            }
            next_target += 1;
        }
        if s >= config.blow_cap {
            let kind = match extrapolate_blowup_time(&trace, params.p) {
                Some(ts) if ts <= config.horizon => OutcomeKind::BlewUp {
                    t_star: ts.max(t),
                    method: "sup-norm^(1-p) extrapolation at cap crossing".into(),
                },
                Some(ts) => OutcomeKind::Inconclusive {
                    reason: format!("cap crossed; extrapolated blow-up time {ts} beyond horizon"),
                },
                None => OutcomeKind::Inconclusive { reason: "cap crossed without extrapolated blow-up".into() },
            };
            return finish(kind, t, u, trace, snapshots, steps, rejected);
        }
        if growth < 0.01 {
            dt = (2.0 * dt).min(stepper.dt_cap());
        }
    }

    let terminal_sup = sup_old;
    let half = trace.iter().find(|q| q.t >= 0.5 * config.horizon).map(|q| q.sup_norm).unwrap_or(terminal_sup);
    let trend = if terminal_sup < half {
        NormTrend::Decreasing
    } else if terminal_sup > half {
        NormTrend::Increasing
    } else {
        NormTrend::Flat
    };
    let kind = OutcomeKind::GlobalCandidate { horizon: config.horizon, terminal_sup, trend };
    let mut outcome = finish(kind, t, u, trace, snapshots, steps, rejected)?;
    if config.convergence_gate {
        let refined = run(params, forcing, u0, w, &config.refined())?;
        let extended = run(params, forcing, u0, w, &config.extended())?;
        let terminal = |o: &SimulationOutcome| match o.kind {
            OutcomeKind::GlobalCandidate { terminal_sup, .. } => Some(terminal_sup),
            _ => None,
        };
        let (rs, es) = (terminal(&refined), terminal(&extended));
        let gate = GateReport {
            terminal_sup,
            refined_sup: rs.unwrap_or(f64::NAN),
            extended_sup: es.unwrap_or(f64::NAN),
            refined_change: rs.map_or(f64::INFINITY, |v| relative_change(v, terminal_sup)),
            extended_change: es.map_or(f64::INFINITY, |v| relative_change(v, terminal_sup)),
        };
        if !(gate.refined_change < 0.01 && gate.extended_change < 0.01) {
            outcome.kind = OutcomeKind::Inconclusive {
                reason: format!(
                    "convergence gate failed: sup-norm change {:.3e} under (h, dt)/2, {:.3e} under 2R",
                    gate.refined_change, gate.extended_change
                ),
            };
        }
        outcome.gate = Some(gate);
    }
    Ok(outcome)
}
