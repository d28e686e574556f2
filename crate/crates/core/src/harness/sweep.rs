//! Parameter sweeps and the phase-diagram table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::certify::certificate::w_total;
use crate::error::{LabError, Result};
use crate::evolve::forcing::ForcingProfile;
use crate::evolve::mol::{run, OutcomeKind, SimulationOutcome, SolverConfig};
use crate::params::{blowup_threshold, classify_against, Exponent, Parameters, ThresholdSide};
use crate::profile::Profile;

pub const CSV_HEADER: &str = "# phase-diagram v1\n\
N,alpha,p,sigma,m,u0_profile,w_profile,outcome,t_star,horizon,predicted_threshold,agreement\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisVar {
    P,
    Alpha,
    Sigma,
    M,
    Dim,
}

impl AxisVar {
    fn set(&self, params: &mut Parameters, v: f64) {
        match self {
            AxisVar::P => params.p = v,
            AxisVar::Alpha => params.alpha = v,
            AxisVar::Sigma => params.sigma = v,
            AxisVar::M => params.m = v,
            AxisVar::Dim => params.dim = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub var: AxisVar,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    /// `round((hi - lo)/step) + 1` equally spaced values from `lo`.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as usize + 1;
        (0..n).map(|i| ((self.lo + i as f64 * self.step) * 1e12).round() / 1e12).collect()
    }
}

impl FromStr for Axis {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() != 4 {
            return Err(LabError::Parse(format!("axis '{s}' must read var:lo:hi:step")));
        }
        let var = match parts[0] {
            "p" => AxisVar::P,
            "alpha" => AxisVar::Alpha,
            "sigma" => AxisVar::Sigma,
            "m" => AxisVar::M,
            "N" => AxisVar::Dim,
            other => return Err(LabError::Parse(format!("unknown axis variable '{other}'"))),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| LabError::Parse(format!("axis '{s}': bad number '{t}'")));
        let axis = Axis { var, lo: num(parts[1])?, hi: num(parts[2])?, step: num(parts[3])? };
        if !(axis.step > 0.0) || !(axis.hi >= axis.lo) || !axis.lo.is_finite() || !axis.hi.is_finite() {
            return Err(LabError::Parse(format!("axis '{s}': need step > 0 and lo <= hi")));
        }
        Ok(axis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: Parameters,
    pub axes: Vec<Axis>,
    pub u0: Profile,
    pub w: Profile,
    pub solver: SolverConfig,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(LabError::Parse(format!("at most two axes, got {}", self.axes.len())));
        }
        if self.axes.len() == 2 && self.axes[0].var == self.axes[1].var {
            return Err(LabError::Parse("the two axes must vary different parameters".into()));
        }
        self.solver.validate()
    }

    /// Parameter tuples in sweep order (first axis outermost). Tuples are
    /// not validated here.
    pub fn points(&self) -> Result<Vec<Parameters>> {
        self.validate()?;
        let mut out = vec![self.base];
        for axis in &self.axes {
            let vals = axis.values();
            out = out
                .iter()
                .flat_map(|base| {
                    vals.iter().map(move |&v| {
                        let mut q = *base;
                        axis.var.set(&mut q, v);
                        q
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Consistent,
    Inconsistent,
    Undecided,
}

impl Agreement {
    pub fn label(&self) -> &'static str {
        match self {
            Agreement::Consistent => "consistent",
            Agreement::Inconsistent => "inconsistent",
            Agreement::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub params: Parameters,
    pub u0: Profile,
    pub w: Profile,
    pub outcome: String,
    pub t_star: Option<f64>,
    pub horizon: f64,
    pub predicted_threshold: Option<Exponent>,
    pub agreement: Agreement,
    /// Failure message or convergence-gate figures.
    pub diagnostic: Option<String>,
}

/// Agreement of an outcome with the blow-up range `1 < p < threshold`,
/// which applies when `∫ w > 0`. Nothing is predicted above the threshold.
pub fn agreement(params: &Parameters, w: &Profile, kind: &OutcomeKind, threshold: Option<Exponent>) -> Agreement {
    let Some(Exponent::Finite(thr)) = threshold else {
        return Agreement::Undecided;
    };
    let forced = matches!(w_total(params.dim, w), Ok(v) if v > 0.0);
    if !forced || classify_against(params.p, Exponent::Finite(thr)) != ThresholdSide::Below {
        return Agreement::Undecided;
    }
    match kind {
        OutcomeKind::BlewUp { .. } => Agreement::Consistent,
        OutcomeKind::GlobalCandidate { .. } => Agreement::Inconsistent,
        OutcomeKind::Inconclusive { .. } => Agreement::Undecided,
    }
}

fn gate_note(out: &SimulationOutcome) -> String {
    let gate = match &out.gate {
        Some(g) => format!("gate: refined change {:.3e}, extended change {:.3e}", g.refined_change, g.extended_change),
        None => "convergence gate not run".to_string(),
    };
    match &out.kind {
        OutcomeKind::GlobalCandidate { trend, .. } => format!("{gate}; sup-norm trend {trend:?}"),
        _ => gate,
    }
}

fn run_point(params: &Parameters, u0: &Profile, w: &Profile, solver: &SolverConfig) -> PhasePoint {
    let threshold = blowup_threshold(params.dim, params.alpha, params.m).ok();
    let failed = |msg: String| PhasePoint {
        params: *params,
        u0: *u0,
        w: *w,
        outcome: OutcomeKind::INCONCLUSIVE_LABEL.to_string(),
        t_star: None,
        horizon: solver.horizon,
        predicted_threshold: threshold,
        agreement: Agreement::Undecided,
        diagnostic: Some(msg),
    };
    let result = params
        .validate()
        .and_then(|_| ForcingProfile::from_params(params))
        .and_then(|forcing| run(params, &forcing, u0, w, solver));
    let out = match result {
        Ok(out) => out,
        Err(e) => return failed(e.to_string()),
    };
    let agreement = agreement(params, w, &out.kind, threshold);
    let diagnostic = match (&out.kind, agreement) {
        (OutcomeKind::Inconclusive { reason }, _) => Some(reason.clone()),
        (_, Agreement::Inconsistent) => {
            let note = gate_note(&out);
            log::error!("outcome contradicts the blow-up prediction at {params:?}: {note}");
            Some(note)
        }
        _ => out.gate.as_ref().map(|_| gate_note(&out)),
    };
    PhasePoint {
        params: *params,
        u0: *u0,
        w: *w,
        outcome: out.kind.label().to_string(),
        t_star: out.kind.t_star(),
        horizon: solver.horizon,
        predicted_threshold: threshold,
        agreement,
        diagnostic,
    }
}

/// One solver run per tuple, concurrently; rows come back in sweep order.
/// Failing tuples become inconclusive rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<PhasePoint>> {
    let points = spec.points()?;
    Ok(points.par_iter().map(|q| run_point(q, &spec.u0, &spec.w, &spec.solver)).collect())
}

/// The phase table as CSV, shortest round-trip float formatting.
pub fn phase_csv(rows: &[PhasePoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    for r in rows {
        let q = &r.params;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            q.dim,
            q.alpha,
            q.p,
            q.sigma,
            q.m,
            r.u0,
            r.w,
            r.outcome,
            r.t_star.map(|t| t.to_string()).unwrap_or_default(),
            r.horizon,
            r.predicted_threshold.map(|e| e.to_string()).unwrap_or_default(),
            r.agreement.label()
        );
    }
    out
}

/// Runs the sweep and writes the CSV to `spec.output` when set.
pub fn run_sweep_to_file(spec: &SweepSpec) -> Result<(Vec<PhasePoint>, Option<PathBuf>)> {
    let rows = run_sweep(spec)?;
    if let Some(path) = &spec.output {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, phase_csv(&rows))?;
    }
    Ok((rows, spec.output.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SolverConfig {
        SolverConfig { radius: 10.0, cells: 100, horizon: 0.5, dt_init: 0.05, ..Default::default() }
    }

    #[test]
    fn axis_row_count() {
        let a: Axis = "p:1.2:2.2:0.1".parse().unwrap();
        let v = a.values();
        assert_eq!(v.len(), 11);
        assert_eq!(v[1], 1.3);
        assert_eq!(v[10], 2.2);
        assert!("q:1:2:0.1".parse::<Axis>().is_err());
        assert!("p:1:2:0".parse::<Axis>().is_err());
        assert!("p:2:1:0.1".parse::<Axis>().is_err());
    }

    #[test]
    fn empty_axis_gives_single_row() {
        let spec = SweepSpec {
            base: Parameters::new(3.0, 0.0, 2.0, 0.0, 0.0).unwrap(),
            axes: vec![],
            u0: Profile::Zero,
            w: Profile::Zero,
            solver: quick(),
            output: None,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].outcome, OutcomeKind::GLOBAL_LABEL);
        assert_eq!(rows[0].agreement, Agreement::Undecided);
    }

    #[test]
    fn failures_become_inconclusive_rows() {
        let spec = SweepSpec {
            base: Parameters::new(3.0, 0.0, 2.0, 0.0, 0.0).unwrap(),
            axes: vec!["p:0.5:1.5:0.5".parse().unwrap()],
            u0: Profile::Zero,
            w: Profile::Zero,
            solver: quick(),
            output: None,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].outcome, OutcomeKind::INCONCLUSIVE_LABEL);
        assert_eq!(rows[1].outcome, OutcomeKind::INCONCLUSIVE_LABEL);
        assert!(rows[0].diagnostic.is_some());
        assert_eq!(rows[2].outcome, OutcomeKind::GLOBAL_LABEL);
    }

    #[test]
    fn csv_is_deterministic() {
        let spec = SweepSpec {
            base: Parameters::new(3.0, 0.0, 2.0, 0.0, -1.0).unwrap(),
            axes: vec!["p:1.5:2:0.5".parse().unwrap()],
            u0: Profile::Gaussian { a: 0.1 },
            w: Profile::Bump { a: 1.0, r0: 2.0 },
            solver: quick(),
            output: None,
        };
        let a = phase_csv(&run_sweep(&spec).unwrap());
        let b = phase_csv(&run_sweep(&spec).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn agreement_rules() {
        let params = Parameters::new(3.0, 0.0, 1.4, 0.0, -1.0).unwrap();
        let thr = blowup_threshold(3.0, 0.0, -1.0).ok();
        let w = Profile::Bump { a: 1.0, r0: 2.0 };
        let blew = OutcomeKind::BlewUp { t_star: 1.0, method: "cap".into() };
        let global = OutcomeKind::GlobalCandidate { horizon: 1.0, terminal_sup: 0.1, trend: crate::evolve::NormTrend::Flat };
        assert_eq!(agreement(&params, &w, &blew, thr), Agreement::Consistent);
        assert_eq!(agreement(&params, &w, &global, thr), Agreement::Inconsistent);
        assert_eq!(agreement(&params, &Profile::Zero, &global, thr), Agreement::Undecided);
        let above = Parameters { p: 2.0, ..params };
        assert_eq!(agreement(&above, &w, &global, thr), Agreement::Undecided);
        assert_eq!(agreement(&params, &w, &blew, Some(Exponent::Infinite)), Agreement::Undecided);
    }
}
