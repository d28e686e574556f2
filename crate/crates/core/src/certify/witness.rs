//! Exponent witnesses for small-data global existence, and an empirical
//! probe of the smallness threshold.
//!
//! Under `N ≥ 2`, `-2 < α < 0`, `-1 < σ < 0`, `p ≥ 1 + (2+α)/(N - 2(σ+1))`
//! there is an `r > p` with
//!
//! ```text
//! max{(αp+2)/(Np(p-1)), 1/p_c + 2σ/N} < 1/r < min{1/p_c, (N+α)/(Np)}
//! ```
//!
//! and then `μ = (N/2)(1/p_c - 1/r)` lies in `(0, 1/p)`. The witness picks
//! `1/r` at the midpoint and evaluates every Beta function the fixed-point
//! argument in `t^μ L^r` relies on.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::evolve::forcing::ForcingProfile;
use crate::evolve::mol::{run, OutcomeKind, SolverConfig};
use crate::heatsem::has_exact_path;
use crate::params::Parameters;
use crate::profile::Profile;
use crate::specfun::beta_fn;

/// One Beta function `B(a, b)` used by the argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaArgs {
    pub label: String,
    pub a: f64,
    pub b: f64,
    pub positive: bool,
    /// `B(a, b)` when both arguments are positive.
    pub value: Option<f64>,
}

impl BetaArgs {
    fn new(label: &str, a: f64, b: f64) -> Self {
        let positive = a > 0.0 && b > 0.0;
        BetaArgs { label: label.to_string(), a, b, positive, value: beta_fn(a, b).ok() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentWitness {
    pub params: Parameters,
    pub p_c: f64,
    /// `ℓ = N p_c / (N + 2(σ+1) p_c)`, the Lebesgue index for `w`.
    pub ell: f64,
    pub ell_at_least_one: bool,
    /// Open interval for `1/r`: `(lower, upper)`.
    pub r_interval: (f64, f64),
    pub r: f64,
    pub mu: f64,
    /// The four strict inequalities checked on the way to the interval.
    pub lemma_inequalities: [bool; 4],
    /// `2σp² - (N - 2 + 2σ)p + N + α`, negative under the hypotheses.
    pub quadratic: f64,
    pub tau_star: f64,
    /// `Θ(τ*) = 2σ(p-1)²`.
    pub theta_at_tau_star: f64,
    pub beta_args: Vec<BetaArgs>,
    /// Forcing argument with the extra `α/2` as sometimes written for the
    /// unweighted semigroup. Diagnostic only; it can be negative.
    pub forcing_arg_with_alpha: f64,
}

impl ExponentWitness {
    pub fn all_beta_positive(&self) -> bool {
        self.beta_args.iter().all(|b| b.positive)
    }

    /// Every invariant of a witness: nonempty interval containing `1/r`,
    /// `r > p`, `0 < μ < 1/p`, positive Beta arguments.
    pub fn is_valid(&self) -> bool {
        let (lo, hi) = self.r_interval;
        let inv = 1.0 / self.r;
        lo < inv
            && inv < hi
            && self.r > self.params.p
            && self.mu > 0.0
            && self.mu < 1.0 / self.params.p
            && self.all_beta_positive()
    }
}

/// Smallest `p` covered by the global-existence theorem.
pub fn global_existence_min_p(dim: f64, alpha: f64, sigma: f64) -> f64 {
    1.0 + (2.0 + alpha) / (dim - 2.0 * (sigma + 1.0))
}

pub fn ge_exponent_witness(params: &Parameters) -> Result<ExponentWitness> {
    params.validate()?;
    let Parameters { dim: n, alpha, p, sigma, .. } = *params;
    if n < 2.0 {
        return Err(LabError::Inapplicable(format!("N = {n} < 2")));
    }
    if !(alpha > -2.0 && alpha < 0.0) {
        return Err(LabError::Inapplicable(format!("alpha = {alpha} outside (-2, 0)")));
    }
    if !(sigma > -1.0 && sigma < 0.0) {
        return Err(LabError::Inapplicable(format!("sigma = {sigma} outside (-1, 0)")));
    }
    let p_min = global_existence_min_p(n, alpha, sigma);
    if p < p_min {
        return Err(LabError::Inapplicable(format!("p = {p} below {p_min}")));
    }

    let p_c = params.p_crit_lebesgue();
    let inv_pc = 1.0 / p_c;
    let a1 = (alpha * p + 2.0) / (n * p * (p - 1.0));
    let a2 = inv_pc + 2.0 * sigma / n;
    let b2 = (n + alpha) / (n * p);
    let lemma_inequalities = [a1 < inv_pc, a1 < b2, a2 < inv_pc, a2 < b2];
    let lo = a1.max(a2).max(0.0);
    let hi = inv_pc.min(b2).min(1.0 / p);
    if !(lo < hi) {
        log::error!("empty exponent interval ({lo}, {hi}) for {params:?} although the hypotheses hold");
        return Err(LabError::Numerical(format!(
            "empty exponent interval ({lo}, {hi}) for N={n}, alpha={alpha}, p={p}, sigma={sigma}"
        )));
    }
    let inv_r = 0.5 * (lo + hi);
    let r = 1.0 / inv_r;
    let mu = 0.5 * n * (inv_pc - inv_r);
    let ell = n * p_c / (n + 2.0 * (sigma + 1.0) * p_c);
    let tau_star = 2.0 * sigma + (alpha + 2.0 * p) / (p - 1.0);

    let beta_args = vec![
        BetaArgs::new("nonlinear", 1.0 - p * mu, 1.0 - n * (p - 1.0) / (2.0 * r) + 0.5 * alpha),
        BetaArgs::new("forcing_lpc", sigma + 1.0, -sigma),
        BetaArgs::new("forcing_lr", sigma + 1.0, 1.0 - 0.5 * n * (1.0 / ell - inv_r)),
    ];
    Ok(ExponentWitness {
        params: *params,
        p_c,
        ell,
        ell_at_least_one: ell >= 1.0,
        r_interval: (lo, hi),
        r,
        mu,
        lemma_inequalities,
        quadratic: 2.0 * sigma * p * p - (n - 2.0 + 2.0 * sigma) * p + n + alpha,
        tau_star,
        theta_at_tau_star: 2.0 * sigma * (p - 1.0).powi(2),
        beta_args,
        forcing_arg_with_alpha: 1.0 - 0.5 * n * (1.0 / ell - inv_r) + 0.5 * alpha,
    })
}

/// One rung of the smallness ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub k: u32,
    pub scale: f64,
    pub outcome: String,
    pub t_star: Option<f64>,
    /// `max_t t^μ ‖u(t)‖_r` and its value at the final time.
    pub weighted_peak: Option<f64>,
    pub weighted_final: Option<f64>,
    pub decaying: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub witness: ExponentWitness,
    pub u0: Profile,
    pub w: Profile,
    pub rows: Vec<ProbeRow>,
    /// Largest scale classified global with decaying `t^μ ‖u‖_r`.
    pub largest_global_scale: Option<f64>,
    pub smallest_blowup_scale: Option<f64>,
    /// Set when no exact heat semigroup exists for this `N`; only the
    /// method-of-lines solver backs the result.
    pub mol_only: bool,
    /// No rung was decided.
    pub unresolved: bool,
}

/// Runs the solver with data `2^{-k} u0` and forcing `2^{-k} t^σ w` for
/// `k = 0..=k_max`.
pub fn ge_smallness_probe(
    params: &Parameters,
    u0: &Profile,
    w: &Profile,
    k_max: u32,
    config: &SolverConfig,
) -> Result<SmallnessReport> {
    let witness = ge_exponent_witness(params)?;
    let forcing = ForcingProfile::pure(params.sigma, params.c0)?;
    let config = SolverConfig { trace_lr: Some(witness.r), ..config.clone() };
    let mu = witness.mu;
    let rows: Vec<ProbeRow> = (0..=k_max)
        .into_par_iter()
        .map(|k| -> Result<ProbeRow> {
            let scale = 0.5_f64.powi(k as i32);
            let out = run(params, &forcing, &u0.scaled(scale), &w.scaled(scale), &config)?;
            let weighted: Vec<f64> =
                out.trace.iter().filter(|q| q.t > 0.0).filter_map(|q| q.lr_norm.map(|v| q.t.powf(mu) * v)).collect();
            let peak = weighted.iter().cloned().fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
            let last = weighted.last().copied();
            let decaying = match (peak, last) {
                (Some(pk), Some(l)) => l <= 0.5 * pk || pk == 0.0,
                _ => false,
            };
            Ok(ProbeRow {
                k,
                scale,
                outcome: out.kind.label().to_string(),
                t_star: out.kind.t_star(),
                weighted_peak: peak,
                weighted_final: last,
                decaying,
            })
        })
        .collect::<Result<_>>()?;
    let is_global = |row: &ProbeRow| row.outcome == OutcomeKind::GLOBAL_LABEL && row.decaying;
    let largest_global_scale = rows.iter().filter(|r| is_global(r)).map(|r| r.scale).fold(None, |a: Option<f64>, s| {
        Some(a.map_or(s, |a| a.max(s)))
    });
    let smallest_blowup_scale = rows
        .iter()
        .filter(|r| r.outcome == OutcomeKind::BLOWUP_LABEL)
        .map(|r| r.scale)
        .fold(None, |a: Option<f64>, s| Some(a.map_or(s, |a| a.min(s))));
    let unresolved = rows.iter().all(|r| r.outcome == OutcomeKind::INCONCLUSIVE_LABEL);
    Ok(SmallnessReport {
        witness,
        u0: *u0,
        w: *w,
        rows,
        largest_global_scale,
        smallest_blowup_scale,
        mol_only: !has_exact_path(params.dim),
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_dimensional_example() {
        let params = Parameters::new(4.0, -1.0, 2.0, -0.5, 0.0).unwrap();
        let w = ge_exponent_witness(&params).unwrap();
        assert!((w.p_c - 4.0).abs() < 1e-14);
        assert!((w.r_interval.0 - 0.0).abs() < 1e-15);
        assert!((w.r_interval.1 - 0.25).abs() < 1e-15);
        assert!((w.r - 8.0).abs() < 1e-12);
        assert!(w.is_valid());
        assert!((w.ell - 2.0).abs() < 1e-14);
        // the printed forcing argument with +α/2 goes negative here
        assert!(w.forcing_arg_with_alpha < 0.0);
    }

    #[test]
    fn hypotheses_are_gated() {
        let bad_sigma = Parameters { sigma: -1.0, ..Parameters::new(3.0, -0.5, 3.0, -0.5, 0.0).unwrap() };
        assert!(ge_exponent_witness(&bad_sigma).is_err());
        let low_p = Parameters::new(3.0, -0.5, 1.2, -0.5, 0.0).unwrap();
        assert!(matches!(ge_exponent_witness(&low_p), Err(LabError::Inapplicable(_))));
        let alpha_zero = Parameters::new(3.0, 0.0, 3.0, -0.5, 0.0).unwrap();
        assert!(matches!(ge_exponent_witness(&alpha_zero), Err(LabError::Inapplicable(_))));
    }

    #[test]
    fn theta_and_quadratic_are_negative() {
        let params = Parameters::new(3.0, -0.5, 3.0, -0.5, 0.0).unwrap();
        let w = ge_exponent_witness(&params).unwrap();
        assert!(w.theta_at_tau_star < 0.0 && w.quadratic < 0.0);
        assert!(params.dim >= w.tau_star);
        assert!(w.lemma_inequalities.iter().all(|&b| b));
    }

    #[test]
    fn zero_data_is_global() {
        let params = Parameters::new(3.0, -0.5, 3.0, -0.5, 0.0).unwrap();
        let config = SolverConfig { radius: 10.0, cells: 100, horizon: 1.0, ..Default::default() };
        let rep = ge_smallness_probe(&params, &Profile::Zero, &Profile::Zero, 1, &config).unwrap();
        assert!(rep.rows.iter().all(|r| r.outcome == OutcomeKind::GLOBAL_LABEL));
        assert!(!rep.mol_only);
    }
}
