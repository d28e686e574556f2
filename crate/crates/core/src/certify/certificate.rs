//! Test-function blow-up certificates.
//!
//! Multiplying the equation by `ψ_T(t, x) = f(t/T)^{p'} g(|x|²/T)^{2p'}`
//! (`p' = p/(p-1)`), integrating by parts and absorbing the nonlinear term
//! with Young's inequality `ab ≤ δ a^p + C_δ b^{p'}` at `δ = 1/2` gives, for
//! any solution living past `3T/4`,
//!
//! ```text
//! L(T) = ∬ ζ w ψ_T  ≤  C_δ ∬ |x|^{-α/(p-1)} (|Δψ_T|^{p'} + |∂_t ψ_T|^{p'}) ψ_T^{-1/(p-1)} = Rhs(T)
//! ```
//!
//! with `C_δ = (1/p') (δ p)^{-p'/p}`. A computed `L(T) > Rhs(T)` is a
//! certificate that `T* ≤ 3T/4`. Both sides factor into one-dimensional
//! integrals in `t` and in `r`, which are evaluated by refined Gauss-Legendre
//! quadrature and stored with their panel counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cutoff::{smooth_step, space_cutoff, step_product, time_cutoff};
use crate::error::{LabError, Result};
use crate::evolve::forcing::{ForcingProfile, ForcingShape};
use crate::grid::{sphere_area, RadialField, RadialGrid};
use crate::params::Parameters;
use crate::profile::Profile;
use crate::quad::{integrate_fixed, integrate_refined};

/// Young parameter of both absorptions.
pub const YOUNG_DELTA: f64 = 0.5;

const REL_TOL: f64 = 1e-10;
const START_PANELS: usize = 4;
const MAX_PANELS: usize = 1 << 12;

/// `ε` of the unpowered test function `f_T(t) g(ε|x|²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EpsilonRule {
    InverseT,
    InverseSqrtT,
    Fixed { eps: f64 },
}

impl EpsilonRule {
    pub fn eps(&self, t: f64) -> f64 {
        match *self {
            EpsilonRule::InverseT => 1.0 / t,
            EpsilonRule::InverseSqrtT => 1.0 / t.sqrt(),
            EpsilonRule::Fixed { eps } => eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `f(t/T)^{p'} g(|x|²/T)^{2p'}`.
    PsiT,
    /// `f(t/T)^{p'} g(ε|x|²)`.
    PhiT { epsilon: EpsilonRule },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotAtThisT,
    /// A quadrature did not reach its tolerance.
    Inconclusive,
}

/// Factors of `L = A W` and `Rhs = C_δ (B D + C E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateTerms {
    /// `A = ∫ ζ(t) f(t/T)^{p'} dt`.
    pub zeta_weight: f64,
    /// `W = ∫ w(x) g-factor dx`.
    pub w_weight: f64,
    /// `B = ∫ f(t/T)^{p'} dt`.
    pub time_mass: f64,
    /// `C = (p'/T)^{p'} ∫ |f'(t/T)|^{p'} dt`.
    pub time_derivative: f64,
    /// `D = ∫ |x|^{-α/(p-1)} |Δ g-factor|^{p'} (g-factor)^{-1/(p-1)} dx`.
    pub space_laplacian: f64,
    /// `E = ∫ |x|^{-α/(p-1)} g-factor dx`.
    pub space_mass: f64,
}

/// Panels per segment used for each one-dimensional integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub zeta_weight: usize,
    pub w_weight: usize,
    pub time_mass: usize,
    pub time_derivative: usize,
    pub space_laplacian: usize,
    pub space_mass: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupCertificate {
    pub params: Parameters,
    pub forcing: ForcingProfile,
    pub w: Profile,
    pub t: f64,
    pub test_function: TestFunction,
    /// `ε` actually used by the unpowered test function.
    pub epsilon: Option<f64>,
    pub l_value: f64,
    pub rhs: f64,
    pub young_delta: f64,
    pub young_const: f64,
    pub terms: CertificateTerms,
    pub resolution: Resolution,
    pub verdict: Verdict,
}

impl BlowupCertificate {
    /// Upper bound on the blow-up time implied by a certified verdict.
    pub fn blowup_time_bound(&self) -> Option<f64> {
        (self.verdict == Verdict::Certified).then_some(0.75 * self.t)
    }
}

/// `C_δ = (1/p') (δ p)^{-p'/p}`.
pub fn young_constant(p: f64, delta: f64) -> f64 {
    let pp = p / (p - 1.0);
    (delta * p).powf(-pp / p) / pp
}

enum Mode<'a> {
    Refine,
    Fixed(&'a Resolution),
}

struct Quad {
    value: f64,
    panels: usize,
    converged: bool,
}

fn quad<F: Fn(f64) -> f64>(breaks: &[f64], fixed: Option<usize>, f: F) -> Quad {
    match fixed {
        Some(panels) => Quad { value: integrate_fixed(breaks, panels, f), panels, converged: true },
        None => {
            let r = integrate_refined(breaks, START_PANELS, MAX_PANELS, REL_TOL, 1e-300, f);
            Quad { value: r.value, panels: r.panels, converged: r.converged }
        }
    }
}

fn sorted_breaks(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.retain(|&x| x >= lo && x <= hi);
    v.push(lo);
    v.push(hi);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1.0));
    v
}

/// `ω ∫ w(r) r^{N-1} dr`.
pub fn w_total(dim: f64, w: &Profile) -> Result<f64> {
    if w.is_zero() {
        return Ok(0.0);
    }
    let breaks = sorted_breaks(w.breakpoints(), 0.0, w.support_radius());
    let r = integrate_refined(&breaks, START_PANELS, MAX_PANELS, REL_TOL, 1e-300, |r| w.eval(r) * r.powf(dim - 1.0));
    if !r.converged {
        return Err(LabError::Numerical("quadrature of the forcing profile did not converge".into()));
    }
    Ok(sphere_area(dim) * r.value)
}

fn certificate_at(
    params: &Parameters,
    forcing: &ForcingProfile,
    w: &Profile,
    t_big: f64,
    test_function: TestFunction,
    mode: Mode<'_>,
) -> Result<BlowupCertificate> {
    let p = params.p;
    let pp = params.conjugate();
    let n = params.dim;
    let a = params.alpha / (p - 1.0);
    let s_exp = 0.5 * (n - a);
    if !(s_exp > 0.0) {
        return Err(LabError::Inapplicable(format!(
            "|x|^(-alpha/(p-1)) is not locally integrable: alpha/(p-1) = {a} >= N = {n}"
        )));
    }
    let omega = sphere_area(n);
    let fixed = |pick: fn(&Resolution) -> usize| match mode {
        Mode::Refine => None,
        Mode::Fixed(res) => Some(pick(res)),
    };

    // time factors, s = t/T
    let time_breaks = vec![0.25, 0.5, 2.0 / 3.0, 0.75];
    let zeta_breaks = sorted_breaks(vec![0.5, 2.0 / 3.0, 1.0 / t_big], 0.25, 0.75);
    let qa = quad(&zeta_breaks, fixed(|r| r.zeta_weight), |s| {
        let f = time_cutoff(s).0;
        if f == 0.0 {
            0.0
        } else {
            forcing.zeta_eval(t_big * s).unwrap_or(0.0) * f.powf(pp)
        }
    });
    let qb = quad(&time_breaks, fixed(|r| r.time_mass), |s| time_cutoff(s).0.powf(pp));
    let qc = quad(&time_breaks, fixed(|r| r.time_derivative), |s| time_cutoff(s).1.abs().powf(pp));
    let zeta_weight = t_big * qa.value;
    let time_mass = t_big * qb.value;
    let time_derivative = (pp / t_big).powf(pp) * t_big * qc.value;

    // space factors, r² = λ τ
    let (lambda, epsilon) = match test_function {
        TestFunction::PsiT => (t_big, None),
        TestFunction::PhiT { epsilon } => {
            let e = epsilon.eps(t_big);
            if !(e > 0.0) {
                return Err(LabError::Domain(format!("epsilon = {e} must be > 0")));
            }
            (1.0 / e, Some(e))
        }
    };
    let power = match test_function {
        TestFunction::PsiT => 2.0 * pp,
        TestFunction::PhiT { .. } => 1.0,
    };
    let jac = |tau: f64| 0.5 * tau.powf(s_exp - 1.0);
    let lap_density = |tau: f64| -> f64 {
        if tau <= 1.0 || tau >= 2.0 {
            return 0.0;
        }
        let x = 2.0 - tau;
        let sp = step_product(x);
        if sp == 0.0 {
            return 0.0;
        }
        let (g, _, _) = smooth_step(x);
        let q = 1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x));
        let dq = -2.0 / (x * x * x) + 2.0 / ((1.0 - x).powi(3));
        let one_minus = 1.0 - g;
        // G' = -sp q, G'' = sp ((1 - 2G) q² + q')
        let g1 = -sp * q;
        let g2 = sp * ((one_minus - g) * q * q + dq);
        match test_function {
            TestFunction::PsiT => {
                let k = power;
                (k * (4.0 * tau * ((k - 1.0) * g1 * g1 + g * g2) + 2.0 * n * g * g1)).abs().powf(pp)
            }
            TestFunction::PhiT { .. } => {
                let br = 4.0 * tau * ((one_minus - g) * q * q + dq) - 2.0 * n * q;
                g * (one_minus * br.abs()).powf(pp)
            }
        }
    };
    let qd = quad(&[1.0, 1.5, 2.0], fixed(|r| r.space_laplacian), |tau| jac(tau) * lap_density(tau));
    let qe = quad(&[1.0, 1.5, 2.0], fixed(|r| r.space_mass), |tau| jac(tau) * space_cutoff(tau).0.powf(power));
    let scale = lambda.powf(s_exp);
    let space_laplacian = omega * scale * lambda.powf(-pp) * qd.value;
    let space_mass = omega * scale * (1.0 / (2.0 * s_exp) + qe.value);

    // ∫ w g-factor
    let support = w.support_radius().min((2.0 * lambda).sqrt());
    let w_breaks = sorted_breaks([w.breakpoints(), vec![lambda.sqrt()]].concat(), 0.0, support);
    let qw = quad(&w_breaks, fixed(|r| r.w_weight), |r| {
        w.eval(r) * space_cutoff(r * r / lambda).0.powf(power) * r.powf(n - 1.0)
    });
    let w_weight = omega * qw.value;

    let young_const = young_constant(p, YOUNG_DELTA);
    let l_value = zeta_weight * w_weight;
    let rhs = young_const * (time_mass * space_laplacian + time_derivative * space_mass);
    let converged = [&qa, &qb, &qc, &qd, &qe, &qw].iter().all(|q| q.converged);
    let verdict = if !converged {
        Verdict::Inconclusive
    } else if l_value > rhs {
        Verdict::Certified
    } else {
        Verdict::NotAtThisT
    };
    Ok(BlowupCertificate {
        params: *params,
        forcing: *forcing,
        w: *w,
        t: t_big,
        test_function,
        epsilon,
        l_value,
        rhs,
        young_delta: YOUNG_DELTA,
        young_const,
        terms: CertificateTerms { zeta_weight, w_weight, time_mass, time_derivative, space_laplacian, space_mass },
        resolution: Resolution {
            zeta_weight: qa.panels,
            w_weight: qw.panels,
            time_mass: qb.panels,
            time_derivative: qc.panels,
            space_laplacian: qd.panels,
            space_mass: qe.panels,
        },
        verdict,
    })
}

/// Measured and predicted log-log slopes over the top decade of the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub l_slope: f64,
    pub rhs_slope: f64,
    pub expected_l_slope: f64,
    pub expected_rhs_slope: f64,
    pub t_low: f64,
    pub t_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateLadder {
    pub certificates: Vec<BlowupCertificate>,
    /// First `T` of the ladder with a certified verdict.
    pub first_certified: Option<f64>,
    pub scaling: Option<ScalingReport>,
}

impl CertificateLadder {
    pub fn first(&self) -> Option<&BlowupCertificate> {
        self.certificates.iter().find(|c| c.verdict == Verdict::Certified)
    }
}

/// Growth exponent of `L(T)` for large `T`.
pub fn expected_l_slope(forcing: &ForcingProfile) -> f64 {
    match forcing.shape {
        ForcingShape::Pure => forcing.sigma + 1.0,
        ForcingShape::Spliced => forcing.m + 1.0,
    }
}

/// Growth exponent of `Rhs(T)` for large `T`.
pub fn expected_rhs_slope(params: &Parameters, test_function: TestFunction) -> f64 {
    let pp = params.conjugate();
    let s = 0.5 * params.dim - params.alpha / (2.0 * (params.p - 1.0));
    match test_function {
        TestFunction::PsiT | TestFunction::PhiT { epsilon: EpsilonRule::InverseT } => 1.0 + s - pp,
        TestFunction::PhiT { epsilon: EpsilonRule::InverseSqrtT } => 1.0 + 0.5 * (s - pp),
        TestFunction::PhiT { epsilon: EpsilonRule::Fixed { .. } } => 1.0,
    }
}

fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|q| q.1 > 0.0).map(|q| (q.0.ln(), q.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / n;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Evaluates the certificate at every `T` of the ladder.
pub fn certify_blowup(
    params: &Parameters,
    forcing: &ForcingProfile,
    w: &Profile,
    ladder: &[f64],
    test_function: TestFunction,
) -> Result<CertificateLadder> {
    params.validate()?;
    if ladder.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(LabError::Domain("ladder values must be positive and finite".into()));
    }
    let total = w_total(params.dim, w)?;
    if !(total > 0.0) {
        return Err(LabError::Inapplicable(format!("forcing profile has integral {total} <= 0")));
    }
    let certificates: Vec<BlowupCertificate> = ladder
        .par_iter()
        .map(|&t| certificate_at(params, forcing, w, t, test_function, Mode::Refine))
        .collect::<Result<_>>()?;
    let first_certified = certificates.iter().find(|c| c.verdict == Verdict::Certified).map(|c| c.t);
    let t_high = ladder.iter().cloned().fold(0.0, f64::max);
    let top: Vec<&BlowupCertificate> = certificates.iter().filter(|c| c.t >= t_high / 10.0 * (1.0 - 1e-12)).collect();
    let l_pts: Vec<(f64, f64)> = top.iter().map(|c| (c.t, c.l_value)).collect();
    let r_pts: Vec<(f64, f64)> = top.iter().map(|c| (c.t, c.rhs)).collect();
    let scaling = match (loglog_slope(&l_pts), loglog_slope(&r_pts)) {
        (Some(l_slope), Some(rhs_slope)) => Some(ScalingReport {
            l_slope,
            rhs_slope,
            expected_l_slope: expected_l_slope(forcing),
            expected_rhs_slope: expected_rhs_slope(params, test_function),
            t_low: top.iter().map(|c| c.t).fold(f64::INFINITY, f64::min),
            t_high,
        }),
        _ => None,
    };
    Ok(CertificateLadder { certificates, first_certified, scaling })
}

/// `T = base^k`, `k = 0..=k_max`.
pub fn geometric_ladder(base: f64, k_max: u32) -> Vec<f64> {
    (0..=k_max).map(|k| base.powi(k as i32)).collect()
}

/// Result of re-evaluating a stored certificate at its recorded resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reverification {
    pub l_value: f64,
    pub rhs: f64,
    pub verdict: Verdict,
    /// Verdict reproduced and both sides agree to `1e-9` relative.
    pub agrees: bool,
}

pub fn reverify(cert: &BlowupCertificate) -> Result<Reverification> {
    let again = certificate_at(
        &cert.params,
        &cert.forcing,
        &cert.w,
        cert.t,
        cert.test_function,
        Mode::Fixed(&cert.resolution),
    )?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
    let verdict = if cert.verdict == Verdict::Inconclusive { Verdict::Inconclusive } else { again.verdict };
    Ok(Reverification {
        l_value: again.l_value,
        rhs: again.rhs,
        verdict,
        agrees: verdict == cert.verdict && close(again.l_value, cert.l_value) && close(again.rhs, cert.rhs),
    })
}

/// `ψ_T`, `∂_t ψ_T`, `Δψ_T` sampled at the given times on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiSamples {
    pub times: Vec<f64>,
    pub psi: Vec<RadialField>,
    pub dt_psi: Vec<RadialField>,
    pub lap_psi: Vec<RadialField>,
}

/// Samples `ψ_T = f(t/T)^{p'} g(|x|²/T)^{2p'}` and its derivatives, all
/// from the analytic formulas.
pub fn test_function_psi(t_big: f64, params: &Parameters, times: &[f64], grid: &RadialGrid) -> Result<PsiSamples> {
    if !(t_big > 0.0) {
        return Err(LabError::Domain(format!("T = {t_big} must be > 0")));
    }
    params.validate()?;
    let pp = params.conjugate();
    let k = 2.0 * pp;
    let n = grid.dim();
    let space: Vec<(f64, f64)> = grid
        .nodes()
        .map(|r| {
            let tau = r * r / t_big;
            let (g, g1, g2) = space_cutoff(tau);
            let val = g.powf(k);
            let lap = if g1 == 0.0 && g2 == 0.0 {
                0.0
            } else {
                (k / t_big) * g.powf(k - 2.0) * (4.0 * tau * ((k - 1.0) * g1 * g1 + g * g2) + 2.0 * n * g * g1)
            };
            (val, lap)
        })
        .collect();
    let mut psi = Vec::with_capacity(times.len());
    let mut dt_psi = Vec::with_capacity(times.len());
    let mut lap_psi = Vec::with_capacity(times.len());
    for &t in times {
        let (f, f1) = time_cutoff(t / t_big);
        let ft = f.powf(pp);
        let dft = if f1 == 0.0 { 0.0 } else { pp * f.powf(pp - 1.0) * f1 / t_big };
        psi.push(RadialField::new(*grid, space.iter().map(|s| ft * s.0).collect())?);
        dt_psi.push(RadialField::new(*grid, space.iter().map(|s| dft * s.0).collect())?);
        lap_psi.push(RadialField::new(*grid, space.iter().map(|s| ft * s.1).collect())?);
    }
    Ok(PsiSamples { times: times.to_vec(), psi, dt_psi, lap_psi })
}

/// `∫_0^T f(t/T)^{p'} dt`.
pub fn time_cutoff_mass(t_big: f64, p: f64) -> f64 {
    let pp = p / (p - 1.0);
    t_big * integrate_refined(&[0.25, 0.5, 2.0 / 3.0, 0.75], 4, MAX_PANELS, 1e-12, 0.0, |s| time_cutoff(s).0.powf(pp)).value
}
