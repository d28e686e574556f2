use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use fujita_core::certify::{certify_blowup, ge_exponent_witness, geometric_ladder, EpsilonRule, TestFunction};
use fujita_core::evolve::{run, ForcingProfile, SolverConfig};
use fujita_core::harness::{phase_csv, run_sweep, SimulationRecord, SweepSpec};
use fujita_core::params::{blowup_threshold, fujita_exponent, jks_exponent};
use fujita_core::specfun::mittag_leffler;
use fujita_core::{LabError, Parameters, Profile};

fn to_py(e: LabError) -> PyErr {
    match e {
        LabError::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        LabError::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serialises through JSON so Python receives plain dicts and lists.
fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| to_py(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn profile(s: &str) -> PyResult<Profile> {
    s.parse().map_err(to_py)
}

#[allow(clippy::too_many_arguments)]
fn params(dim: f64, alpha: f64, p: f64, sigma: f64, m: f64, c0: f64, c_inf: f64) -> PyResult<Parameters> {
    Parameters::with_scales(dim, alpha, p, sigma, m, c0, c_inf).map_err(to_py)
}

/// Fujita exponent and blow-up threshold; `inf` stands for an infinite exponent.
#[pyfunction]
#[pyo3(signature = (dim, alpha=0.0, m=0.0, sigma=None))]
fn exponents(dim: f64, alpha: f64, m: f64, sigma: Option<f64>) -> PyResult<(f64, f64, Option<f64>)> {
    let p_f = fujita_exponent(dim, alpha).map_err(to_py)?;
    let thr = blowup_threshold(dim, alpha, m).map_err(to_py)?;
    let forced = sigma.map(|s| jks_exponent(dim, s).map(|e| e.as_f64())).transpose().map_err(to_py)?;
    Ok((p_f, thr.as_f64(), forced))
}

#[pyfunction]
fn mittag_leffler_e(rho: f64, z: f64) -> PyResult<f64> {
    Ok(mittag_leffler(rho, z).map_err(to_py)?.value())
}

/// One solver run; returns the stored record as a dict.
#[pyfunction]
#[pyo3(signature = (
    dim, p, alpha=0.0, sigma=0.0, m=0.0, u0="zero", w="zero",
    radius=40.0, cells=800, dt=1e-2, horizon=10.0, gate=false, c0=1.0, c_inf=1.0
))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    dim: f64,
    p: f64,
    alpha: f64,
    sigma: f64,
    m: f64,
    u0: &str,
    w: &str,
    radius: f64,
    cells: usize,
    dt: f64,
    horizon: f64,
    gate: bool,
    c0: f64,
    c_inf: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let par = params(dim, alpha, p, sigma, m, c0, c_inf)?;
    let forcing = ForcingProfile::from_params(&par).map_err(to_py)?;
    let (u0, w) = (profile(u0)?, profile(w)?);
    let cfg = SolverConfig { radius, cells, dt_init: dt, horizon, convergence_gate: gate, ..Default::default() };
    let out = py.detach(|| run(&par, &forcing, &u0, &w, &cfg)).map_err(to_py)?;
    to_object(py, &SimulationRecord::new(&par, &forcing, &u0, &w, &cfg, &out))
}

/// Certificate ladder `base^0 .. base^k_max`. `epsilon` selects the
/// unpowered test function: `"1/T"`, `"1/sqrtT"` or a number.
#[pyfunction]
#[pyo3(signature = (dim, p, w, alpha=0.0, sigma=0.0, m=0.0, base=10.0, k_max=8, epsilon=None))]
#[allow(clippy::too_many_arguments)]
fn certify<'py>(
    py: Python<'py>,
    dim: f64,
    p: f64,
    w: &str,
    alpha: f64,
    sigma: f64,
    m: f64,
    base: f64,
    k_max: u32,
    epsilon: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let par = params(dim, alpha, p, sigma, m, 1.0, 1.0)?;
    let forcing = ForcingProfile::from_params(&par).map_err(to_py)?;
    let w = profile(w)?;
    let test_function = match epsilon {
        None => TestFunction::PsiT,
        Some("1/T") => TestFunction::PhiT { epsilon: EpsilonRule::InverseT },
        Some("1/sqrtT") => TestFunction::PhiT { epsilon: EpsilonRule::InverseSqrtT },
        Some(other) => {
            let eps: f64 = other.parse().map_err(|_| PyValueError::new_err(format!("bad epsilon '{other}'")))?;
            TestFunction::PhiT { epsilon: EpsilonRule::Fixed { eps } }
        }
    };
    let ladder = geometric_ladder(base, k_max);
    let out = py.detach(|| certify_blowup(&par, &forcing, &w, &ladder, test_function)).map_err(to_py)?;
    to_object(py, &out)
}

#[pyfunction]
#[pyo3(signature = (dim, alpha, p, sigma))]
fn witness<'py>(py: Python<'py>, dim: f64, alpha: f64, p: f64, sigma: f64) -> PyResult<Bound<'py, PyAny>> {
    let par = params(dim, alpha, p, sigma, 0.0, 1.0, 1.0)?;
    to_object(py, &ge_exponent_witness(&par).map_err(to_py)?)
}

/// Runs a sweep described by `key = value` text and returns the CSV table.
#[pyfunction]
fn sweep(py: Python<'_>, config: &str) -> PyResult<String> {
    let spec = SweepSpec::from_config_text(config).map_err(to_py)?;
    let rows = py.detach(|| run_sweep(&spec)).map_err(to_py)?;
    Ok(phase_csv(&rows))
}

#[pymodule]
fn fujita_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(exponents, m)?)?;
    m.add_function(wrap_pyfunction!(mittag_leffler_e, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
