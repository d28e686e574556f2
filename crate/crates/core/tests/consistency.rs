//! Properties that tie the certificate, the solver and the sweep together.

use fujita_core::certify::{certify_blowup, geometric_ladder, EpsilonRule, TestFunction};
use fujita_core::evolve::forcing::ForcingProfile;
use fujita_core::evolve::mol::{run, OutcomeKind, SolverConfig};
use fujita_core::harness::sweep::{run_sweep, Agreement, Axis, SweepSpec};
use fujita_core::{Parameters, Profile};
use proptest::prelude::*;

fn params(dim: f64, alpha: f64, p: f64, sigma: f64, m: f64) -> Parameters {
    Parameters::with_scales(dim, alpha, p, sigma, m, 1.0, 1.0).unwrap()
}

#[test]
fn certified_problems_never_end_as_converged_global_candidates() {
    let w: Profile = "gaussian:0.01".parse().unwrap();
    let cfg = SolverConfig {
        radius: 100.0,
        cells: 2000,
        dt_init: 0.5,
        horizon: 1e5,
        convergence_gate: true,
        ..Default::default()
    };
    for p in [2.0, 4.0] {
        let par = params(1.0, 0.0, p, 0.0, 0.5);
        let forcing = ForcingProfile::from_params(&par).unwrap();
        let tf = TestFunction::PhiT { epsilon: EpsilonRule::InverseT };
        let ladder = certify_blowup(&par, &forcing, &w, &geometric_ladder(10.0, 6), tf).unwrap();
        assert!(ladder.first_certified.is_some(), "p = {p}");
        for u0 in ["zero", "gaussian:0.01", "signchanging:0.05"] {
            let out = run(&par, &forcing, &u0.parse::<Profile>().unwrap(), &w, &cfg).unwrap();
            assert!(
                !matches!(out.kind, OutcomeKind::GlobalCandidate { .. }),
                "p = {p}, u0 = {u0}: {:?}",
                out.kind
            );
        }
    }
}

#[test]
fn short_horizon_sweep_rows_explain_their_disagreement() {
    let spec = SweepSpec {
        base: params(3.0, 0.0, 1.3, 0.0, -1.0),
        axes: vec!["p:1.3:1.5:0.2".parse::<Axis>().unwrap()],
        u0: "signchanging:0.1".parse().unwrap(),
        w: "bump:1:2".parse().unwrap(),
        solver: SolverConfig { radius: 20.0, cells: 200, dt_init: 0.05, horizon: 2.0, ..Default::default() },
        output: None,
    };
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 2);
    // Blow-up happens near t = 10, well past the horizon.
    assert!(rows.iter().any(|r| r.agreement == Agreement::Inconsistent));
    for row in rows.iter().filter(|r| r.agreement == Agreement::Inconsistent) {
        let note = row.diagnostic.as_deref().unwrap_or("");
        assert!(note.contains("gate"), "{note}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn nonnegative_data_give_nonnegative_solutions(
        dim in prop::sample::select(vec![1.0, 2.0, 3.0, 4.5]),
        alpha in -1.0..1.0f64,
        p in 1.2..3.0f64,
        m in -1.0..1.0f64,
        a in 0.0..0.3f64,
        b in 0.0..0.3f64,
    ) {
        let par = params(dim, alpha, p, 0.0, m);
        let forcing = ForcingProfile::from_params(&par).unwrap();
        let cfg = SolverConfig { radius: 10.0, cells: 100, dt_init: 1e-2, horizon: 1.0, ..Default::default() };
        let out = run(&par, &forcing, &Profile::Gaussian { a }, &Profile::Bump { a: b, r0: 2.0 }, &cfg).unwrap();
        let min = out.final_state.values().iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-10, "min {min} for {par:?}");
    }
}
