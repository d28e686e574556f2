//! Time evolution: method-of-lines solver, Picard iteration of the mild
//! formulation, and a comparison-principle check.

pub mod compare;
pub mod forcing;
pub mod mol;
pub mod picard;

pub use compare::{comparison_check, ComparisonReport};
pub use forcing::{ForcingProfile, ForcingShape};
pub use mol::{
    extrapolate_blowup_time, mol_step, run, MolStepper, NormTrend, OutcomeKind, Scheme, SimulationOutcome,
    SolverConfig, TracePoint,
};
pub use picard::{picard_iterate, PicardConfig, PicardReport};
