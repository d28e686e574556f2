//! Blow-up certificates from the test-function method, and exponent
//! witnesses for small-data global existence.

pub mod certificate;
pub mod cutoff;
pub mod witness;

pub use certificate::{
    certify_blowup, geometric_ladder, reverify, test_function_psi, BlowupCertificate, CertificateLadder,
    CertificateTerms, EpsilonRule, PsiSamples, Resolution, Reverification, ScalingReport, TestFunction, Verdict,
};
pub use witness::{
    ge_exponent_witness, ge_smallness_probe, global_existence_min_p, BetaArgs, ExponentWitness, ProbeRow,
    SmallnessReport,
};
