//! Numerical laboratory for the forced semilinear heat equation
//!
//! ```text
//! u_t - Δu = |x|^α |u|^p + ζ(t) w(x),   u(0) = u0,   x ∈ ℝ^N
//! ```
//!
//! The crate is organised bottom-up:
//!
//! - [`params`]: problem parameters and closed-form critical exponents.
//! - [`grid`] / [`profile`]: radial grids, sampled fields, named data profiles.
//! - [`heatsem`]: exact heat semigroup paths (N = 1, 3), the weighted smoothing
//!   operator and empirical checks of its decay estimate.
//! - [`specfun`]: Mittag-Leffler and Beta functions, singular Gronwall bounds.
//! - [`evolve`]: method-of-lines solver with blow-up detection, a Picard
//!   (Duhamel) integrator and a comparison-principle check.
//! - [`certify`]: test-function blow-up certificates and exponent witnesses for
//!   small-data global existence.
//! - [`harness`]: configuration files, parameter sweeps and persistence.

pub mod certify;
pub mod digest;
pub mod error;
pub mod evolve;
pub mod grid;
pub mod harness;
pub mod heatsem;
pub mod params;
pub mod profile;
pub mod quad;
pub mod specfun;

pub use error::{LabError, Result};
pub use grid::{NuWeight, RadialField, RadialGrid};
pub use params::{Exponent, ExponentReport, Parameters};
pub use profile::{Profile, RadialData};
