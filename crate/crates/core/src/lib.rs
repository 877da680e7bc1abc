//! Quadrature for Hadamard finite-part integrals of `T`-periodic functions
//! with a third-order pole,
//!
//! ```text
//! I[f] = FP int_a^b K(x) u(x) dx,   K(x) = cos(pi (x-t)/T) / sin^3(pi (x-t)/T),
//! ```
//!
//! together with the exactness identities of the rules on trigonometric
//! polynomials and their exponential error bounds for analytic `u`.

pub mod bounds;
pub mod domain;
pub mod error;
pub mod functions;
pub mod harness;
pub mod kernel;
pub mod rules;
pub mod spectral;
pub mod summation;

pub use domain::{
    distance_to_singularity, reduce_to_period, DerivSource, PeriodicDomain, QuadratureOutcome,
    Rule, SmoothFactor,
};
pub use error::{HfpError, Result};
pub use num_complex::Complex64;
