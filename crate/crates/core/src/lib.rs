//! Symmetric operator norms `||T||_{Phi_pi*}` for operators described by their
//! singular values, attainment of those norms, and adversarial weights that
//! separate compact from noncompact operators.
//!
//! - [`seqcore`]: exact sequences with zero, constant and harmonic tails.
//! - [`snfunc`]: weights `pi`, the functions `Phi_pi`, `Phi_1`, `Phi_inf` and the adjoint `Phi_pi*`.
//! - [`attain`]: operator norms, witnesses, improvement steps and non-attainment certificates.
//! - [`adversary`]: weights that defeat attainment for a given noncompact operator.
//! - [`oracle`]: exact simplex and dense-matrix cross-checks.

pub mod adversary;
pub mod attain;
mod error;
pub mod oracle;
pub mod sampling;
pub mod seqcore;
pub mod snfunc;

pub use error::{Error, Result, StepViolation};
