//! Independent checks: an exact simplex for truncated norm problems and a
//! dense-matrix bridge between operators and their singular values.

mod bridge;
mod dense;
mod lp;

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

pub use bridge::{
    phi_norm_f64, rank_one_unit, verify_diagonal_reduction, verify_modulus_reduction,
    verify_subspace_restriction, DiagonalReport, DiagonalViolation, ModulusReport, SubspaceReport,
    MAX_SAMPLING_DIMENSION, PAIRING_SLACK, PROJECTION_TOL,
};
pub use dense::{
    polar_parts, qr_q, random_matrix, random_projection, random_unitary, svd, svd_values, unit_disk,
    DenseOperator, Svd, MAX_DIMENSION,
};
pub use lp::{lp_optimum, maximize, LpOptimum, SimplexSolution, StandardForm, TruncatedLP};

use crate::sampling;
use crate::Result;

/// Passed / total counts for one suite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub total: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.total += 1;
        self.passed += usize::from(ok);
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

impl Add for Tally {
    type Output = Tally;

    fn add(self, o: Tally) -> Tally {
        Tally { passed: self.passed + o.passed, total: self.total + o.total }
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.passed, self.total)
    }
}

/// Trial counts for [`run_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteBudget {
    pub lp: usize,
    pub modulus: usize,
    pub diagonal: usize,
}

impl Default for SuiteBudget {
    fn default() -> Self {
        SuiteBudget { lp: 100, modulus: 50, diagonal: 200 }
    }
}

impl SuiteBudget {
    pub fn uniform(n: usize) -> Self {
        SuiteBudget { lp: n, modulus: n, diagonal: n }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub lp: Tally,
    pub modulus: Tally,
    pub diagonal: Tally,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.lp.all_passed() && self.modulus.all_passed() && self.diagonal.all_passed()
    }

    /// Combines summaries of disjoint trial ranges.
    pub fn merge(&self, o: &SuiteSummary) -> SuiteSummary {
        SuiteSummary {
            seed: self.seed,
            lp: self.lp + o.lp,
            modulus: self.modulus + o.modulus,
            diagonal: self.diagonal + o.diagonal,
        }
    }
}

impl fmt::Display for SuiteSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = if self.all_passed() { "all checks passed" } else { "checks failed" };
        write!(
            f,
            "{head}: lp=vertex ({}), modulus-reduction ({}), diagonal-reduction ({})",
            self.lp, self.modulus, self.diagonal
        )
    }
}

const LP_SUITE: u64 = 1;
const MODULUS_SUITE: u64 = 2;
const DIAGONAL_SUITE: u64 = 3;
const LP_MAX_DIMENSION: usize = 12;

/// Modulus tolerance used by the suite.
pub const MODULUS_TOL: f64 = 1e-9;

/// Runs the three randomized suites; trial `i` of each suite draws from its own stream.
pub fn run_suite(seed: u64, budget: SuiteBudget) -> Result<SuiteSummary> {
    let mut summary = SuiteSummary { seed, ..Default::default() };
    for i in 0..budget.lp {
        let mut rng = sampling::trial_rng(seed, LP_SUITE, i as u64);
        let p = sampling::random_truncation(&mut rng, LP_MAX_DIMENSION);
        summary.lp.record(lp_optimum(&p)?.value == p.vertex_max());
    }
    for i in 0..budget.modulus {
        let mut rng = sampling::trial_rng(seed, MODULUS_SUITE, i as u64);
        let w = sampling::random_pi_hat(&mut rng);
        let t = sampling::random_matrix(&mut rng, MAX_SAMPLING_DIMENSION);
        summary.modulus.record(verify_modulus_reduction(&t, &w)?.passed(MODULUS_TOL));
    }
    for i in 0..budget.diagonal {
        let mut rng = sampling::trial_rng(seed, DIAGONAL_SUITE, i as u64);
        let w = sampling::random_pi_hat(&mut rng);
        let t = sampling::random_matrix(&mut rng, MAX_SAMPLING_DIMENSION);
        summary.diagonal.record(verify_diagonal_reduction(&t, &w, 1, &mut rng)?.passed());
    }
    Ok(summary)
}
