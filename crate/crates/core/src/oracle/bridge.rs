//! Finite-dimensional checks that norms and their maximizers depend on `T`
//! only through its singular values.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dense::{polar_parts, random_matrix, svd, DenseOperator};
use super::lp::{lp_optimum, LpOptimum, TruncatedLP};
use crate::seqcore::{f64_to_ratio, ratio_to_f64};
use crate::snfunc::SNWeight;
use crate::{Error, Result};

/// Slack allowed when comparing sampled pairings with the LP bound.
pub const PAIRING_SLACK: f64 = 1e-9;
/// Entrywise tolerance for `M = M* = M^2`.
pub const PROJECTION_TOL: f64 = 1e-12;
pub const MAX_SAMPLING_DIMENSION: usize = 6;

/// `||T||_{Phi_pi*}` for a matrix with singular values `sigma`, by LP.
fn norm_lp(sigma: &[f64], w: &SNWeight) -> Result<LpOptimum> {
    if sigma.is_empty() {
        return Ok(LpOptimum { value: BigRational::from_integer(0.into()), x: vec![] });
    }
    let objective = sigma.iter().copied().map(f64_to_ratio).collect();
    lp_optimum(&TruncatedLP::new(objective, w.truncate(sigma.len()))?)
}

fn to_f64s(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(ratio_to_f64).collect()
}

/// `sum_j pi_j s_j(K)` in floating point.
pub fn phi_norm_f64(k: &DenseOperator, w: &SNWeight) -> f64 {
    svd(k).sigma.iter().zip(w.terms_f64()).map(|(s, p)| s * p).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub norm_t: f64,
    pub norm_abs: f64,
    /// `|Tr(|T| K)|` for the optimal diagonal `K` of `|T|`.
    pub pairing_abs: f64,
    /// `|Tr(T K U*)|`, the pairing of the transported competitor.
    pub pairing_transported: f64,
    pub transported_phi_norm: f64,
}

impl ModulusReport {
    pub fn passed(&self, tol: f64) -> bool {
        (self.norm_t - self.norm_abs).abs() <= tol
            && (self.pairing_abs - self.norm_abs).abs() <= tol
            && (self.pairing_transported - self.norm_t).abs() <= tol
            && self.transported_phi_norm <= 1.0 + tol
    }
}

pub fn verify_modulus_reduction(t: &DenseOperator, w: &SNWeight) -> Result<ModulusReport> {
    let (u, abs) = polar_parts(t);
    let norm_t = norm_lp(&svd(t).sigma, w)?;
    let abs_svd = svd(&abs);
    let norm_abs = norm_lp(&abs_svd.sigma, w)?;

    // K = V diag(x) V* is diagonal in the eigenbasis of |T|.
    let x = to_f64s(&norm_abs.x);
    let v = &abs_svd.v;
    let k = &(v * &DenseOperator::diagonal(&x)) * &v.adjoint();
    let transported = &k * &u.adjoint();
    Ok(ModulusReport {
        norm_t: ratio_to_f64(&norm_t.value),
        norm_abs: ratio_to_f64(&norm_abs.value),
        pairing_abs: (&abs * &k).trace().norm(),
        pairing_transported: (t * &transported).trace().norm(),
        transported_phi_norm: phi_norm_f64(&transported, w),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalViolation {
    pub trial: usize,
    pub k: DenseOperator,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub trials: usize,
    /// LP optimum over diagonal `K`.
    pub bound: f64,
    /// `|Tr(T K*)|` for `K* = V diag(x) U*` built from the LP optimizer.
    pub aligned_value: f64,
    pub max_sampled: f64,
    pub violations: Vec<DiagonalViolation>,
}

impl DiagonalReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `trials` random `K` normalized to `||K||_{Phi_pi} = 1` and checks
/// `|Tr(T K)| <= bound + PAIRING_SLACK`.
pub fn verify_diagonal_reduction<R: Rng + ?Sized>(
    t: &DenseOperator,
    w: &SNWeight,
    trials: usize,
    rng: &mut R,
) -> Result<DiagonalReport> {
    let n = t.dim();
    if n > MAX_SAMPLING_DIMENSION {
        return Err(Error::Dimension(format!("n = {n} exceeds {MAX_SAMPLING_DIMENSION}")));
    }
    let dec = svd(t);
    let opt = norm_lp(&dec.sigma, w)?;
    let bound = ratio_to_f64(&opt.value);
    let aligned = &(&dec.v * &DenseOperator::diagonal(&to_f64s(&opt.x))) * &dec.u.adjoint();
    let aligned_value = (t * &aligned).trace().norm();

    let mut violations = Vec::new();
    let mut max_sampled = 0.0f64;
    for trial in 0..trials {
        let raw = random_matrix(rng, n);
        let phi = phi_norm_f64(&raw, w);
        if phi == 0.0 {
            continue;
        }
        let k = raw.scale(1.0 / phi);
        let value = (t * &k).trace().norm();
        max_sampled = max_sampled.max(value);
        if value > bound + PAIRING_SLACK {
            violations.push(DiagonalViolation { trial, k, value });
        }
    }
    Ok(DiagonalReport { trials, bound, aligned_value, max_sampled, violations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceReport {
    pub norm_restricted: f64,
    pub norm_full: f64,
    /// Optimal diagonal of the LP for `T M`; it attains the norm.
    pub witness: Vec<String>,
    pub witness_pairing: f64,
}

impl SubspaceReport {
    pub fn contraction_holds(&self, tol: f64) -> bool {
        self.norm_restricted <= self.norm_full + tol
    }
}

pub fn verify_subspace_restriction(t: &DenseOperator, w: &SNWeight, m: &DenseOperator) -> Result<SubspaceReport> {
    if m.dim() != t.dim() {
        return Err(Error::Dimension(format!("T is {0}x{0}, M is {1}x{1}", t.dim(), m.dim())));
    }
    if !m.is_orthogonal_projection(PROJECTION_TOL) {
        return Err(Error::NotProjection);
    }
    let tm = t * m;
    let dec = svd(&tm);
    let restricted = norm_lp(&dec.sigma, w)?;
    let full = norm_lp(&svd(t).sigma, w)?;
    let x = to_f64s(&restricted.x);
    let k = &(&dec.v * &DenseOperator::diagonal(&x)) * &dec.u.adjoint();
    Ok(SubspaceReport {
        norm_restricted: ratio_to_f64(&restricted.value),
        norm_full: ratio_to_f64(&full.value),
        witness: restricted.x.iter().map(|q| q.to_string()).collect(),
        witness_pairing: (&tm * &k).trace().norm(),
    })
}

/// Rank-one `K = e_i e_j*`, used for the rank-one bound `|Tr(T K)| <= s_1(T)`.
pub fn rank_one_unit(n: usize, i: usize, j: usize) -> DenseOperator {
    let mut k = DenseOperator::zeros(n);
    k[(i, j)] = Complex64::new(1.0, 0.0);
    k
}
