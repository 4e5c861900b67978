//! Exact-rational simplex and the truncated norm LP.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::seqcore::scalar::ratio_string;
use crate::seqcore::ratio_to_f64;
use crate::{Error, Result};

/// `max c.x` subject to `A x = b`, `x >= 0`, rows of `A` given column-major.
#[derive(Clone, Debug)]
pub struct StandardForm {
    /// `columns[j][i] = A[i][j]`.
    pub columns: Vec<Vec<BigRational>>,
    pub b: Vec<BigRational>,
    pub c: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexSolution {
    pub value: BigRational,
    pub x: Vec<BigRational>,
    pub pivots: usize,
}

struct Tableau {
    columns: Vec<Vec<BigRational>>,
    columns_f64: Vec<Vec<f64>>,
    m: usize,
    basis: Vec<usize>,
    binv: Vec<Vec<BigRational>>,
    xb: Vec<BigRational>,
    pivots: usize,
}

impl Tableau {
    fn n(&self) -> usize {
        self.columns.len()
    }

    /// Column `j`, where indices `n..n+m` are the artificial unit columns.
    fn column(&self, j: usize) -> Vec<BigRational> {
        if j < self.n() {
            self.columns[j].clone()
        } else {
            let mut e = vec![BigRational::zero(); self.m];
            e[j - self.n()] = BigRational::one();
            e
        }
    }

    fn dot_column(&self, y: &[BigRational], j: usize) -> BigRational {
        if j < self.n() {
            y.iter()
                .zip(&self.columns[j])
                .filter(|(_, a)| !a.is_zero())
                .map(|(yi, a)| yi * a)
                .sum()
        } else {
            y[j - self.n()].clone()
        }
    }

    fn binv_times(&self, col: &[BigRational]) -> Vec<BigRational> {
        self.binv
            .iter()
            .map(|row| row.iter().zip(col).filter(|(_, a)| !a.is_zero()).map(|(r, a)| r * a).sum())
            .collect()
    }

    fn duals(&self, cost: &dyn Fn(usize) -> BigRational) -> Vec<BigRational> {
        let cb: Vec<BigRational> = self.basis.iter().map(|&j| cost(j)).collect();
        (0..self.m)
            .map(|k| cb.iter().zip(&self.binv).map(|(c, row)| c * &row[k]).sum())
            .collect()
    }

    /// Smallest-index column with positive reduced cost (Bland).
    fn entering(
        &self,
        cost: &dyn Fn(usize) -> BigRational,
        cost_f64: &dyn Fn(usize) -> f64,
        allowed: usize,
        y: &[BigRational],
    ) -> Option<usize> {
        let yf: Vec<f64> = y.iter().map(ratio_to_f64).collect();
        let y_scale: f64 = yf.iter().map(|v| v.abs()).sum();
        let in_basis = {
            let mut v = vec![false; self.n() + self.m];
            for &j in &self.basis {
                v[j] = true;
            }
            v
        };
        (0..allowed).find(|&j| {
            if in_basis[j] {
                return false;
            }
            // Float prefilter: skip columns whose reduced cost is clearly negative.
            if j < self.n() {
                let col = &self.columns_f64[j];
                let cj = cost_f64(j);
                let dot: f64 = yf.iter().zip(col).map(|(a, b)| a * b).sum();
                let scale = cj.abs() + y_scale * col.iter().map(|v| v.abs()).fold(0.0, f64::max);
                if cj - dot < -1e-9 * scale {
                    return false;
                }
            }
            (cost(j) - self.dot_column(y, j)).is_positive()
        })
    }

    fn pivot(&mut self, r: usize, entering: usize, d: &[BigRational]) {
        let dr = d[r].clone();
        let theta = &self.xb[r] / &dr;
        for i in 0..self.m {
            if i != r && !d[i].is_zero() {
                self.xb[i] = &self.xb[i] - &theta * &d[i];
            }
        }
        self.xb[r] = theta;
        let pivot_row: Vec<BigRational> = self.binv[r].iter().map(|v| v / &dr).collect();
        for i in 0..self.m {
            if i != r && !d[i].is_zero() {
                let f = d[i].clone();
                for (x, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = &*x - &f * p;
                    }
                }
            }
        }
        self.binv[r] = pivot_row;
        self.basis[r] = entering;
        self.pivots += 1;
    }

    /// Runs simplex iterations for `cost` over columns `0..allowed`.
    fn optimize(
        &mut self,
        cost: &dyn Fn(usize) -> BigRational,
        cost_f64: &dyn Fn(usize) -> f64,
        allowed: usize,
    ) -> Result<()> {
        loop {
            let y = self.duals(cost);
            let Some(j) = self.entering(cost, cost_f64, allowed, &y) else {
                return Ok(());
            };
            let d = self.binv_times(&self.column(j));
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..self.m {
                if d[i].is_positive() {
                    let ratio = &self.xb[i] / &d[i];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, j, &d);
        }
    }
}

fn identity(m: usize) -> Vec<Vec<BigRational>> {
    (0..m)
        .map(|i| (0..m).map(|k| if i == k { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

fn invert(mut a: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let m = a.len();
    let mut inv = identity(m);
    for col in 0..m {
        let p = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].clone();
        for k in 0..m {
            a[col][k] = &a[col][k] / &piv;
            inv[col][k] = &inv[col][k] / &piv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..m {
                    let t = &f * &a[col][k];
                    a[r][k] = &a[r][k] - t;
                    let t = &f * &inv[col][k];
                    inv[r][k] = &inv[r][k] - t;
                }
            }
        }
    }
    Some(inv)
}

/// Two-phase revised simplex with Bland's rule, exact throughout.
pub fn maximize(lp: &StandardForm) -> Result<SimplexSolution> {
    let n = lp.c.len();
    let m = lp.b.len();
    if lp.columns.len() != n || lp.columns.iter().any(|c| c.len() != m) {
        return Err(Error::Dimension("constraint matrix does not match b and c".into()));
    }
    let mut columns = lp.columns.clone();
    let mut b = lp.b.clone();
    for i in 0..m {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for col in columns.iter_mut() {
                col[i] = -col[i].clone();
            }
        }
    }
    let columns_f64 = columns.iter().map(|c| c.iter().map(ratio_to_f64).collect()).collect();
    let mut t = Tableau {
        columns,
        columns_f64,
        m,
        basis: (n..n + m).collect(),
        binv: identity(m),
        xb: b.clone(),
        pivots: 0,
    };

    let phase1 = |j: usize| if j >= n { -BigRational::one() } else { BigRational::zero() };
    let phase1_f64 = |j: usize| if j >= n { -1.0 } else { 0.0 };
    t.optimize(&phase1, &phase1_f64, n + m)?;
    if t.basis.iter().zip(&t.xb).any(|(&j, v)| j >= n && v.is_positive()) {
        return Err(Error::Infeasible);
    }

    // Drive zero-level artificials out of the basis, dropping redundant rows.
    let mut r = 0;
    while r < t.m {
        if t.basis[r] < n {
            r += 1;
            continue;
        }
        let replacement = (0..n).filter(|j| !t.basis.contains(j)).find_map(|j| {
            let d = t.binv_times(&t.column(j));
            (!d[r].is_zero()).then_some((j, d))
        });
        if let Some((j, d)) = replacement {
            t.pivot(r, j, &d);
            r += 1;
            continue;
        }
        // Row `row` is a combination of the others.
        let row = t.basis[r] - n;
        t.basis.remove(r);
        for col in t.columns.iter_mut() {
            col.remove(row);
        }
        for col in t.columns_f64.iter_mut() {
            col.remove(row);
        }
        b.remove(row);
        t.m -= 1;
        for j in t.basis.iter_mut() {
            if *j > n + row {
                *j -= 1;
            }
        }
        let bmat: Vec<Vec<BigRational>> = (0..t.m)
            .map(|i| {
                t.basis
                    .iter()
                    .map(|&j| if j < n { t.columns[j][i].clone() } else { identity(t.m)[j - n][i].clone() })
                    .collect()
            })
            .collect();
        t.binv = invert(bmat).ok_or(Error::Infeasible)?;
        t.xb = t.binv.iter().map(|row| row.iter().zip(&b).map(|(p, q)| p * q).sum()).collect();
        r = 0;
    }

    let c = &lp.c;
    let c_f64: Vec<f64> = c.iter().map(ratio_to_f64).collect();
    let phase2 = |j: usize| if j < n { c[j].clone() } else { BigRational::zero() };
    let phase2_f64 = |j: usize| if j < n { c_f64[j] } else { 0.0 };
    t.optimize(&phase2, &phase2_f64, n)?;

    let mut x = vec![BigRational::zero(); n];
    for (&j, v) in t.basis.iter().zip(&t.xb) {
        if j < n {
            x[j] = v.clone();
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
    Ok(SimplexSolution { value, x, pivots: t.pivots })
}

/// `max sum s_j x_j` over `x_1 >= ... >= x_d >= 0`, `sum pi_j x_j = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedLP {
    #[serde(with = "ratio_string::vec")]
    objective: Vec<BigRational>,
    #[serde(with = "ratio_string::vec")]
    weights: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOptimum {
    #[serde(with = "ratio_string")]
    pub value: BigRational,
    #[serde(with = "ratio_string::vec")]
    pub x: Vec<BigRational>,
}

fn nonincreasing(v: &[BigRational]) -> bool {
    v.windows(2).all(|p| p[0] >= p[1])
}

impl TruncatedLP {
    /// The objective may contain zeros (rank-deficient operators); weights must be positive.
    pub fn new(objective: Vec<BigRational>, weights: Vec<BigRational>) -> Result<Self> {
        if objective.is_empty() || objective.len() != weights.len() {
            return Err(Error::Dimension(format!(
                "objective has {} entries, weights {}",
                objective.len(),
                weights.len()
            )));
        }
        if objective.iter().any(Signed::is_negative) || !nonincreasing(&objective) {
            return Err(Error::InvalidSequence("objective must be nonnegative and nonincreasing".into()));
        }
        if weights.iter().any(|p| !p.is_positive()) || !nonincreasing(&weights) {
            return Err(Error::InvalidWeight("weights must be positive and nonincreasing".into()));
        }
        Ok(TruncatedLP { objective, weights })
    }

    pub fn dimension(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[BigRational] {
        &self.objective
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// `max_k (s_1 + ... + s_k) / (pi_1 + ... + pi_k)` by direct enumeration.
    pub fn vertex_max(&self) -> BigRational {
        let mut s = BigRational::zero();
        let mut p = BigRational::zero();
        let mut best: Option<BigRational> = None;
        for (sk, pk) in self.objective.iter().zip(&self.weights) {
            s += sk;
            p += pk;
            let r = &s / &p;
            if best.as_ref().is_none_or(|b| r > *b) {
                best = Some(r);
            }
        }
        best.expect("d >= 1")
    }
}

/// Solves the truncated LP by simplex on `d_k = x_k - x_{k+1} >= 0`.
pub fn lp_optimum(p: &TruncatedLP) -> Result<LpOptimum> {
    let mut s_acc = BigRational::zero();
    let mut w_acc = BigRational::zero();
    let mut c = Vec::with_capacity(p.dimension());
    let mut columns = Vec::with_capacity(p.dimension());
    for (sk, pk) in p.objective.iter().zip(&p.weights) {
        s_acc += sk;
        w_acc += pk;
        c.push(s_acc.clone());
        columns.push(vec![w_acc.clone()]);
    }
    let sol = maximize(&StandardForm { columns, b: vec![BigRational::one()], c })?;
    let mut x = vec![BigRational::zero(); p.dimension()];
    let mut acc = BigRational::zero();
    for k in (0..p.dimension()).rev() {
        acc += &sol.x[k];
        x[k] = acc.clone();
    }
    Ok(LpOptimum { value: sol.value, x })
}
