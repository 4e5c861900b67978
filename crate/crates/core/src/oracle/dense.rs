//! Small dense complex matrices: one-sided Jacobi SVD, polar decomposition, QR.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seqcore::{f64_to_ratio, SingularSequence};
use crate::{Error, Result};

pub const MAX_DIMENSION: usize = 64;

/// Off-diagonal tolerance for the Jacobi sweeps, relative to column norms.
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DenseJson", into = "DenseJson")]
pub struct DenseOperator {
    n: usize,
    data: Vec<Complex64>,
}

/// Wire form: rows of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct DenseJson {
    rows: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<DenseJson> for DenseOperator {
    type Error = Error;

    fn try_from(j: DenseJson) -> Result<Self> {
        let n = j.rows.len();
        let data = j.rows.into_iter().flatten().map(|[re, im]| Complex64::new(re, im)).collect();
        DenseOperator::new(n, data)
    }
}

impl From<DenseOperator> for DenseJson {
    fn from(m: DenseOperator) -> Self {
        DenseJson {
            rows: m.data.chunks(m.n.max(1)).take(m.n).map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }
}

impl DenseOperator {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n > MAX_DIMENSION {
            return Err(Error::Dimension(format!("n = {n} exceeds {MAX_DIMENSION}")));
        }
        if data.len() != n * n {
            return Err(Error::Dimension(format!("{} entries for an {n}x{n} matrix", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidSequence("matrix entries must be finite".into()));
        }
        Ok(DenseOperator { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        DenseOperator { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, f: f64) -> Self {
        DenseOperator { n: self.n, data: self.data.iter().map(|z| z * f).collect() }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_orthogonal_projection(&self, tol: f64) -> bool {
        (self - &self.adjoint()).max_abs() <= tol && (&(self * self) - self).max_abs() <= tol
    }

    fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for DenseOperator {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = DenseOperator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;

    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        DenseOperator { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;

    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        DenseOperator { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseOperator({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:.6}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `T = U diag(sigma) V*`, sigma nonincreasing. Columns of `U` for zero
/// singular values are left zero.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseOperator,
    pub sigma: Vec<f64>,
    pub v: DenseOperator,
}

pub fn svd(t: &DenseOperator) -> Svd {
    let n = t.n;
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|j| t.col(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n).map(|j| DenseOperator::identity(n).col(j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let tan = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + tan * tan).sqrt();
                let s = c * tan;
                for cols in [&mut a, &mut v] {
                    for i in 0..n {
                        let xp = cols[p][i];
                        let xq = cols[q][i] * phase;
                        cols[p][i] = xp * c - xq * s;
                        cols[q][i] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> =
        (0..n).map(|j| (a[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let sigma_max = order.first().map_or(0.0, |o| o.0);
    let mut u = DenseOperator::zeros(n);
    let mut vm = DenseOperator::zeros(n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &(s, j)) in order.iter().enumerate() {
        let s = if s <= f64::EPSILON * sigma_max { 0.0 } else { s };
        sigma.push(s);
        for i in 0..n {
            vm[(i, k)] = v[j][i];
            if s > 0.0 {
                u[(i, k)] = a[j][i] / s;
            }
        }
    }
    Svd { u, sigma, v: vm }
}

/// Nonincreasing singular values, each converted exactly from its `f64` value.
pub fn svd_values(t: &DenseOperator) -> SingularSequence {
    let values = svd(t).sigma.into_iter().map(f64_to_ratio).collect();
    SingularSequence::finite(values).expect("singular values are sorted and nonnegative")
}

/// `T = U |T|` with `U` a partial isometry with initial space `range(|T|)`.
pub fn polar_parts(t: &DenseOperator) -> (DenseOperator, DenseOperator) {
    let Svd { u, sigma, v } = svd(t);
    let n = t.n;
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let mut iso = DenseOperator::zeros(n);
    let mut abs = DenseOperator::zeros(n);
    for k in 0..n {
        let keep = sigma[k] > JACOBI_TOL * sigma_max;
        for i in 0..n {
            for j in 0..n {
                let vv = v[(i, k)] * v[(j, k)].conj();
                abs[(i, j)] += vv * sigma[k];
                if keep {
                    iso[(i, j)] += u[(i, k)] * v[(j, k)].conj();
                }
            }
        }
    }
    (iso, abs)
}

/// Uniform sample from the closed complex unit disk.
pub fn unit_disk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, theta)
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DenseOperator {
    let data = (0..n * n).map(|_| unit_disk(rng)).collect();
    DenseOperator::new(n, data).expect("dimension checked by caller")
}

/// Orthonormalizes the columns of `m` by modified Gram-Schmidt.
pub fn qr_q(m: &DenseOperator) -> DenseOperator {
    let n = m.n;
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.col(j)).collect();
    for j in 0..n {
        for k in 0..j {
            let r: Complex64 = cols[k].iter().zip(&cols[j]).map(|(q, x)| q.conj() * x).sum();
            let qk = cols[k].clone();
            for (x, q) in cols[j].iter_mut().zip(&qk) {
                *x -= r * q;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    let mut q = DenseOperator::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            q[(i, j)] = *z;
        }
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DenseOperator {
    qr_q(&random_matrix(rng, n))
}

/// Orthogonal projection onto the span of the first `rank` columns of a random unitary.
pub fn random_projection<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DenseOperator {
    let q = random_unitary(rng, n);
    let mut p = DenseOperator::zeros(n);
    for k in 0..rank.min(n) {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += q[(i, k)] * q[(j, k)].conj();
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{frac, int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unitary_error(u: &DenseOperator) -> f64 {
        (&(&u.adjoint() * u) - &DenseOperator::identity(u.dim())).max_abs()
    }

    #[test]
    fn diagonal_and_zero() {
        let t = DenseOperator::diagonal(&[2.0, 1.5]);
        assert_eq!(svd_values(&t).prefix(), &[int(2), frac(3, 2)]);
        let z = DenseOperator::zeros(3);
        assert_eq!(svd_values(&z).support_len(), Some(0));
        assert_eq!(svd(&z).sigma, vec![0.0; 3]);
    }

    #[test]
    fn recovers_constructed_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sigma = [3.0, 2.5, 1.0, 0.5, 0.125];
        let u = random_unitary(&mut rng, 5);
        let v = random_unitary(&mut rng, 5);
        let t = &(&u * &DenseOperator::diagonal(&sigma)) * &v.adjoint();
        let got = svd(&t).sigma;
        for (a, b) in got.iter().zip(&sigma) {
            assert!((a - b).abs() < 1e-10, "{got:?}");
        }
    }

    #[test]
    fn reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random_matrix(&mut rng, 6);
        let Svd { u, sigma, v } = svd(&t);
        let back = &(&u * &DenseOperator::diagonal(&sigma)) * &v.adjoint();
        assert!((&back - &t).max_abs() < 1e-12);
        assert!(unitary_error(&v) < 1e-12);
    }

    #[test]
    fn polar_examples() {
        let minus_i = DenseOperator::identity(3).scale(-1.0);
        let (u, abs) = polar_parts(&minus_i);
        assert!((&u - &minus_i).max_abs() < 1e-14);
        assert!((&abs - &DenseOperator::identity(3)).max_abs() < 1e-14);

        let pos = DenseOperator::diagonal(&[2.0, 1.5, 0.0]);
        let (u, abs) = polar_parts(&pos);
        assert!((&abs - &pos).max_abs() < 1e-14);
        assert!((&u - &DenseOperator::diagonal(&[1.0, 1.0, 0.0])).max_abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_matrix(&mut rng, 4);
        let (u, abs) = polar_parts(&t);
        assert!(unitary_error(&u) < 1e-10);
        assert!((&(&u * &abs) - &t).max_abs() < 1e-10);
        assert!((&abs - &abs.adjoint()).max_abs() < 1e-12);
    }

    #[test]
    fn singular_values_are_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            let t = random_matrix(&mut rng, n);
            let (_, abs) = polar_parts(&t);
            let u = random_unitary(&mut rng, n);
            let v = random_unitary(&mut rng, n);
            let s0 = svd(&t).sigma;
            let s1 = svd(&abs).sigma;
            let s2 = svd(&(&(&u * &t) * &v)).sigma;
            for k in 0..n {
                assert!((s0[k] - s1[k]).abs() < 1e-9 && (s0[k] - s2[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn trace_cyclicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=6 {
            let a = random_matrix(&mut rng, n);
            let b = random_matrix(&mut rng, n);
            assert!(((&a * &b).trace() - (&b * &a).trace()).norm() < 1e-10);
        }
    }

    #[test]
    fn projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_projection(&mut rng, 6, 3);
        assert!(p.is_orthogonal_projection(1e-12));
        assert!((p.trace().re - 3.0).abs() < 1e-12);
        assert!(!DenseOperator::diagonal(&[2.0]).is_orthogonal_projection(1e-12));
    }

    #[test]
    fn validation_and_serde() {
        assert!(DenseOperator::new(2, vec![Complex64::new(0.0, 0.0); 3]).is_err());
        assert!(DenseOperator::new(1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(DenseOperator::new(65, vec![Complex64::new(0.0, 0.0); 65 * 65]).is_err());
        let m = DenseOperator::from_fn(2, |i, j| Complex64::new(i as f64, j as f64)).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"rows":[[[0.0,0.0],[0.0,1.0]],[[1.0,0.0],[1.0,1.0]]]}"#);
        assert_eq!(serde_json::from_str::<DenseOperator>(&text).unwrap(), m);
    }
}
