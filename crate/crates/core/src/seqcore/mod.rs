//! Nonnegative sequences given by a finite rational prefix and a structured tail.
//!
//! Three tail families are exact: the zero tail, a constant tail `c` and the
//! harmonic tail `j -> c + a/j`. Everything computed from them (terms,
//! partial sums, limits) is an exact rational. An opaque tail wraps an
//! arbitrary evaluator and a declared limit; results involving it are floats.

mod encoding;
mod factored;
mod harmonic;
pub mod scalar;

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use encoding::SequenceJson;
pub use factored::{AlphaSchedule, FactoredSequence, FactoredTerm};
pub use harmonic::harmonic;
pub use scalar::{f64_to_ratio, frac, int, parse_rational, ratio_to_f64, Scalar};

use crate::{Error, Result};

type TermFn = dyn Fn(u64) -> f64 + Send + Sync;

/// A tail given only by an evaluator and a declared limit.
#[derive(Clone)]
pub struct OpaqueTail {
    eval: Arc<TermFn>,
    limit: f64,
    eventually_nonincreasing: bool,
    label: String,
}

impl OpaqueTail {
    pub fn new(
        label: impl Into<String>,
        limit: f64,
        eventually_nonincreasing: bool,
        eval: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        OpaqueTail {
            eval: Arc::new(eval),
            limit,
            eventually_nonincreasing,
            label: label.into(),
        }
    }

    pub fn eval(&self, j: u64) -> f64 {
        (self.eval)(j)
    }

    pub fn declared_limit(&self) -> f64 {
        self.limit
    }

    pub fn eventually_nonincreasing(&self) -> bool {
        self.eventually_nonincreasing
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for OpaqueTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpaqueTail")
            .field("label", &self.label)
            .field("limit", &self.limit)
            .field("eventually_nonincreasing", &self.eventually_nonincreasing)
            .finish()
    }
}

impl PartialEq for OpaqueTail {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.eval, &other.eval) && self.label == other.label
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TailModel {
    Zero,
    Constant(BigRational),
    /// Term `j -> c + a/j` for every index `j` beyond the prefix.
    Harmonic { c: BigRational, a: BigRational },
    Opaque(OpaqueTail),
}

impl TailModel {
    /// `(c, a)` such that the tail term is `c + a/j`, for the exact families.
    pub fn harmonic_params(&self) -> Option<(BigRational, BigRational)> {
        match self {
            TailModel::Zero => Some((BigRational::zero(), BigRational::zero())),
            TailModel::Constant(c) => Some((c.clone(), BigRational::zero())),
            TailModel::Harmonic { c, a } => Some((c.clone(), a.clone())),
            TailModel::Opaque(_) => None,
        }
    }

    fn exact_term(&self, j: usize) -> Option<BigRational> {
        let (c, a) = self.harmonic_params()?;
        Some(c + a / BigRational::from_integer(j.into()))
    }

    fn canonical(self) -> TailModel {
        match self {
            TailModel::Constant(c) if c.is_zero() => TailModel::Zero,
            TailModel::Harmonic { c, a } if a.is_zero() => TailModel::Constant(c).canonical(),
            t => t,
        }
    }
}

/// A nonnegative sequence `prefix ++ tail` in canonical form.
///
/// Canonical form merges degenerate tails (`const 0` is the zero tail,
/// `harmonic c,0` is `const c`) and absorbs trailing prefix entries that
/// coincide with the tail formula, so equal sequences compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredSequence {
    prefix: Vec<BigRational>,
    tail: TailModel,
    sorted: bool,
}

impl StructuredSequence {
    pub fn new(prefix: Vec<BigRational>, tail: TailModel) -> Result<Self> {
        if let Some(q) = prefix.iter().find(|q| q.is_negative()) {
            return Err(Error::InvalidSequence(format!("negative prefix entry {q}")));
        }
        let tail = tail.canonical();
        let first_tail_index = prefix.len() + 1;
        match &tail {
            TailModel::Zero => {}
            TailModel::Constant(c) => {
                if c.is_negative() {
                    return Err(Error::InvalidSequence(format!("negative constant tail {c}")));
                }
            }
            TailModel::Harmonic { c, a } => {
                if c.is_negative() {
                    return Err(Error::InvalidSequence(format!("harmonic tail limit {c} < 0")));
                }
                let first = c + a / BigRational::from_integer(first_tail_index.into());
                if a.is_negative() && first.is_negative() {
                    return Err(Error::InvalidSequence(format!(
                        "harmonic tail term at j = {first_tail_index} is negative"
                    )));
                }
            }
            TailModel::Opaque(t) => {
                if !(t.limit >= 0.0 && t.limit.is_finite()) {
                    return Err(Error::InvalidSequence("opaque tail limit must be finite and nonnegative".into()));
                }
            }
        }
        let mut seq = StructuredSequence { prefix, tail, sorted: false };
        seq.absorb_prefix();
        seq.sorted = seq.compute_sorted();
        Ok(seq)
    }

    /// Like [`StructuredSequence::new`] but rejects sequences that are not nonincreasing.
    pub fn sorted(prefix: Vec<BigRational>, tail: TailModel) -> Result<Self> {
        let seq = Self::new(prefix, tail)?;
        if !seq.sorted {
            return Err(Error::Unsorted);
        }
        Ok(seq)
    }

    /// Finite-support sequence `(v1, ..., vk, 0, 0, ...)`.
    pub fn finite(values: Vec<BigRational>) -> Result<Self> {
        Self::new(values, TailModel::Zero)
    }

    /// Symmetric canonicalization of a finitely supported real sequence:
    /// absolute values sorted in nonincreasing order.
    pub fn canonicalize_finite(values: &[BigRational]) -> Self {
        let mut v: Vec<BigRational> = values.iter().map(|q| q.abs()).collect();
        v.sort_by(|a, b| b.cmp(a));
        Self::new(v, TailModel::Zero).expect("absolute values are nonnegative")
    }

    pub fn constant(c: BigRational) -> Result<Self> {
        Self::new(Vec::new(), TailModel::Constant(c))
    }

    pub fn harmonic(c: BigRational, a: BigRational) -> Result<Self> {
        Self::new(Vec::new(), TailModel::Harmonic { c, a })
    }

    pub fn prefix(&self) -> &[BigRational] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailModel {
        &self.tail
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    /// True when every term is an exact rational (no opaque tail).
    pub fn is_exact(&self) -> bool {
        !matches!(self.tail, TailModel::Opaque(_))
    }

    /// Number of nonzero-support entries when the tail is zero.
    pub fn support_len(&self) -> Option<usize> {
        match self.tail {
            TailModel::Zero => Some(self.prefix.len()),
            _ => None,
        }
    }

    pub fn term(&self, j: usize) -> Scalar {
        assert!(j >= 1, "sequence indices start at 1");
        if j <= self.prefix.len() {
            return Scalar::Exact(self.prefix[j - 1].clone());
        }
        match &self.tail {
            TailModel::Opaque(t) => Scalar::Approx(t.eval(j as u64)),
            tail => Scalar::Exact(tail.exact_term(j).expect("exact tail")),
        }
    }

    pub fn term_exact(&self, j: usize) -> Option<BigRational> {
        self.term(j).into_exact()
    }

    pub fn term_f64(&self, j: u64) -> f64 {
        if (j as usize) <= self.prefix.len() {
            return ratio_to_f64(&self.prefix[j as usize - 1]);
        }
        match &self.tail {
            TailModel::Zero => 0.0,
            TailModel::Constant(c) => ratio_to_f64(c),
            TailModel::Harmonic { c, a } => ratio_to_f64(c) + ratio_to_f64(a) / j as f64,
            TailModel::Opaque(t) => t.eval(j),
        }
    }

    /// `sum_{j <= n} term(j)`; exact harmonic numbers are used for harmonic tails.
    pub fn partial_sum(&self, n: usize) -> Scalar {
        assert!(n >= 1, "partial sums start at n = 1");
        let l = self.prefix.len();
        let head: BigRational = self.prefix[..n.min(l)].iter().sum();
        if n <= l {
            return Scalar::Exact(head);
        }
        match &self.tail {
            TailModel::Opaque(t) => {
                let tail: f64 = ((l + 1) as u64..=n as u64).map(|j| t.eval(j)).sum();
                Scalar::Approx(ratio_to_f64(&head) + tail)
            }
            tail => {
                let (c, a) = tail.harmonic_params().expect("exact tail");
                let count = BigRational::from_integer((n - l).into());
                let mut sum = head + c * count;
                if !a.is_zero() {
                    sum += a * (harmonic(n) - harmonic(l));
                }
                Scalar::Exact(sum)
            }
        }
    }

    pub fn limit(&self) -> SeqLimit {
        match &self.tail {
            TailModel::Zero => SeqLimit::exact(BigRational::zero()),
            TailModel::Constant(c) => SeqLimit::exact(c.clone()),
            TailModel::Harmonic { c, .. } => SeqLimit::exact(c.clone()),
            TailModel::Opaque(t) => SeqLimit {
                value: Scalar::Approx(t.limit),
                declared: true,
            },
        }
    }

    /// Multiplies every term by `factor >= 0`.
    pub fn scale(&self, factor: &BigRational) -> Result<Self> {
        if factor.is_negative() {
            return Err(Error::InvalidSequence("negative scale factor".into()));
        }
        let prefix = self.prefix.iter().map(|q| q * factor).collect();
        let tail = match &self.tail {
            TailModel::Zero => TailModel::Zero,
            TailModel::Constant(c) => TailModel::Constant(c * factor),
            TailModel::Harmonic { c, a } => TailModel::Harmonic { c: c * factor, a: a * factor },
            TailModel::Opaque(t) => {
                let inner = t.clone();
                let f = ratio_to_f64(factor);
                TailModel::Opaque(OpaqueTail::new(
                    format!("{}*{}", t.label, factor),
                    t.limit * f,
                    t.eventually_nonincreasing,
                    move |j| inner.eval(j) * f,
                ))
            }
        };
        Self::new(prefix, tail)
    }

    /// First `n` terms as rationals (exact families only).
    pub fn truncate_exact(&self, n: usize) -> Option<Vec<BigRational>> {
        (1..=n).map(|j| self.term_exact(j)).collect()
    }

    /// Replaces every exact term by its float evaluation behind an opaque tail.
    pub fn to_float_model(&self) -> Self {
        if !self.is_exact() {
            return self.clone();
        }
        let me = self.clone();
        let limit = ratio_to_f64(self.limit().value.as_exact().expect("exact limit"));
        let tail = OpaqueTail::new("float", limit, true, move |j| me.term_f64(j));
        StructuredSequence {
            prefix: Vec::new(),
            tail: TailModel::Opaque(tail),
            sorted: self.sorted,
        }
    }

    fn absorb_prefix(&mut self) {
        if matches!(self.tail, TailModel::Opaque(_)) {
            return;
        }
        while let Some(last) = self.prefix.last() {
            let j = self.prefix.len();
            if self.tail.exact_term(j).as_ref() == Some(last) {
                self.prefix.pop();
            } else {
                break;
            }
        }
    }

    fn compute_sorted(&self) -> bool {
        if self.prefix.windows(2).any(|w| w[0] < w[1]) {
            return false;
        }
        let l = self.prefix.len();
        match &self.tail {
            TailModel::Opaque(t) => {
                t.eventually_nonincreasing
                    && self.prefix.last().is_none_or(|p| ratio_to_f64(p) >= t.eval(l as u64 + 1))
            }
            TailModel::Harmonic { a, .. } if a.is_negative() => false,
            tail => {
                let first = tail.exact_term(l + 1).expect("exact tail");
                self.prefix.last().is_none_or(|p| *p >= first)
            }
        }
    }
}

impl fmt::Display for StructuredSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, q) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "] ++ ")?;
        match &self.tail {
            TailModel::Zero => write!(f, "0"),
            TailModel::Constant(c) => write!(f, "const {c}"),
            TailModel::Harmonic { c, a } => write!(f, "{c} + ({a})/j"),
            TailModel::Opaque(t) => write!(f, "opaque {}", t.label),
        }
    }
}

/// Limit of a sequence; `declared` marks opaque tails whose limit is taken on trust.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqLimit {
    pub value: Scalar,
    pub declared: bool,
}

impl SeqLimit {
    fn exact(q: BigRational) -> Self {
        SeqLimit { value: Scalar::Exact(q), declared: false }
    }

    pub fn is_positive(&self) -> bool {
        match &self.value {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Approx(x) => *x > 0.0,
        }
    }
}

/// Singular values `s_1 >= s_2 >= ... >= 0` of an operator, with a tail model.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSequence(StructuredSequence);

impl SingularSequence {
    pub fn new(seq: StructuredSequence) -> Result<Self> {
        if !seq.is_sorted() {
            return Err(Error::Unsorted);
        }
        Ok(SingularSequence(seq))
    }

    pub fn finite(values: Vec<BigRational>) -> Result<Self> {
        Self::new(StructuredSequence::finite(values)?)
    }

    pub fn seq(&self) -> &StructuredSequence {
        &self.0
    }

    pub fn into_inner(self) -> StructuredSequence {
        self.0
    }

    /// `lim s_j != 0`.
    pub fn is_noncompact(&self) -> bool {
        self.0.limit().is_positive()
    }
}

impl std::ops::Deref for SingularSequence {
    type Target = StructuredSequence;

    fn deref(&self) -> &StructuredSequence {
        &self.0
    }
}

impl fmt::Display for SingularSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Scalar multiple `1/first` of a sequence with positive first term.
pub(crate) fn normalize_first(seq: &StructuredSequence) -> Result<StructuredSequence> {
    let first = seq
        .term_exact(1)
        .ok_or(Error::NotExact("normalization"))?;
    if !first.is_positive() {
        return Err(Error::InvalidSequence("first term must be positive".into()));
    }
    seq.scale(&(BigRational::one() / first))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(c: BigRational, a: BigRational) -> StructuredSequence {
        StructuredSequence::harmonic(c, a).unwrap()
    }

    #[test]
    fn term_examples() {
        let s = StructuredSequence::new(vec![int(2)], TailModel::Harmonic { c: int(1), a: int(1) }).unwrap();
        assert_eq!(s.term(3), Scalar::Exact(frac(4, 3)));
        let s = StructuredSequence::finite(vec![int(1)]).unwrap();
        assert_eq!(s.term(5), Scalar::Exact(int(0)));
        let s = StructuredSequence::constant(int(1)).unwrap();
        assert_eq!(s.term(7), Scalar::Exact(int(1)));
    }

    #[test]
    fn prefix_absorbed_into_harmonic_tail() {
        let s = StructuredSequence::new(vec![int(2)], TailModel::Harmonic { c: int(1), a: int(1) }).unwrap();
        assert_eq!(s, h(int(1), int(1)));
        assert!(s.prefix().is_empty());
        let z = StructuredSequence::finite(vec![int(3), int(0), int(0)]).unwrap();
        assert_eq!(z.prefix(), &[int(3)]);
    }

    #[test]
    fn partial_sum_examples() {
        // direct summation: 2 + 3/2 + 4/3 = 29/6 = 3 + 11/6
        let s = h(int(1), int(1));
        let direct: BigRational = (1..=3).map(|j| int(1) + frac(1, j)).sum();
        assert_eq!(direct, int(3) + frac(11, 6));
        assert_eq!(s.partial_sum(3), Scalar::Exact(direct));
        assert_eq!(s.partial_sum(1), s.term(1));
        // pi_j = (j+1)/(2j): 1 + 3/4
        let w = h(frac(1, 2), frac(1, 2));
        assert_eq!(w.partial_sum(2), Scalar::Exact(frac(7, 4)));
    }

    #[test]
    fn limit_examples() {
        assert_eq!(h(int(1), int(1)).limit().value, Scalar::Exact(int(1)));
        assert_eq!(StructuredSequence::finite(vec![int(4)]).unwrap().limit().value, Scalar::Exact(int(0)));
        let c = StructuredSequence::constant(frac(1, 2)).unwrap();
        assert_eq!(c.limit(), SeqLimit { value: Scalar::Exact(frac(1, 2)), declared: false });
        let o = StructuredSequence::new(vec![], TailModel::Opaque(OpaqueTail::new("x", 0.5, true, |_| 0.5))).unwrap();
        assert!(o.limit().declared);
    }

    #[test]
    fn degenerate_tails_merge() {
        assert_eq!(
            StructuredSequence::harmonic(int(2), int(0)).unwrap(),
            StructuredSequence::constant(int(2)).unwrap()
        );
        assert_eq!(
            StructuredSequence::constant(int(0)).unwrap(),
            StructuredSequence::finite(vec![]).unwrap()
        );
    }

    #[test]
    fn rejects_negative_terms() {
        assert!(StructuredSequence::finite(vec![int(-1)]).is_err());
        // c + a/(L+1) < 0 with a < 0
        assert!(StructuredSequence::new(vec![int(5)], TailModel::Harmonic { c: int(1), a: int(-3) }).is_err());
        assert!(StructuredSequence::new(vec![int(5)], TailModel::Harmonic { c: int(1), a: int(-2) }).is_ok());
    }

    #[test]
    fn sortedness() {
        assert!(h(int(1), int(1)).is_sorted());
        assert!(!StructuredSequence::new(vec![int(1)], TailModel::Harmonic { c: int(1), a: int(-1) })
            .unwrap()
            .is_sorted());
        assert!(!StructuredSequence::new(vec![int(1)], TailModel::Constant(int(2))).unwrap().is_sorted());
        assert!(matches!(
            StructuredSequence::sorted(vec![int(1), int(2)], TailModel::Zero),
            Err(Error::Unsorted)
        ));
    }

    #[test]
    fn symmetric_canonicalization() {
        let s = StructuredSequence::canonicalize_finite(&[int(-1), int(3), int(0), int(2)]);
        assert_eq!(s.prefix(), &[int(3), int(2), int(1)]);
        assert!(s.is_sorted());
    }
}
