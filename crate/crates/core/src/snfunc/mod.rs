//! Symmetrically norming functions `Phi_pi`, the extremal functions, and the
//! adjoint `Phi_pi*`.

mod ratio;
mod weight;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use ratio::{ratio_sup, Certification, RatioSup, ScanConfig, SupLocation, Trend};
pub use weight::{maximal_weight, MembershipClass, SNWeight, WeightRepr};

use crate::attain::DiagonalTraceElement;
use crate::seqcore::{Scalar, StructuredSequence};
use crate::{Error, Result};

/// Value of an s.n. function or its adjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SNFunctionValue {
    pub value: Scalar,
    /// Exact rational, with the supremum location proven.
    pub exact: bool,
}

impl SNFunctionValue {
    pub fn exact(q: BigRational) -> Self {
        SNFunctionValue { value: Scalar::Exact(q), exact: true }
    }

    fn from_scalar(value: Scalar) -> Self {
        let exact = value.is_exact();
        SNFunctionValue { value, exact }
    }
}

fn finite_sorted(xi: &StructuredSequence) -> Result<usize> {
    if !xi.is_sorted() {
        return Err(Error::Unsorted);
    }
    xi.support_len().ok_or(Error::NotFiniteSupport)
}

/// `Phi_pi(xi) = sum_j pi_j xi_j` for sorted finitely supported `xi`.
pub fn phi_pi(w: &SNWeight, xi: &StructuredSequence) -> Result<SNFunctionValue> {
    let m = finite_sorted(xi)?;
    let mut acc = Scalar::zero();
    for (j, pi) in (1..=m).zip(weights_iter(w)) {
        acc = &acc + &(&pi * &xi.term(j));
    }
    Ok(SNFunctionValue::from_scalar(acc))
}

fn weights_iter(w: &SNWeight) -> Box<dyn Iterator<Item = Scalar> + '_> {
    if w.is_exact() {
        Box::new((1..).map(move |j| w.term(j)))
    } else {
        Box::new(w.terms_f64().map(Scalar::Approx))
    }
}

/// Minimal s.n. function: `xi_1`.
pub fn phi_min(xi: &StructuredSequence) -> Result<SNFunctionValue> {
    let m = finite_sorted(xi)?;
    let v = if m == 0 { BigRational::zero() } else { xi.prefix()[0].clone() };
    Ok(SNFunctionValue::exact(v))
}

/// Maximal s.n. function: `sum_j xi_j`.
pub fn phi_max(xi: &StructuredSequence) -> Result<SNFunctionValue> {
    finite_sorted(xi)?;
    Ok(SNFunctionValue::exact(xi.prefix().iter().sum()))
}

/// `Phi_pi*(xi) = sup_n (sum_{j<=n} xi_j) / (sum_{j<=n} pi_j)`.
pub fn dual_norm_value(w: &SNWeight, xi: &StructuredSequence) -> Result<SNFunctionValue> {
    dual_norm_value_with(w, xi, &ScanConfig::default())
}

pub fn dual_norm_value_with(
    w: &SNWeight,
    xi: &StructuredSequence,
    cfg: &ScanConfig,
) -> Result<SNFunctionValue> {
    let sup = ratio_sup(w, xi, cfg)?;
    let exact = sup.is_exact();
    Ok(SNFunctionValue { value: sup.value, exact })
}

/// `Phi_pi` is equivalent to `Phi_1` exactly when `lim pi > 0`.
pub fn is_equivalent_to_maximal(w: &SNWeight) -> bool {
    w.has_positive_limit()
}

/// `||K||_{Phi_pi} = sum_j pi_j s_j(K)`.
pub fn trace_norm_phi(w: &SNWeight, k: &DiagonalTraceElement) -> Result<SNFunctionValue> {
    phi_pi(w, k.entries())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{frac, int};

    fn harmonic_weight(c: BigRational, a: BigRational) -> SNWeight {
        SNWeight::new(StructuredSequence::harmonic(c, a).unwrap()).unwrap()
    }

    fn finite(v: &[BigRational]) -> StructuredSequence {
        StructuredSequence::finite(v.to_vec()).unwrap()
    }

    fn ex(v: &SNFunctionValue) -> BigRational {
        v.value.as_exact().unwrap().clone()
    }

    #[test]
    fn phi_pi_examples() {
        let w = harmonic_weight(frac(1, 2), frac(1, 2));
        assert_eq!(ex(&phi_pi(&w, &finite(&[int(1)])).unwrap()), int(1));
        // 1 + 3/4
        assert_eq!(ex(&phi_pi(&w, &finite(&[int(1), int(1)])).unwrap()), frac(7, 4));
        assert_eq!(ex(&phi_pi(&maximal_weight(), &finite(&[int(1)])).unwrap()), int(1));
    }

    #[test]
    fn phi_pi_rejects_unsorted_and_infinite() {
        let w = maximal_weight();
        let unsorted = StructuredSequence::finite(vec![int(1), int(2)]).unwrap();
        assert!(matches!(phi_pi(&w, &unsorted), Err(Error::Unsorted)));
        let inf = StructuredSequence::constant(int(1)).unwrap();
        assert!(matches!(phi_pi(&w, &inf), Err(Error::NotFiniteSupport)));
    }

    #[test]
    fn extremal_examples() {
        let xi = finite(&[int(3), int(1)]);
        assert_eq!(ex(&phi_min(&xi).unwrap()), int(3));
        assert_eq!(ex(&phi_max(&xi).unwrap()), int(4));
        let e1 = finite(&[int(1)]);
        assert_eq!(ex(&phi_min(&e1).unwrap()), int(1));
        assert_eq!(ex(&phi_max(&e1).unwrap()), int(1));
        let ones = finite(&[int(1), int(1), int(1)]);
        assert_eq!(ex(&phi_min(&ones).unwrap()), int(1));
        assert_eq!(ex(&phi_max(&ones).unwrap()), int(3));
    }

    #[test]
    fn dual_norm_examples() {
        let s = StructuredSequence::harmonic(int(1), int(1)).unwrap();
        let w = harmonic_weight(frac(1, 2), frac(1, 2));
        let v = dual_norm_value(&w, &s).unwrap();
        assert!(v.exact);
        assert_eq!(ex(&v), int(2));

        let sigma = frac(7, 3);
        let rank1 = finite(std::slice::from_ref(&sigma));
        assert_eq!(ex(&dual_norm_value(&w, &rank1).unwrap()), sigma);

        let w3 = harmonic_weight(frac(1, 3), frac(2, 3));
        let sup = ratio_sup(&w3, &s, &ScanConfig::default()).unwrap();
        assert_eq!(sup.value, Scalar::Exact(int(3)));
        assert_eq!(sup.location, SupLocation::Limit);
        assert!(sup.is_certified());
    }

    #[test]
    fn equivalence_to_maximal() {
        assert!(is_equivalent_to_maximal(&harmonic_weight(frac(1, 2), frac(1, 2))));
        assert!(!is_equivalent_to_maximal(&harmonic_weight(int(0), int(1))));
    }

    #[test]
    fn trace_norm_examples() {
        let w = harmonic_weight(frac(1, 2), frac(1, 2));
        let k = DiagonalTraceElement::new(vec![int(1)]).unwrap();
        assert_eq!(ex(&trace_norm_phi(&w, &k).unwrap()), int(1));
        let zero = DiagonalTraceElement::new(vec![]).unwrap();
        assert_eq!(ex(&trace_norm_phi(&w, &zero).unwrap()), int(0));
        // 1/2 * (1 + 2/3)
        let w3 = harmonic_weight(frac(1, 3), frac(2, 3));
        let k = DiagonalTraceElement::new(vec![frac(1, 2), frac(1, 2)]).unwrap();
        assert_eq!(ex(&trace_norm_phi(&w3, &k).unwrap()), frac(5, 6));
    }
}
