use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::seqcore::{
    f64_to_ratio, FactoredSequence, Scalar, StructuredSequence, TailModel,
};
use crate::{Error, Result};

/// Which weight cone a sequence was verified to belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipClass {
    /// Strictly decreasing, first term 1, positive limit.
    PiHat,
    /// Nonincreasing, positive, first term 1.
    Pi,
    /// Properties only declared (opaque tails).
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightRepr {
    Structured(StructuredSequence),
    Factored(FactoredSequence),
}

/// Weight sequence `pi` defining `Phi_pi(xi) = sum_j pi_j xi_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SNWeight {
    repr: WeightRepr,
    class: MembershipClass,
}

impl SNWeight {
    pub fn new(weights: StructuredSequence) -> Result<Self> {
        if !weights.is_sorted() {
            return Err(Error::InvalidWeight("weights must be nonincreasing".into()));
        }
        let first_is_one = match weights.term(1) {
            Scalar::Exact(q) => q.is_one(),
            Scalar::Approx(x) => x == 1.0,
        };
        if !first_is_one {
            return Err(Error::InvalidWeight("first weight must equal 1".into()));
        }
        let l = weights.prefix().len();
        if weights.prefix().iter().any(|q| !q.is_positive()) {
            return Err(Error::InvalidWeight("weights must be positive".into()));
        }
        let class = match weights.tail() {
            TailModel::Zero => {
                return Err(Error::InvalidWeight("weights must be positive (zero tail)".into()))
            }
            TailModel::Opaque(t) => {
                if t.declared_limit() < 0.0 {
                    return Err(Error::InvalidWeight("negative declared limit".into()));
                }
                MembershipClass::General
            }
            TailModel::Constant(_) => MembershipClass::Pi,
            TailModel::Harmonic { c, a } => {
                let strict_prefix = weights.prefix().windows(2).all(|w| w[0] > w[1]);
                let junction = weights.term_exact(l + 1).expect("exact tail");
                let strict_junction = weights.prefix().last().is_none_or(|p| *p > junction);
                if c.is_positive() && a.is_positive() && strict_prefix && strict_junction {
                    MembershipClass::PiHat
                } else {
                    MembershipClass::Pi
                }
            }
        };
        Ok(SNWeight { repr: WeightRepr::Structured(weights), class })
    }

    /// Requires membership in the strictly decreasing, positive-limit cone.
    pub fn pi_hat(weights: StructuredSequence) -> Result<Self> {
        let w = Self::new(weights)?;
        if w.class != MembershipClass::PiHat {
            return Err(Error::InvalidWeight(
                "not strictly decreasing with positive limit".into(),
            ));
        }
        Ok(w)
    }

    /// Weights `q_n exp(-lambda_{n-1})`; `alpha_n < 1` makes them strictly decreasing.
    pub fn factored(f: FactoredSequence) -> Result<Self> {
        let q1 = f.rational_part().term_exact(1).expect("exact");
        if !q1.is_one() {
            return Err(Error::InvalidWeight("first weight must equal 1".into()));
        }
        let class = if f.limit_lower_bound().is_positive() {
            MembershipClass::PiHat
        } else {
            MembershipClass::Pi
        };
        Ok(SNWeight { repr: WeightRepr::Factored(f), class })
    }

    pub fn class(&self) -> MembershipClass {
        self.class
    }

    pub fn repr(&self) -> &WeightRepr {
        &self.repr
    }

    pub fn structured(&self) -> Option<&StructuredSequence> {
        match &self.repr {
            WeightRepr::Structured(s) => Some(s),
            WeightRepr::Factored(_) => None,
        }
    }

    pub fn factored_repr(&self) -> Option<&FactoredSequence> {
        match &self.repr {
            WeightRepr::Factored(f) => Some(f),
            WeightRepr::Structured(_) => None,
        }
    }

    /// Every term is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.structured().is_some_and(|s| s.is_exact())
    }

    pub fn term(&self, n: usize) -> Scalar {
        match &self.repr {
            WeightRepr::Structured(s) => s.term(n),
            WeightRepr::Factored(f) => Scalar::Approx(f.term_f64(n)),
        }
    }

    pub fn partial_sum(&self, n: usize) -> Scalar {
        match &self.repr {
            WeightRepr::Structured(s) => s.partial_sum(n),
            WeightRepr::Factored(f) => Scalar::Approx(f.partial_sum_f64(n)),
        }
    }

    pub fn limit(&self) -> Scalar {
        match &self.repr {
            WeightRepr::Structured(s) => s.limit().value,
            WeightRepr::Factored(f) => Scalar::Approx(f.limit_f64()),
        }
    }

    /// Whether the limit is provably (or, for opaque tails, declared) positive.
    pub fn has_positive_limit(&self) -> bool {
        match &self.repr {
            WeightRepr::Structured(s) => s.limit().is_positive(),
            WeightRepr::Factored(f) => f.limit_lower_bound().is_positive(),
        }
    }

    /// Streams the terms as floats in O(1) per term.
    pub fn terms_f64(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match &self.repr {
            WeightRepr::Structured(s) => Box::new((1u64..).map(move |j| s.term_f64(j))),
            WeightRepr::Factored(f) => {
                let mut lambda = 0.0f64;
                Box::new((1usize..).map(move |j| {
                    if j > 1 {
                        lambda += crate::seqcore::ratio_to_f64(&f.schedule().log_decrement(j - 1));
                    }
                    f.rational_part().term_f64(j as u64) * (-lambda).exp()
                }))
            }
        }
    }

    /// First `d` weights as rationals; float weights are converted exactly from their `f64` value.
    pub fn truncate(&self, d: usize) -> Vec<BigRational> {
        match &self.repr {
            WeightRepr::Structured(s) if s.is_exact() => s.truncate_exact(d).expect("exact"),
            _ => self.terms_f64().take(d).map(f64_to_ratio).collect(),
        }
    }

    /// Replaces the weight by a float model of itself.
    pub fn to_float_model(&self) -> Self {
        match &self.repr {
            WeightRepr::Structured(s) => SNWeight {
                repr: WeightRepr::Structured(s.to_float_model()),
                class: MembershipClass::General,
            },
            WeightRepr::Factored(_) => self.clone(),
        }
    }
}

/// Convenience: the weight `(1, 1, 1, ...)` of the maximal s.n. function.
pub fn maximal_weight() -> SNWeight {
    SNWeight::new(StructuredSequence::constant(BigRational::one()).expect("valid")).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{frac, int};

    fn weight(c: BigRational, a: BigRational) -> SNWeight {
        SNWeight::new(StructuredSequence::harmonic(c, a).unwrap()).unwrap()
    }

    #[test]
    fn classes() {
        assert_eq!(weight(frac(1, 2), frac(1, 2)).class(), MembershipClass::PiHat);
        assert_eq!(maximal_weight().class(), MembershipClass::Pi);
        // pi_j = 1/j: nonincreasing, limit 0
        assert_eq!(weight(int(0), int(1)).class(), MembershipClass::Pi);
        assert!(!weight(int(0), int(1)).has_positive_limit());
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(SNWeight::new(StructuredSequence::harmonic(frac(1, 2), frac(1, 4)).unwrap()).is_err());
        assert!(SNWeight::new(StructuredSequence::finite(vec![int(1)]).unwrap()).is_err());
        assert!(SNWeight::pi_hat(StructuredSequence::constant(int(1)).unwrap()).is_err());
        assert!(SNWeight::new(StructuredSequence::new(vec![int(1), frac(1, 2)], TailModel::Constant(int(1))).unwrap()).is_err());
    }

    #[test]
    fn send_sync() {
        fn f<T: Send + Sync>() {}
        f::<SNWeight>();
    }
}
