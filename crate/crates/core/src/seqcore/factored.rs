//! Sequences of the form `q_n * exp(-lambda_{n-1})` with `q` an exact sequence
//! and `lambda_k = sum_{m <= k} l_m` the cumulative log-decrement of an alpha
//! schedule `alpha_m = exp(-l_m)`.
//!
//! Keeping the transcendental factor separate makes every ratio comparison
//! between consecutive terms an exact sign test.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::{ratio_string, ratio_to_f64};
use super::{normalize_first, StructuredSequence};
use crate::{Error, Result};

/// Decay schedule `alpha_n = exp(-l_n)` with `l_n > 0` and `sum l_n < inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum AlphaSchedule {
    /// `l_n = 1/n^2`, total `pi^2/6`.
    #[default]
    InverseSquare,
    /// `l_n = first * ratio^(n-1)`, total `first / (1 - ratio)`.
    Geometric {
        #[serde(with = "ratio_string")]
        first: BigRational,
        #[serde(with = "ratio_string")]
        ratio: BigRational,
    },
}


impl AlphaSchedule {
    pub fn geometric(first: BigRational, ratio: BigRational) -> Result<Self> {
        if !first.is_positive() {
            return Err(Error::InvalidSchedule("first log-decrement must be positive".into()));
        }
        if !ratio.is_positive() || ratio >= BigRational::one() {
            return Err(Error::InvalidSchedule("geometric ratio must lie in (0, 1)".into()));
        }
        Ok(AlphaSchedule::Geometric { first, ratio })
    }

    /// Checks `0 < alpha_n < 1` and summability of `-ln alpha_n`.
    pub fn validate(&self) -> Result<()> {
        match self {
            AlphaSchedule::InverseSquare => Ok(()),
            AlphaSchedule::Geometric { first, ratio } => {
                Self::geometric(first.clone(), ratio.clone()).map(|_| ())
            }
        }
    }

    /// `l_n = -ln alpha_n`, exact.
    pub fn log_decrement(&self, n: usize) -> BigRational {
        assert!(n >= 1);
        match self {
            AlphaSchedule::InverseSquare => {
                BigRational::new(BigInt::one(), BigInt::from(n) * BigInt::from(n))
            }
            AlphaSchedule::Geometric { first, ratio } => first * num_traits::pow(ratio.clone(), n - 1),
        }
    }

    /// `lambda_n = sum_{m <= n} l_m`, exact; `lambda_0 = 0`.
    pub fn log_sum(&self, n: usize) -> BigRational {
        match self {
            AlphaSchedule::InverseSquare => (1..=n).map(|m| self.log_decrement(m)).sum(),
            AlphaSchedule::Geometric { first, ratio } => {
                // first * (1 - r^n) / (1 - r)
                let one = BigRational::one();
                first * (&one - num_traits::pow(ratio.clone(), n)) / (one - ratio)
            }
        }
    }

    pub fn log_sum_f64(&self, n: usize) -> f64 {
        match self {
            AlphaSchedule::InverseSquare => (1..=n).map(|m| 1.0 / (m as f64 * m as f64)).sum(),
            _ => ratio_to_f64(&self.log_sum(n)),
        }
    }

    /// `Lambda = sum_m l_m`.
    pub fn total_f64(&self) -> f64 {
        match self {
            AlphaSchedule::InverseSquare => std::f64::consts::PI * std::f64::consts::PI / 6.0,
            AlphaSchedule::Geometric { first, ratio } => {
                ratio_to_f64(&(first / (BigRational::one() - ratio)))
            }
        }
    }

    /// Rational `U >= Lambda`.
    ///
    /// For `1/m^2`: `1 + sum_{m >= 2} 1/(m(m-1)) = 2`.
    pub fn total_upper_bound(&self) -> BigRational {
        match self {
            AlphaSchedule::InverseSquare => BigRational::from_integer(2.into()),
            AlphaSchedule::Geometric { first, ratio } => first / (BigRational::one() - ratio),
        }
    }

    /// Rational lower bound on `exp(-Lambda)`, from `e < 3`.
    pub fn decay_lower_bound(&self) -> BigRational {
        let k = self.total_upper_bound().ceil().to_integer();
        let k = k.to_usize().expect("schedule total is small");
        BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(3), k))
    }

    pub fn describe(&self) -> String {
        match self {
            AlphaSchedule::InverseSquare => "alpha_n = exp(-1/n^2)".into(),
            AlphaSchedule::Geometric { first, ratio } => {
                format!("alpha_n = exp(-({first})*({ratio})^(n-1))")
            }
        }
    }

    pub fn total_description(&self) -> String {
        match self {
            AlphaSchedule::InverseSquare => "pi^2/6".into(),
            AlphaSchedule::Geometric { first, ratio } => {
                format!("{}", first / (BigRational::one() - ratio))
            }
        }
    }
}

/// `term(n) = rational(n) * exp(-schedule.log_sum(n - 1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredSequence {
    rational: StructuredSequence,
    schedule: AlphaSchedule,
}

/// One term in factored form: `rational * exp(exp_coeff)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoredTerm {
    pub n: usize,
    #[serde(with = "ratio_string")]
    pub rational: BigRational,
    #[serde(with = "ratio_string")]
    pub exp_coeff: BigRational,
}

impl FactoredSequence {
    pub fn new(rational: StructuredSequence, schedule: AlphaSchedule) -> Result<Self> {
        if !rational.is_exact() {
            return Err(Error::NotExact("factored sequences need an exact rational part"));
        }
        if !rational.is_sorted() {
            return Err(Error::Unsorted);
        }
        schedule.validate()?;
        Ok(FactoredSequence { rational, schedule })
    }

    pub fn rational_part(&self) -> &StructuredSequence {
        &self.rational
    }

    pub fn schedule(&self) -> &AlphaSchedule {
        &self.schedule
    }

    pub fn term_factored(&self, n: usize) -> FactoredTerm {
        FactoredTerm {
            n,
            rational: self.rational.term_exact(n).expect("exact rational part"),
            exp_coeff: -self.schedule.log_sum(n - 1),
        }
    }

    pub fn term_f64(&self, n: usize) -> f64 {
        self.rational.term_f64(n as u64) * (-self.schedule.log_sum_f64(n - 1)).exp()
    }

    pub fn partial_sum_f64(&self, n: usize) -> f64 {
        let mut lambda = 0.0;
        let mut sum = 0.0;
        for j in 1..=n {
            if j > 1 {
                lambda += ratio_to_f64(&self.schedule.log_decrement(j - 1));
            }
            sum += self.rational.term_f64(j as u64) * (-lambda).exp();
        }
        sum
    }

    pub fn limit_f64(&self) -> f64 {
        let q = self.rational.limit().value.to_f64();
        q * (-self.schedule.total_f64()).exp()
    }

    /// Rational lower bound on the limit; positive iff the rational part has a positive limit.
    pub fn limit_lower_bound(&self) -> BigRational {
        let q = self.rational.limit().value.into_exact().unwrap_or_else(BigRational::zero);
        q * self.schedule.decay_lower_bound()
    }

    /// True when `term(n)/term(n+1) = exp(l_n) * s_n/s_(n+1)` holds identically,
    /// i.e. the rational part is `s / s_1`.
    pub fn is_scaled_copy_of(&self, s: &StructuredSequence) -> bool {
        match normalize_first(s) {
            Ok(q) => q == self.rational,
            Err(_) => false,
        }
    }
}
