//! Adversarial weights for noncompact operators.
//!
//! Given `s` with `lim s_j > 0`, the weight
//! `pi_1 = 1`, `pi_{n+1} = (alpha_1 ... alpha_n) s_{n+1} / s_1`
//! satisfies `pi_n / pi_{n+1} = exp(l_n) s_n / s_{n+1} > s_n / s_{n+1}` for every
//! `n`, and its limit `exp(-sum l_m) lim s / s_1` is positive because the
//! log-decrements are summable. The norm of `s` under `Phi_pi*` is then not
//! attained.

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::attain::{ratio_condition, TailProof};
use crate::seqcore::scalar::ratio_string;
use crate::seqcore::{
    AlphaSchedule, FactoredSequence, FactoredTerm, SequenceJson, SingularSequence, StructuredSequence,
};
use crate::snfunc::{MembershipClass, SNWeight};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryWeight {
    base: SNWeight,
    /// `lambda_n = sum_{m <= n} l_m` for `n = 0..cached`.
    alpha_log_sums: Vec<BigRational>,
    provenance: SingularSequence,
}

/// Number of cumulative log-sums kept alongside the weight.
const CACHED_LOG_SUMS: usize = 16;

pub fn build_adversary(s: &SingularSequence) -> Result<AdversaryWeight> {
    build_adversary_with(s, AlphaSchedule::InverseSquare)
}

pub fn build_adversary_with(s: &SingularSequence, schedule: AlphaSchedule) -> Result<AdversaryWeight> {
    if !s.is_exact() {
        return Err(Error::NotExact("adversary construction"));
    }
    if !s.limit().is_positive() {
        return Err(Error::CompactSource);
    }
    let s1 = s.term_exact(1).expect("exact");
    let rational = s.scale(&(BigRational::one() / s1))?;
    let factored = FactoredSequence::new(rational, schedule)?;
    let base = SNWeight::factored(factored)?;
    if base.class() != MembershipClass::PiHat {
        return Err(Error::InvalidWeight("adversary weight failed Pi-hat validation".into()));
    }
    let schedule = base.factored_repr().expect("factored").schedule();
    let alpha_log_sums = (0..=CACHED_LOG_SUMS).map(|n| schedule.log_sum(n)).collect();
    Ok(AdversaryWeight { base, alpha_log_sums, provenance: s.clone() })
}

impl AdversaryWeight {
    pub fn weight(&self) -> &SNWeight {
        &self.base
    }

    pub fn into_weight(self) -> SNWeight {
        self.base
    }

    pub fn source(&self) -> &SingularSequence {
        &self.provenance
    }

    pub fn factored(&self) -> &FactoredSequence {
        self.base.factored_repr().expect("adversary weights are factored")
    }

    pub fn schedule(&self) -> &AlphaSchedule {
        self.factored().schedule()
    }

    pub fn alpha_log_sums(&self) -> &[BigRational] {
        &self.alpha_log_sums
    }

    /// `pi_n` as `rational * exp(exp_coeff)`.
    pub fn term(&self, n: usize) -> FactoredTerm {
        match self.alpha_log_sums.get(n - 1) {
            Some(lambda) => FactoredTerm {
                n,
                rational: self.factored().rational_part().term_exact(n).expect("exact"),
                exp_coeff: -lambda.clone(),
            },
            None => self.factored().term_factored(n),
        }
    }

    /// `pi_n / pi_{n+1}` as `(rational ratio, exponent)`, meaning `ratio * exp(exponent)`.
    pub fn consecutive_ratio(&self, n: usize) -> (BigRational, BigRational) {
        let a = self.term(n);
        let b = self.term(n + 1);
        (a.rational / b.rational, a.exp_coeff - b.exp_coeff)
    }

    pub fn limit_f64(&self) -> f64 {
        self.factored().limit_f64()
    }

    /// Rational `0 < q <= lim pi_n`.
    pub fn limit_lower_bound(&self) -> BigRational {
        self.factored().limit_lower_bound()
    }
}

/// Result of checking `pi_n/pi_{n+1} > s_n/s_{n+1}` up to a horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioVerification {
    pub holds: bool,
    pub first_failure: Option<usize>,
    /// All-`n` certificate when one exists.
    pub symbolic: Option<TailProof>,
}

pub fn verify_ratio_condition(w: &SNWeight, s: &SingularSequence, horizon: u64) -> RatioVerification {
    let check = ratio_condition(w, s, horizon);
    let first_failure = check.first_failure;
    RatioVerification {
        holds: first_failure.is_none_or(|f| f as u64 > horizon),
        first_failure,
        symbolic: check.proof.filter(TailProof::is_symbolic),
    }
}

/// Wire form of an adversary weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryJson {
    pub source: SequenceJson,
    /// `pi_n = rational_n * exp(exp_coeff_n)` with `rational = s / s_1`.
    pub rational: SequenceJson,
    pub schedule: AlphaSchedule,
    pub terms: Vec<FactoredTerm>,
    /// The exponent converges to `-tail_exp_total`.
    pub tail_exp_total: String,
    pub limit: f64,
    #[serde(with = "ratio_string")]
    pub limit_lower_bound: BigRational,
    pub ratio_certificate: Option<TailProof>,
}

impl AdversaryWeight {
    pub fn to_json_record(&self, terms: usize) -> Result<AdversaryJson> {
        let check = verify_ratio_condition(&self.base, &self.provenance, 0);
        Ok(AdversaryJson {
            source: SequenceJson::try_from(self.provenance.seq())?,
            rational: SequenceJson::try_from(self.factored().rational_part())?,
            schedule: self.schedule().clone(),
            terms: (1..=terms).map(|n| self.term(n)).collect(),
            tail_exp_total: self.schedule().total_description(),
            limit: self.limit_f64(),
            limit_lower_bound: self.limit_lower_bound(),
            ratio_certificate: check.symbolic,
        })
    }

    pub fn from_json_record(j: &AdversaryJson) -> Result<Self> {
        let source = SingularSequence::new(StructuredSequence::try_from(j.source.clone())?)?;
        let w = build_adversary_with(&source, j.schedule.clone())?;
        let rational = StructuredSequence::try_from(j.rational.clone())?;
        if &rational != w.factored().rational_part() {
            return Err(Error::InvalidWeight("rational part does not match source".into()));
        }
        Ok(w)
    }
}
