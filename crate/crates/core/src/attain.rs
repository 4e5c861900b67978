//! Norms `||T||_{Phi_pi*}` of operators given by their singular values, and
//! whether the supremum over normalized diagonal trace-class `K` is attained.
//!
//! The feasible set `{K = diag(k), k nonincreasing, sum pi_j k_j = 1}` has the
//! scaled indicator prefixes `(1/W_n, ..., 1/W_n, 0, ...)` as extreme points,
//! so the norm is the supremum of the vertex ratios `r_n = S_n / W_n`.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::StepViolation;
use crate::seqcore::scalar::ratio_string;
use crate::seqcore::{AlphaSchedule, Scalar, SingularSequence, StructuredSequence};
use crate::snfunc::{
    phi_pi, ratio_sup, Certification, SNFunctionValue, SNWeight, ScanConfig, SupLocation,
    WeightRepr,
};
use crate::{Error, Result};

/// Diagonal trace-class operator `K = diag(s_1(K), s_2(K), ...)` with finite support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalTraceElement {
    entries: StructuredSequence,
    /// `||K||_{Phi_pi}` for the weight the element was built against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi_norm: Option<SNFunctionValue>,
}

impl DiagonalTraceElement {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        let entries = StructuredSequence::sorted(entries, crate::seqcore::TailModel::Zero)?;
        Ok(DiagonalTraceElement { entries, phi_norm: None })
    }

    /// Builds the element and caches its `Phi_pi` norm.
    pub fn with_weight(entries: Vec<BigRational>, w: &SNWeight) -> Result<Self> {
        let mut k = Self::new(entries)?;
        k.phi_norm = Some(phi_pi(w, &k.entries)?);
        Ok(k)
    }

    pub fn entries(&self) -> &StructuredSequence {
        &self.entries
    }

    /// `s_j(K)`, zero past the support.
    pub fn entry(&self, j: usize) -> BigRational {
        self.entries.term_exact(j).expect("finite support is exact")
    }

    pub fn support_len(&self) -> usize {
        self.entries.prefix().len()
    }

    pub fn phi_norm(&self) -> Option<&SNFunctionValue> {
        self.phi_norm.as_ref()
    }

    /// Scaled indicator of the first `k` coordinates, normalized to `Phi_pi`-norm 1
    /// when the weights are rational; otherwise the unscaled indicator with its
    /// (float) norm cached.
    pub fn vertex(w: &SNWeight, k: usize) -> Result<Self> {
        match w.partial_sum(k) {
            Scalar::Exact(total) => Self::with_weight(vec![BigRational::one() / total; k], w),
            Scalar::Approx(_) => Self::with_weight(vec![BigRational::one(); k], w),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Attained,
    NotAttained,
    HeuristicAttained,
    HeuristicNotAttained,
}

impl Verdict {
    pub fn is_heuristic(self) -> bool {
        matches!(self, Verdict::HeuristicAttained | Verdict::HeuristicNotAttained)
    }
}

/// Why the tail of the ratio condition holds for every `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailProof {
    /// For `n >= from`: `pi_n s_{n+1} - pi_{n+1} s_n = margin / (n (n+1)) > 0`.
    /// The gap strings give `pi_n/pi_{n+1} - 1` and `s_n/s_{n+1} - 1` on that range.
    Symbolic {
        from: usize,
        #[serde(with = "ratio_string")]
        margin: BigRational,
        weight_gap: String,
        sequence_gap: String,
    },
    /// `pi_n/pi_{n+1} = exp(l_n) s_n/s_{n+1}` identically, with `l_n > 0`.
    Adversary { schedule: AlphaSchedule },
    /// Checked numerically up to `checked_through` only.
    Horizon { checked_through: u64 },
}

impl TailProof {
    pub fn is_symbolic(&self) -> bool {
        !matches!(self, TailProof::Horizon { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `pi_n/pi_{n+1} > s_n/s_{n+1}` for all `n`: the explicit indices, then the tail proof.
    RatioCondition { checked_indices: Vec<usize>, tail: TailProof },
    /// Every finite vertex ratio stays below the limit ratio.
    LimitDominance {
        best_index: usize,
        best_ratio: Scalar,
        limit_ratio: Scalar,
        certification: Certification,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttainmentReport {
    pub norm_value: SNFunctionValue,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<DiagonalTraceElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax_index: Option<usize>,
}

/// `sum_j s_j(T) s_j(K)`.
pub fn pairing(s: &SingularSequence, k: &DiagonalTraceElement) -> Scalar {
    let mut acc = Scalar::zero();
    for (j, kj) in k.entries.prefix().iter().enumerate() {
        acc = &acc + &(&s.term(j + 1) * &Scalar::Exact(kj.clone()));
    }
    acc
}

pub fn operator_norm(w: &SNWeight, s: &SingularSequence) -> Result<SNFunctionValue> {
    operator_norm_with(w, s, &ScanConfig::default())
}

pub fn operator_norm_with(w: &SNWeight, s: &SingularSequence, cfg: &ScanConfig) -> Result<SNFunctionValue> {
    crate::snfunc::dual_norm_value_with(w, s.seq(), cfg)
}

pub fn check_attainment(w: &SNWeight, s: &SingularSequence) -> Result<AttainmentReport> {
    check_attainment_with(w, s, &ScanConfig::default())
}

pub fn check_attainment_with(
    w: &SNWeight,
    s: &SingularSequence,
    cfg: &ScanConfig,
) -> Result<AttainmentReport> {
    let sup = ratio_sup(w, s.seq(), cfg)?;
    let opaque = !s.is_exact() || w.structured().is_some_and(|ws| !ws.is_exact());
    let certified = sup.is_certified() && !opaque;
    let norm_value = SNFunctionValue { value: sup.value.clone(), exact: sup.is_exact() && !opaque };
    let report = match sup.location {
        SupLocation::Index { index } => AttainmentReport {
            norm_value,
            verdict: if certified { Verdict::Attained } else { Verdict::HeuristicAttained },
            witness: Some(DiagonalTraceElement::vertex(w, index)?),
            certificate: None,
            argmax_index: Some(index),
        },
        SupLocation::Limit => {
            let certificate = match certify_not_attained_with(w, s, cfg.horizon) {
                Ok(c) if certified == c.is_symbolic() => c,
                _ => {
                    let (best_index, best_ratio) = sup.best_finite.clone().unwrap_or((1, Scalar::zero()));
                    Certificate::LimitDominance {
                        best_index,
                        best_ratio,
                        limit_ratio: sup.limit_ratio.clone().unwrap_or_else(|| sup.value.clone()),
                        certification: sup.certification.clone(),
                    }
                }
            };
            AttainmentReport {
                norm_value,
                verdict: if certified { Verdict::NotAttained } else { Verdict::HeuristicNotAttained },
                witness: None,
                certificate: Some(certificate),
                argmax_index: None,
            }
        }
    };
    Ok(report)
}

impl Certificate {
    fn is_symbolic(&self) -> bool {
        match self {
            Certificate::RatioCondition { tail, .. } => tail.is_symbolic(),
            Certificate::LimitDominance { certification, .. } => {
                !matches!(certification, Certification::Heuristic { .. })
            }
        }
    }
}

/// Replaces `s_M(K)` and `s_{M+1}(K)` by their `pi`-weighted average `t`.
///
/// Keeps `||K||_{Phi_pi}` and monotonicity, and strictly increases the pairing
/// with `s` when `pi_M/pi_{M+1} > s_M/s_{M+1}`.
pub fn improvement_step(
    w: &SNWeight,
    s: &SingularSequence,
    k: &DiagonalTraceElement,
    m: usize,
) -> Result<DiagonalTraceElement> {
    if !w.is_exact() || !s.is_exact() {
        return Err(Error::NotExact("improvement step"));
    }
    if m == 0 {
        return Err(StepViolation::ZeroIndex.into());
    }
    let km = k.entry(m);
    let km1 = k.entry(m + 1);
    if km <= km1 {
        return Err(StepViolation::EntriesNotSeparated(m).into());
    }
    let ex = |x: Scalar| x.into_exact().expect("exact");
    let (pm, pm1) = (ex(w.term(m)), ex(w.term(m + 1)));
    let (sm, sm1) = (ex(s.term(m)), ex(s.term(m + 1)));
    if !sm1.is_positive() {
        return Err(StepViolation::ZeroSingularValue(m).into());
    }
    if &pm * &sm1 <= &pm1 * &sm {
        return Err(StepViolation::RatioCondition(m).into());
    }
    let t = (&pm * &km + &pm1 * &km1) / (&pm + &pm1);
    let mut entries = k.entries.prefix().to_vec();
    entries.resize(entries.len().max(m + 1), BigRational::zero());
    entries[m - 1] = t.clone();
    entries[m] = t;
    DiagonalTraceElement::with_weight(entries, w)
}

/// Outcome of checking `pi_n/pi_{n+1} > s_n/s_{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioConditionCheck {
    pub first_failure: Option<usize>,
    /// Indices verified one by one in exact arithmetic.
    pub checked_indices: Vec<usize>,
    /// All-`n` proof, present only when no failure exists.
    pub proof: Option<TailProof>,
}

pub fn ratio_condition(w: &SNWeight, s: &SingularSequence, horizon: u64) -> RatioConditionCheck {
    match w.repr() {
        WeightRepr::Structured(ws) if ws.is_exact() && s.is_exact() => exact_ratio_condition(ws, s.seq()),
        WeightRepr::Factored(f) if f.is_scaled_copy_of(s.seq()) && s.limit().is_positive() => {
            RatioConditionCheck {
                first_failure: None,
                checked_indices: Vec::new(),
                proof: Some(TailProof::Adversary { schedule: f.schedule().clone() }),
            }
        }
        _ => float_ratio_condition(w, s.seq(), horizon),
    }
}

fn exact_ratio_condition(w: &StructuredSequence, s: &StructuredSequence) -> RatioConditionCheck {
    let l = w.prefix().len().max(s.prefix().len());
    let ex = |seq: &StructuredSequence, j| seq.term_exact(j).expect("exact");
    let mut checked = Vec::with_capacity(l);
    for n in 1..=l {
        let (pn, pn1) = (ex(w, n), ex(w, n + 1));
        let (sn, sn1) = (ex(s, n), ex(s, n + 1));
        if !sn1.is_positive() || pn * &sn1 <= pn1 * &sn {
            return RatioConditionCheck { first_failure: Some(n), checked_indices: checked, proof: None };
        }
        checked.push(n);
    }
    let (c, a) = s.tail().harmonic_params().expect("exact");
    let (p, b) = w.tail().harmonic_params().expect("exact");
    let margin = &b * &c - &a * &p;
    if !margin.is_positive() {
        return RatioConditionCheck { first_failure: Some(l + 1), checked_indices: checked, proof: None };
    }
    RatioConditionCheck {
        first_failure: None,
        checked_indices: checked,
        proof: Some(TailProof::Symbolic {
            from: l + 1,
            margin,
            weight_gap: ratio_gap_formula(&p, &b),
            sequence_gap: ratio_gap_formula(&c, &a),
        }),
    }
}

fn float_ratio_condition(w: &SNWeight, s: &StructuredSequence, horizon: u64) -> RatioConditionCheck {
    let mut weights = w.terms_f64();
    let mut prev_w = weights.next().unwrap_or(1.0);
    let mut prev_s = s.term_f64(1);
    for n in 1..=horizon {
        let next_w = weights.next().unwrap_or(0.0);
        let next_s = s.term_f64(n + 1);
        if !(next_s > 0.0) || prev_w * next_s <= next_w * prev_s {
            return RatioConditionCheck {
                first_failure: Some(n as usize),
                checked_indices: Vec::new(),
                proof: None,
            };
        }
        prev_w = next_w;
        prev_s = next_s;
    }
    RatioConditionCheck {
        first_failure: None,
        checked_indices: Vec::new(),
        proof: Some(TailProof::Horizon { checked_through: horizon }),
    }
}

/// `x_n/x_{n+1} - 1 = a / (c n^2 + (c+a) n)` for `x_j = c + a/j`, with integer coefficients.
pub fn ratio_gap_formula(c: &BigRational, a: &BigRational) -> String {
    if a.is_zero() {
        return "0".into();
    }
    let coeffs = [a.clone(), c.clone(), c + a];
    let lcm = coeffs.iter().fold(num_bigint::BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<num_bigint::BigInt> = coeffs.iter().map(|q| (q * &lcm).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    let [num, quad, lin]: [num_bigint::BigInt; 3] =
        ints.into_iter().map(|x| x / &g).collect::<Vec<_>>().try_into().expect("three");
    let term = |coef: &num_bigint::BigInt, var: &str| {
        if coef.is_one() {
            var.to_string()
        } else {
            format!("{coef}{var}")
        }
    };
    let denom = match (quad.is_zero(), lin.is_zero()) {
        (true, _) => term(&lin, "n"),
        (false, true) => term(&quad, "n^2"),
        (false, false) => format!("({}+{})", term(&quad, "n^2"), term(&lin, "n")),
    };
    format!("{num}/{denom}")
}

/// Certificate that no normalized diagonal `K` attains the norm of `s`.
pub fn certify_not_attained(w: &SNWeight, s: &SingularSequence) -> Result<Certificate> {
    certify_not_attained_with(w, s, ScanConfig::default().horizon)
}

pub fn certify_not_attained_with(w: &SNWeight, s: &SingularSequence, horizon: u64) -> Result<Certificate> {
    if !s.limit().is_positive() {
        return Err(Error::CompactLimit);
    }
    let check = ratio_condition(w, s, horizon);
    if let Some(index) = check.first_failure {
        return Err(Error::RatioConditionFails { index });
    }
    Ok(Certificate::RatioCondition {
        checked_indices: check.checked_indices,
        tail: check.proof.expect("no failure implies proof"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{frac, int, TailModel};

    fn hw(c: BigRational, a: BigRational) -> SNWeight {
        SNWeight::new(StructuredSequence::harmonic(c, a).unwrap()).unwrap()
    }

    fn p_op() -> SingularSequence {
        SingularSequence::new(StructuredSequence::harmonic(int(1), int(1)).unwrap()).unwrap()
    }

    fn k(v: &[BigRational]) -> DiagonalTraceElement {
        DiagonalTraceElement::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&p_op(), &k(&[int(1)])), Scalar::Exact(int(2)));
        assert_eq!(pairing(&p_op(), &k(&[])), Scalar::Exact(int(0)));
        // (2 + 3/2)/2
        assert_eq!(pairing(&p_op(), &k(&[frac(1, 2), frac(1, 2)])), Scalar::Exact(frac(7, 4)));
    }

    #[test]
    fn operator_norm_examples() {
        let w = hw(frac(1, 2), frac(1, 2));
        assert_eq!(operator_norm(&w, &p_op()).unwrap().value, Scalar::Exact(int(2)));
        let rank1 = SingularSequence::finite(vec![int(5)]).unwrap();
        assert_eq!(operator_norm(&w, &rank1).unwrap().value, Scalar::Exact(int(5)));
        // identity against pi_j = (j+2)/(3j): 1/p = 3
        let id = SingularSequence::new(StructuredSequence::constant(int(1)).unwrap()).unwrap();
        let w3 = hw(frac(1, 3), frac(2, 3));
        assert_eq!(operator_norm(&w3, &id).unwrap().value, Scalar::Exact(int(3)));
    }

    #[test]
    fn example_attained() {
        let w = hw(frac(1, 2), frac(1, 2));
        let r = check_attainment(&w, &p_op()).unwrap();
        assert_eq!(r.verdict, Verdict::Attained);
        assert_eq!(r.argmax_index, Some(1));
        assert_eq!(r.witness.unwrap().entries().prefix(), &[int(1)]);
    }

    #[test]
    fn example_not_attained() {
        let w = hw(frac(1, 3), frac(2, 3));
        let r = check_attainment(&w, &p_op()).unwrap();
        assert_eq!(r.verdict, Verdict::NotAttained);
        match r.certificate.unwrap() {
            Certificate::RatioCondition { tail: TailProof::Symbolic { weight_gap, sequence_gap, .. }, .. } => {
                assert_eq!(weight_gap, "2/(n^2+3n)");
                assert_eq!(sequence_gap, "1/(n^2+2n)");
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn zero_operator_is_attained() {
        let w = hw(frac(1, 2), frac(1, 2));
        let zero = SingularSequence::finite(vec![]).unwrap();
        let r = check_attainment(&w, &zero).unwrap();
        assert_eq!(r.verdict, Verdict::Attained);
        assert_eq!(r.norm_value.value, Scalar::Exact(int(0)));
        assert_eq!(r.witness.unwrap().entries().prefix(), &[int(1)]);
    }

    #[test]
    fn improvement_example() {
        let w = hw(frac(1, 3), frac(2, 3));
        let k0 = k(&[int(1)]);
        let k1 = improvement_step(&w, &p_op(), &k0, 1).unwrap();
        assert_eq!(k1.entries().prefix(), &[frac(3, 5), frac(3, 5)]);
        assert_eq!(pairing(&p_op(), &k1), Scalar::Exact(frac(21, 10)));
        assert_eq!(k1.phi_norm().unwrap().value, Scalar::Exact(int(1)));
    }

    #[test]
    fn improvement_preconditions() {
        let w = hw(frac(1, 3), frac(2, 3));
        let flat = k(&[frac(3, 5), frac(3, 5)]);
        assert!(matches!(
            improvement_step(&w, &p_op(), &flat, 1),
            Err(Error::Step(StepViolation::EntriesNotSeparated(1)))
        ));
        let w2 = hw(frac(1, 2), frac(1, 2));
        assert!(matches!(
            improvement_step(&w2, &p_op(), &k(&[int(1)]), 1),
            Err(Error::Step(StepViolation::RatioCondition(1)))
        ));
        let short = SingularSequence::finite(vec![int(1)]).unwrap();
        assert!(matches!(
            improvement_step(&w, &short, &k(&[int(1)]), 1),
            Err(Error::Step(StepViolation::ZeroSingularValue(1)))
        ));
        assert!(matches!(
            improvement_step(&w, &p_op(), &k(&[int(1)]), 0),
            Err(Error::Step(StepViolation::ZeroIndex))
        ));
    }

    #[test]
    fn certificate_examples() {
        let w = hw(frac(1, 3), frac(2, 3));
        assert!(certify_not_attained(&w, &p_op()).is_ok());
        let id = SingularSequence::new(StructuredSequence::constant(int(1)).unwrap()).unwrap();
        let prefixed = SNWeight::pi_hat(
            StructuredSequence::new(vec![int(1), frac(9, 10)], TailModel::Harmonic { c: frac(1, 4), a: frac(1, 2) })
                .unwrap(),
        )
        .unwrap();
        assert!(certify_not_attained(&prefixed, &id).is_ok());
        let finite = SingularSequence::finite(vec![int(2), int(1)]).unwrap();
        assert!(matches!(certify_not_attained(&w, &finite), Err(Error::CompactLimit)));
        let w2 = hw(frac(1, 2), frac(1, 2));
        assert!(matches!(
            certify_not_attained(&w2, &p_op()),
            Err(Error::RatioConditionFails { index: 1 })
        ));
    }

    #[test]
    fn gap_formulas() {
        assert_eq!(ratio_gap_formula(&frac(1, 3), &frac(2, 3)), "2/(n^2+3n)");
        assert_eq!(ratio_gap_formula(&int(1), &int(1)), "1/(n^2+2n)");
        assert_eq!(ratio_gap_formula(&int(1), &int(0)), "0");
        assert_eq!(ratio_gap_formula(&int(0), &int(3)), "1/n");
    }

    #[test]
    fn report_round_trip() {
        let w = hw(frac(1, 3), frac(2, 3));
        for s in [p_op(), SingularSequence::finite(vec![int(3), int(1)]).unwrap()] {
            let r = check_attainment(&w, &s).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            let back: AttainmentReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
        }
    }
}
