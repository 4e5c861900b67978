//! Supremum of the vertex ratios `r_n = (sum_{j<=n} xi_j) / (sum_{j<=n} pi_j)`.
//!
//! For exact tails beyond index `L` write `xi_j = c + a/j`, `pi_j = p + b/j`.
//! Then `S_n = c n + a H_n + A` and `W_n = p n + b H_n + B` for `n >= L`, and
//! the sign of `r_{n+1} - r_n` equals the sign of
//!
//! ```text
//! E_n = -delta ((n+1) H_n - n) + (n+1) gamma + beta,
//! delta = a p - b c,  gamma = c B - p A,  beta = a B - b A.
//! ```
//!
//! `E_n / (n+1) = -delta h(n) + gamma + beta/(n+1)` with
//! `h(n) = H_n - n/(n+1)` strictly increasing and unbounded, which pins down
//! where `r_n` becomes monotone and lets the supremum be decided exactly.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::weight::{SNWeight, WeightRepr};
use crate::seqcore::{Scalar, StructuredSequence};
use crate::{Error, Result};

/// Scan limits for the supremum search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    /// Float scan length used when no exact certificate is available.
    pub horizon: u64,
    /// Largest index scanned in exact arithmetic before giving up on a certificate.
    pub exact_limit: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { horizon: 1_000_000, exact_limit: 4096 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupLocation {
    /// Smallest index achieving the supremum.
    Index { index: usize },
    /// Approached only as `n -> infinity`.
    Limit,
}

/// How the location of the supremum was established.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certification {
    /// `xi` vanishes past `support`, so `r_n` strictly decreases there.
    FiniteSupport { support: usize },
    /// `r_n` is monotone (in the given direction) for every `n >= from`.
    Monotone { from: usize, trend: Trend },
    /// `r_n` first decreases, then increases towards its limit, on `n >= from`.
    Valley { from: usize },
    /// `pi_n/pi_{n+1} > xi_n/xi_{n+1}` for all `n`, so `r_n` is strictly increasing.
    RatioCondition,
    /// Float scan only; no proof.
    Heuristic { horizon: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioSup {
    pub value: Scalar,
    pub location: SupLocation,
    /// Largest ratio among the indices inspected, with its smallest index.
    pub best_finite: Option<(usize, Scalar)>,
    /// `lim r_n = lim xi / lim pi` for infinite-support `xi`.
    pub limit_ratio: Option<Scalar>,
    pub certification: Certification,
}

impl RatioSup {
    pub fn is_certified(&self) -> bool {
        !matches!(self.certification, Certification::Heuristic { .. })
    }

    pub fn is_exact(&self) -> bool {
        self.is_certified() && self.value.is_exact()
    }
}

pub fn ratio_sup(w: &SNWeight, xi: &StructuredSequence, cfg: &ScanConfig) -> Result<RatioSup> {
    if !xi.is_sorted() {
        return Err(Error::Unsorted);
    }
    if let Some(m) = xi.support_len() {
        return Ok(finite_support_sup(w, xi, m));
    }
    if !w.has_positive_limit() {
        return Err(Error::DualNormMayBeInfinite);
    }
    match w.repr() {
        WeightRepr::Structured(ws) if ws.is_exact() && xi.is_exact() => {
            if let Some(sup) = exact_sup(ws, xi, cfg) {
                return Ok(sup);
            }
        }
        WeightRepr::Factored(f) if xi.limit().is_positive() && f.is_scaled_copy_of(xi) => {
            // Strictly increasing ratios: the supremum is the Stolz-Cesaro limit.
            let limit = xi.limit().value.to_f64() / f.limit_f64();
            return Ok(RatioSup {
                value: Scalar::Approx(limit),
                location: SupLocation::Limit,
                best_finite: None,
                limit_ratio: Some(Scalar::Approx(limit)),
                certification: Certification::RatioCondition,
            });
        }
        _ => {}
    }
    Ok(heuristic_sup(w, xi, cfg.horizon))
}

fn finite_support_sup(w: &SNWeight, xi: &StructuredSequence, m: usize) -> RatioSup {
    if m == 0 {
        return RatioSup {
            value: Scalar::zero(),
            location: SupLocation::Index { index: 1 },
            best_finite: Some((1, Scalar::zero())),
            limit_ratio: None,
            certification: Certification::FiniteSupport { support: 0 },
        };
    }
    let mut best: Option<(usize, Scalar)> = None;
    if w.is_exact() {
        let ws = w.structured().expect("exact");
        let mut s = BigRational::zero();
        let mut t = BigRational::zero();
        for n in 1..=m {
            s += xi.term_exact(n).expect("finite support is exact");
            t += ws.term_exact(n).expect("exact weight");
            let r = Scalar::Exact(&s / &t);
            if best.as_ref().is_none_or(|(_, b)| r.cmp_value(b).is_gt()) {
                best = Some((n, r));
            }
        }
    } else {
        let mut s = 0.0;
        let mut t = 0.0;
        for (i, pi) in w.terms_f64().take(m).enumerate() {
            s += xi.term_f64(i as u64 + 1);
            t += pi;
            let r = Scalar::Approx(s / t);
            if best.as_ref().is_none_or(|(_, b)| r.cmp_value(b).is_gt()) {
                best = Some((i + 1, r));
            }
        }
    }
    let (index, value) = best.expect("m >= 1");
    RatioSup {
        value: value.clone(),
        location: SupLocation::Index { index },
        best_finite: Some((index, value)),
        limit_ratio: None,
        certification: Certification::FiniteSupport { support: m },
    }
}

/// Incremental exact partial sums and harmonic numbers.
struct Scanner<'a> {
    xi: &'a StructuredSequence,
    w: &'a StructuredSequence,
    n: usize,
    s: BigRational,
    t: BigRational,
    h: BigRational,
    best: Option<(usize, BigRational)>,
}

impl<'a> Scanner<'a> {
    fn new(xi: &'a StructuredSequence, w: &'a StructuredSequence) -> Self {
        Scanner {
            xi,
            w,
            n: 0,
            s: BigRational::zero(),
            t: BigRational::zero(),
            h: BigRational::zero(),
            best: None,
        }
    }

    fn step(&mut self) {
        self.n += 1;
        let n = self.n;
        self.s += self.xi.term_exact(n).expect("exact");
        self.t += self.w.term_exact(n).expect("exact");
        self.h += BigRational::new(1.into(), n.into());
        let r = &self.s / &self.t;
        if self.best.as_ref().is_none_or(|(_, b)| r > *b) {
            self.best = Some((n, r));
        }
    }

    fn advance_to(&mut self, n: usize) {
        while self.n < n {
            self.step();
        }
    }

    fn ratio(&self) -> BigRational {
        &self.s / &self.t
    }
}

struct TailCoefficients {
    delta: BigRational,
    gamma: BigRational,
    beta: BigRational,
}

impl TailCoefficients {
    /// `E_n` at the scanner's current index.
    fn e(&self, sc: &Scanner<'_>) -> BigRational {
        let n = BigRational::from_integer(sc.n.into());
        let np1 = &n + BigRational::one();
        -&self.delta * (&np1 * &sc.h - &n) + &np1 * &self.gamma + &self.beta
    }

    /// True when `E_m` has the eventual sign for every `m >= sc.n`.
    fn certifies_tail(&self, sc: &Scanner<'_>) -> bool {
        let n = BigRational::from_integer(sc.n.into());
        let np1 = &n + BigRational::one();
        let h = &sc.h - &n / &np1;
        let zero = BigRational::zero();
        if self.delta.is_positive() {
            let beta_plus = if self.beta.is_positive() { self.beta.clone() } else { zero };
            &self.delta * h > &self.gamma + beta_plus / np1
        } else {
            let beta_minus = if self.beta.is_negative() { -&self.beta } else { zero };
            -&self.delta * h + &self.gamma - beta_minus / np1 > BigRational::zero()
        }
    }
}

fn exact_sup(w: &StructuredSequence, xi: &StructuredSequence, cfg: &ScanConfig) -> Option<RatioSup> {
    let (c, a) = xi.tail().harmonic_params()?;
    let (p, b) = w.tail().harmonic_params()?;
    let l1 = xi.prefix().len().max(w.prefix().len()).max(1);

    let mut sc = Scanner::new(xi, w);
    sc.advance_to(l1);
    let nq = BigRational::from_integer(l1.into());
    let big_a = &sc.s - &c * &nq - &a * &sc.h;
    let big_b = &sc.t - &p * &nq - &b * &sc.h;
    let coeff = TailCoefficients {
        delta: &a * &p - &b * &c,
        gamma: &c * &big_b - &p * &big_a,
        beta: &a * &big_b - &b * &big_a,
    };
    let r_inf = &c / &p;

    if coeff.delta.is_zero() {
        // E_n = (n+1) gamma + beta is affine in n.
        if coeff.gamma.is_zero() {
            let trend = if coeff.beta.is_positive() {
                Trend::Increasing
            } else if coeff.beta.is_negative() {
                Trend::Decreasing
            } else {
                Trend::Constant
            };
            return Some(finish(sc, trend, r_inf));
        }
        let threshold = (-&coeff.beta / &coeff.gamma).floor().to_integer();
        let from = threshold.to_usize().unwrap_or(if threshold.is_negative() { 0 } else { usize::MAX });
        let from = from.max(l1);
        if from > cfg.exact_limit {
            return None;
        }
        sc.advance_to(from);
        let trend = if coeff.gamma.is_positive() { Trend::Increasing } else { Trend::Decreasing };
        return Some(finish(sc, trend, r_inf));
    }

    if coeff.delta.is_negative() && !coeff.beta.is_positive() {
        // h increasing and beta/(n+1) nondecreasing: E_n changes sign at most once, from - to +.
        let best = sc.best.clone().expect("scanned");
        return Some(compare_with_limit(best, r_inf, Certification::Valley { from: l1 }));
    }

    if coeff.delta.is_positive() && !coeff.beta.is_negative() {
        // E_n / (n+1) strictly decreasing: r rises to a single peak, then falls.
        loop {
            if !coeff.e(&sc).is_positive() {
                return Some(finish(sc, Trend::Decreasing, r_inf));
            }
            if sc.n >= cfg.exact_limit {
                return None;
            }
            sc.step();
        }
    }

    loop {
        if coeff.certifies_tail(&sc) {
            let trend = if coeff.delta.is_positive() { Trend::Decreasing } else { Trend::Increasing };
            return Some(finish(sc, trend, r_inf));
        }
        if sc.n >= cfg.exact_limit {
            return None;
        }
        sc.step();
    }
}

/// `r_n` is monotone with `trend` for all `n >= sc.n`, and every smaller index was scanned.
fn finish(sc: Scanner<'_>, trend: Trend, r_inf: BigRational) -> RatioSup {
    let from = sc.n;
    let best = sc.best.clone().expect("scanned");
    let cert = Certification::Monotone { from, trend };
    match trend {
        Trend::Increasing => compare_with_limit(best, r_inf, cert),
        Trend::Decreasing | Trend::Constant => {
            debug_assert!(trend != Trend::Constant || sc.ratio() == r_inf);
            RatioSup {
                value: Scalar::Exact(best.1.clone()),
                location: SupLocation::Index { index: best.0 },
                best_finite: Some((best.0, Scalar::Exact(best.1))),
                limit_ratio: Some(Scalar::Exact(r_inf)),
                certification: cert,
            }
        }
    }
}

fn compare_with_limit(best: (usize, BigRational), r_inf: BigRational, cert: Certification) -> RatioSup {
    let (value, location) = if best.1 >= r_inf {
        (best.1.clone(), SupLocation::Index { index: best.0 })
    } else {
        (r_inf.clone(), SupLocation::Limit)
    };
    RatioSup {
        value: Scalar::Exact(value),
        location,
        best_finite: Some((best.0, Scalar::Exact(best.1))),
        limit_ratio: Some(Scalar::Exact(r_inf)),
        certification: cert,
    }
}

fn heuristic_sup(w: &SNWeight, xi: &StructuredSequence, horizon: u64) -> RatioSup {
    let mut s = 0.0;
    let mut t = 0.0;
    let mut best = (1usize, f64::NEG_INFINITY);
    for (i, pi) in w.terms_f64().take(horizon.max(1) as usize).enumerate() {
        s += xi.term_f64(i as u64 + 1);
        t += pi;
        let r = s / t;
        if r > best.1 {
            best = (i + 1, r);
        }
    }
    let r_inf = xi.limit().value.to_f64() / w.limit().to_f64();
    let (value, location) = if best.1 >= r_inf {
        (best.1, SupLocation::Index { index: best.0 })
    } else {
        (r_inf, SupLocation::Limit)
    };
    RatioSup {
        value: Scalar::Approx(value),
        location,
        best_finite: Some((best.0, Scalar::Approx(best.1))),
        limit_ratio: Some(Scalar::Approx(r_inf)),
        certification: Certification::Heuristic { horizon },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{frac, int, TailModel};

    fn seq(prefix: Vec<BigRational>, c: BigRational, a: BigRational) -> StructuredSequence {
        StructuredSequence::new(prefix, TailModel::Harmonic { c, a }).unwrap()
    }

    /// Brute-force oracle: sign of r_{n+1} - r_n from direct partial sums.
    fn direct_trend(xi: &StructuredSequence, w: &StructuredSequence, n: usize) -> std::cmp::Ordering {
        let r = |k| {
            xi.partial_sum(k).into_exact().unwrap() / w.partial_sum(k).into_exact().unwrap()
        };
        r(n + 1).cmp(&r(n))
    }

    #[test]
    fn e_sign_matches_direct_ratios() {
        let cases = [
            (seq(vec![int(3)], int(1), int(1)), seq(vec![], frac(1, 3), frac(2, 3))),
            (seq(vec![int(5), int(2)], int(1), int(0)), seq(vec![], frac(1, 2), frac(1, 2))),
            (seq(vec![], int(2), int(3)), seq(vec![int(1), frac(9, 10)], frac(1, 4), frac(1, 2))),
            (seq(vec![int(4)], frac(1, 2), int(2)), seq(vec![int(1)], frac(1, 5), frac(3, 5))),
        ];
        for (xi, w) in cases {
            let (c, a) = xi.tail().harmonic_params().unwrap();
            let (p, b) = w.tail().harmonic_params().unwrap();
            let l1 = xi.prefix().len().max(w.prefix().len()).max(1);
            let mut sc = Scanner::new(&xi, &w);
            sc.advance_to(l1);
            let nq = BigRational::from_integer(l1.into());
            let big_a = &sc.s - &c * &nq - &a * &sc.h;
            let big_b = &sc.t - &p * &nq - &b * &sc.h;
            let coeff = TailCoefficients {
                delta: &a * &p - &b * &c,
                gamma: &c * &big_b - &p * &big_a,
                beta: &a * &big_b - &b * &big_a,
            };
            for _ in 0..40 {
                let e = coeff.e(&sc);
                assert_eq!(e.cmp(&BigRational::zero()), direct_trend(&xi, &w, sc.n), "n = {}", sc.n);
                sc.step();
            }
        }
    }

    #[test]
    fn heuristic_on_opaque_input() {
        let w = SNWeight::new(seq(vec![], frac(1, 2), frac(1, 2)).to_float_model()).unwrap();
        let xi = seq(vec![], int(1), int(1));
        let sup = ratio_sup(&w, &xi, &ScanConfig { horizon: 1000, exact_limit: 10 }).unwrap();
        assert!(!sup.is_certified());
        assert!((sup.value.to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn limit_zero_weight_rejected() {
        let w = SNWeight::new(seq(vec![], int(0), int(1))).unwrap();
        let xi = StructuredSequence::constant(int(1)).unwrap();
        assert!(matches!(
            ratio_sup(&w, &xi, &ScanConfig::default()),
            Err(Error::DualNormMayBeInfinite)
        ));
        // finite support is fine
        let xi = StructuredSequence::finite(vec![int(1)]).unwrap();
        assert!(ratio_sup(&w, &xi, &ScanConfig::default()).is_ok());
    }
}
