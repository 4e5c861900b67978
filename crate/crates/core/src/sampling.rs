//! Seeded generators for weights, singular sequences and matrices.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attain::DiagonalTraceElement;
use crate::oracle::{DenseOperator, TruncatedLP};
use crate::seqcore::{frac, SingularSequence, StructuredSequence, TailModel};
use crate::snfunc::SNWeight;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `trial` of suite `suite`.
pub fn trial_rng(seed: u64, suite: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream((suite << 40) ^ trial);
    r
}

/// `p/q` with `1 <= p <= max_num`, `1 <= q <= max_den`.
pub fn positive_rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> BigRational {
    frac(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

/// Rational strictly between `lo` and `hi`.
fn between<R: Rng + ?Sized>(rng: &mut R, lo: &BigRational, hi: &BigRational) -> BigRational {
    let t = frac(rng.gen_range(1..=99), 100);
    lo + (hi - lo) * t
}

/// `n` values strictly decreasing inside `(lo, hi)`.
fn strictly_decreasing<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: &BigRational, hi: &BigRational) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = Vec::with_capacity(n);
    let mut upper = hi.clone();
    for _ in 0..n {
        let x = between(rng, lo, &upper);
        upper = x.clone();
        v.push(x);
    }
    v
}

/// Weight in the strict class: harmonic tail `c + a/j` with `c, a > 0`,
/// optionally preceded by a strictly decreasing prefix, first term 1.
pub fn random_pi_hat<R: Rng + ?Sized>(rng: &mut R) -> SNWeight {
    let prefix_len = rng.gen_range(0..=3usize);
    let c = frac(rng.gen_range(1..=9), 10) * frac(rng.gen_range(1..=9), 10);
    let seq = if prefix_len == 0 {
        let a = BigRational::one() - &c;
        StructuredSequence::new(vec![], TailModel::Harmonic { c, a })
    } else {
        // tail start c + a/(L+1) must stay below the last prefix entry
        let room = (BigRational::one() - &c) * BigRational::from_integer((prefix_len as i64 + 1).into());
        let a = &room * frac(rng.gen_range(1..=9), 10);
        let junction = &c + &a / BigRational::from_integer((prefix_len as i64 + 1).into());
        let mut prefix = vec![BigRational::one()];
        prefix.extend(strictly_decreasing(rng, prefix_len - 1, &junction, &BigRational::one()));
        StructuredSequence::new(prefix, TailModel::Harmonic { c, a })
    };
    SNWeight::pi_hat(seq.expect("valid by construction")).expect("strict by construction")
}

/// `s` with positive limit: constant or harmonic tail, nonincreasing prefix.
pub fn random_noncompact<R: Rng + ?Sized>(rng: &mut R) -> SingularSequence {
    let c = positive_rational(rng, 9, 4);
    let tail = if rng.gen_bool(0.5) {
        TailModel::Constant(c)
    } else {
        TailModel::Harmonic { c, a: positive_rational(rng, 5, 3) }
    };
    let prefix_len = rng.gen_range(0..=3usize);
    let start = StructuredSequence::new(vec![], tail.clone())
        .expect("valid")
        .term_exact(prefix_len + 1)
        .expect("exact");
    let mut prefix: Vec<BigRational> = (0..prefix_len).map(|_| &start + positive_rational(rng, 4, 3)).collect();
    prefix.sort_by(|a, b| b.cmp(a));
    SingularSequence::new(StructuredSequence::new(prefix, tail).expect("valid")).expect("sorted")
}

/// Finitely supported sorted `s` with 1 to 8 positive entries.
pub fn random_compact<R: Rng + ?Sized>(rng: &mut R) -> SingularSequence {
    let len = rng.gen_range(1..=8usize);
    let mut v: Vec<BigRational> = (0..len).map(|_| positive_rational(rng, 12, 5)).collect();
    v.sort_by(|a, b| b.cmp(a));
    SingularSequence::finite(v).expect("sorted")
}

/// Truncated LP with positive nonincreasing rational data, `1 <= d <= max_d`.
pub fn random_truncation<R: Rng + ?Sized>(rng: &mut R, max_d: usize) -> TruncatedLP {
    let d = rng.gen_range(1..=max_d);
    let gen = |rng: &mut R| {
        let mut v: Vec<BigRational> = (0..d).map(|_| positive_rational(rng, 20, 7)).collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    };
    let s = gen(rng);
    let p = gen(rng);
    TruncatedLP::new(s, p).expect("valid by construction")
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, max_n: usize) -> DenseOperator {
    let n = rng.gen_range(1..=max_n);
    crate::oracle::random_matrix(rng, n)
}

/// Inputs satisfying every precondition of the improvement step.
#[derive(Clone, Debug)]
pub struct AdmissibleStep {
    pub w: SNWeight,
    pub s: SingularSequence,
    pub k: DiagonalTraceElement,
    pub m: usize,
}

pub fn random_admissible_step<R: Rng + ?Sized>(rng: &mut R) -> AdmissibleStep {
    loop {
        let w = random_pi_hat(rng);
        let s = if rng.gen_bool(0.5) { random_noncompact(rng) } else { random_compact(rng) };
        let m = rng.gen_range(1..=6usize);
        let support = rng.gen_range(m..=m + 3);
        let mut entries: Vec<BigRational> = (0..support).map(|_| positive_rational(rng, 10, 6)).collect();
        entries.sort_by(|a, b| b.cmp(a));
        let km = entries[m - 1].clone();
        let km1 = entries.get(m).cloned().unwrap_or_else(BigRational::zero);
        let ex = |x: crate::seqcore::Scalar| x.into_exact().expect("exact");
        let (pm, pm1) = (ex(w.term(m)), ex(w.term(m + 1)));
        let (sm, sm1) = (ex(s.term(m)), ex(s.term(m + 1)));
        if km > km1 && sm1.is_positive() && pm * &sm1 > pm1 * sm {
            let k = DiagonalTraceElement::with_weight(entries, &w).expect("sorted");
            return AdmissibleStep { w, s, k, m };
        }
    }
}
