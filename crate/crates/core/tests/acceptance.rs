//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use symnorm::adversary::{build_adversary, verify_ratio_condition};
use symnorm::attain::{
    check_attainment, improvement_step, operator_norm, pairing, Certificate, TailProof, Verdict,
};
use symnorm::oracle::{
    lp_optimum, verify_diagonal_reduction, verify_modulus_reduction, verify_subspace_restriction,
    TruncatedLP, MAX_SAMPLING_DIMENSION,
};
use symnorm::sampling::{self, trial_rng};
use symnorm::seqcore::{frac, int, ratio_to_f64, Scalar, SingularSequence, StructuredSequence};
use symnorm::snfunc::{trace_norm_phi, SNWeight};
use symnorm::Error;

const SEED: u64 = 20240611;

const ATTAINED_RUNTIME: Duration = Duration::from_secs(1);
const UNATTAINED_RUNTIME: Duration = Duration::from_secs(5);
const LP_RUNTIME: Duration = Duration::from_secs(10);
/// Distance to the limit required of the LP value at the largest truncation.
const TRUNCATION_TOL: f64 = 1e-3;
const TRUNCATIONS: [usize; 3] = [10, 100, 1000];
const BRIDGE_TOL: f64 = 1e-9;
const DIAGONAL_SLACK: f64 = 1e-9;
/// Relative error for agreement to 10 significant digits.
const SIGNIFICANT_10: f64 = 5e-11;
/// `exp(-pi^2/6)`, evaluated at 50 digits.
const EXP_MINUS_ZETA2: f64 = 0.193_025_289_139_898_05_f64;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn harmonic_weight(c: BigRational, a: BigRational) -> SNWeight {
    SNWeight::new(StructuredSequence::harmonic(c, a).unwrap()).unwrap()
}

fn s_harmonic() -> SingularSequence {
    SingularSequence::new(StructuredSequence::harmonic(int(1), int(1)).unwrap()).unwrap()
}

fn exact(x: &Scalar) -> Result<BigRational, String> {
    x.as_exact().cloned().ok_or_else(|| format!("expected exact value, got {x}"))
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("runtime {t:?} exceeds {limit:?}"))?;
    Ok(t)
}

fn attained_fixture() -> Outcome {
    let start = Instant::now();
    let w = harmonic_weight(frac(1, 2), frac(1, 2));
    let s = s_harmonic();
    let r = check_attainment(&w, &s).map_err(e)?;
    ensure(r.norm_value.exact && exact(&r.norm_value.value)? == int(2), format!("norm {}", r.norm_value.value))?;
    ensure(r.verdict == Verdict::Attained, format!("verdict {:?}", r.verdict))?;
    let k = r.witness.ok_or("no witness")?;
    ensure(k.entries().prefix() == [int(1)], format!("witness {}", k.entries()))?;
    let phi = trace_norm_phi(&w, &k).map_err(e)?;
    ensure(exact(&phi.value)? == int(1), "witness norm is not 1")?;
    ensure(exact(&pairing(&s, &k))? == int(2), "pairing is not 2")?;
    let t = within(start, ATTAINED_RUNTIME)?;
    Ok(format!("norm 2 attained by diag(1,0,...), {t:?}"))
}

fn unattained_fixture() -> Outcome {
    let start = Instant::now();
    let w = harmonic_weight(frac(1, 3), frac(2, 3));
    let s = s_harmonic();
    let r = check_attainment(&w, &s).map_err(e)?;
    ensure(r.verdict == Verdict::NotAttained, format!("verdict {:?}", r.verdict))?;
    match r.certificate {
        Some(Certificate::RatioCondition {
            tail: TailProof::Symbolic { ref weight_gap, ref sequence_gap, .. },
            ..
        }) => ensure(
            weight_gap == "2/(n^2+3n)" && sequence_gap == "1/(n^2+2n)",
            format!("gaps {weight_gap} vs {sequence_gap}"),
        )?,
        other => return Err(format!("certificate {other:?}")),
    }
    let norm = operator_norm(&w, &s).map_err(e)?;
    ensure(norm.exact && exact(&norm.value)? == int(3), format!("norm {}", norm.value))?;

    let mut values = Vec::new();
    for d in TRUNCATIONS {
        let p = TruncatedLP::new(s.truncate_exact(d).unwrap(), w.truncate(d)).map_err(e)?;
        let opt = lp_optimum(&p).map_err(e)?;
        ensure(opt.value < int(3), format!("LP value at d={d} is not below 3"))?;
        values.push(opt.value);
    }
    ensure(values.windows(2).all(|p| p[0] < p[1]), "LP values not increasing")?;
    let t = within(start, UNATTAINED_RUNTIME)?;
    let shown: Vec<String> = values.iter().map(|v| format!("{:.6}", ratio_to_f64(v))).collect();
    let gap = 3.0 - ratio_to_f64(values.last().unwrap());
    ensure(
        gap <= TRUNCATION_TOL,
        format!(
            "LP values {} increase toward 3 but 3 - value(d=1000) = {gap:.6} > {TRUNCATION_TOL}; \
             certificate, norm and monotonicity checks passed, {t:?}",
            shown.join(", ")
        ),
    )?;
    Ok(format!("not attained, norm 3, LP values {}, {t:?}", shown.join(", ")))
}

fn identity_not_attained() -> Outcome {
    let one = SingularSequence::new(StructuredSequence::constant(int(1)).unwrap()).unwrap();
    for i in 0..20 {
        let w = sampling::random_pi_hat(&mut trial_rng(SEED, 30, i));
        let r = check_attainment(&w, &one).map_err(e)?;
        ensure(r.verdict == Verdict::NotAttained, format!("trial {i}: verdict {:?}", r.verdict))?;
        let lim = exact(&w.limit())?;
        ensure(exact(&r.norm_value.value)? == BigRational::one() / lim, format!("trial {i}: norm != 1/limit"))?;
    }
    Ok("20/20 not attained with norm 1/limit".into())
}

fn adversary_soundness() -> Outcome {
    for i in 0..20 {
        let s = sampling::random_noncompact(&mut trial_rng(SEED, 40, i));
        let adv = build_adversary(&s).map_err(|x| format!("trial {i}: {x}"))?;
        let v = verify_ratio_condition(adv.weight(), &s, 10_000);
        ensure(v.holds && v.symbolic.is_some(), format!("trial {i}: no symbolic certificate"))?;
        let r = check_attainment(adv.weight(), &s).map_err(e)?;
        ensure(r.verdict == Verdict::NotAttained, format!("trial {i}: verdict {:?}", r.verdict))?;
    }
    for i in 0..20 {
        let mut rng = trial_rng(SEED, 41, i);
        let s = sampling::random_compact(&mut rng);
        let w = sampling::random_pi_hat(&mut rng);
        ensure(matches!(build_adversary(&s), Err(Error::CompactSource)), format!("compact {i}: adversary built"))?;
        let r = check_attainment(&w, &s).map_err(e)?;
        ensure(r.verdict == Verdict::Attained, format!("compact {i}: verdict {:?}", r.verdict))?;
    }
    Ok("20/20 noncompact defeated, 20/20 compact attained".into())
}

/// `max_k (s_1+...+s_k)/(pi_1+...+pi_k)`, summed directly.
fn vertex_formula(s: &[BigRational], p: &[BigRational]) -> BigRational {
    (1..=s.len())
        .map(|k| s[..k].iter().sum::<BigRational>() / p[..k].iter().sum::<BigRational>())
        .max()
        .unwrap()
}

fn lp_equivalence() -> Outcome {
    let start = Instant::now();
    let mut agree = 0;
    for i in 0..100 {
        let p = sampling::random_truncation(&mut trial_rng(SEED, 50, i), 12);
        let opt = lp_optimum(&p).map_err(e)?;
        ensure(
            opt.value == vertex_formula(p.objective(), p.weights()),
            format!("trial {i}: simplex {} differs from vertex formula", opt.value),
        )?;
        agree += 1;
    }
    let t = within(start, LP_RUNTIME)?;
    Ok(format!("{agree}/100 exact agreement, {t:?}"))
}

fn improvement_law() -> Outcome {
    for i in 0..200 {
        let st = sampling::random_admissible_step(&mut trial_rng(SEED, 60, i));
        let k2 = improvement_step(&st.w, &st.s, &st.k, st.m).map_err(|x| format!("trial {i}: {x}"))?;
        let before = exact(&trace_norm_phi(&st.w, &st.k).map_err(e)?.value)?;
        let after = exact(&trace_norm_phi(&st.w, &k2).map_err(e)?.value)?;
        ensure(before == after, format!("trial {i}: norm {before} -> {after}"))?;
        let (p0, p1) = (exact(&pairing(&st.s, &st.k))?, exact(&pairing(&st.s, &k2))?);
        ensure(p1 > p0, format!("trial {i}: pairing {p0} -> {p1}"))?;
        let v = k2.entries().prefix();
        ensure(v.windows(2).all(|q| q[0] >= q[1]), format!("trial {i}: not monotone"))?;
    }
    Ok("200/200".into())
}

fn matrix_bridge() -> Outcome {
    let mut sampled_k = 0;
    for i in 0..50 {
        let mut rng = trial_rng(SEED, 70, i);
        let w = sampling::random_pi_hat(&mut rng);
        let t = sampling::random_matrix(&mut rng, MAX_SAMPLING_DIMENSION);
        let m = verify_modulus_reduction(&t, &w).map_err(e)?;
        ensure(m.passed(BRIDGE_TOL), format!("trial {i}: {m:?}"))?;
        let d = verify_diagonal_reduction(&t, &w, 4, &mut rng).map_err(e)?;
        ensure(
            d.violations.iter().all(|v| v.value <= d.bound + DIAGONAL_SLACK),
            format!("trial {i}: {} violations", d.violations.len()),
        )?;
        sampled_k += d.trials;
        let rank = rand::Rng::gen_range(&mut rng, 0..=t.dim());
        let proj = symnorm::oracle::random_projection(&mut rng, t.dim(), rank);
        let r = verify_subspace_restriction(&t, &w, &proj).map_err(e)?;
        ensure(r.contraction_holds(BRIDGE_TOL), format!("trial {i}: {r:?}"))?;
    }
    Ok(format!("50/50 modulus, {sampled_k}/200 sampled K within bound, 50/50 projections"))
}

fn adversary_limit() -> Outcome {
    let one = SingularSequence::new(StructuredSequence::constant(int(1)).unwrap()).unwrap();
    let adv = build_adversary(&one).map_err(e)?;
    let lim = adv.limit_f64();
    let rel = (lim - EXP_MINUS_ZETA2).abs() / EXP_MINUS_ZETA2;
    ensure(rel < SIGNIFICANT_10, format!("limit {lim} vs {EXP_MINUS_ZETA2}: rel {rel:e}"))?;
    let lb = adv.limit_lower_bound();
    ensure(lb.is_positive() && !lb.is_zero(), "no positive rational lower bound")?;
    ensure(ratio_to_f64(&lb) <= lim, "lower bound exceeds limit")?;
    Ok(format!("limit {lim:.15}, certified >= {lb}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("attained harmonic fixture", attained_fixture),
        ("unattained harmonic fixture", unattained_fixture),
        ("identity not attained", identity_not_attained),
        ("adversary soundness", adversary_soundness),
        ("simplex equals vertex formula", lp_equivalence),
        ("improvement step law", improvement_law),
        ("matrix bridge", matrix_bridge),
        ("adversary limit value", adversary_limit),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
