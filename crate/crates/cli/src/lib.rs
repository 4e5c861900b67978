//! Library half of the `symnorm` command: argument model, commands and output records.

pub mod spec;

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use symnorm::adversary::{build_adversary_with, AdversaryJson};
use symnorm::attain::{check_attainment_with, AttainmentReport, Certificate, TailProof, Verdict};
use symnorm::oracle::{run_suite, SuiteBudget, SuiteSummary};
use symnorm::seqcore::{parse_rational, AlphaSchedule, Scalar, SingularSequence};
use symnorm::snfunc::{ratio_sup, Certification, SNWeight, ScanConfig, SupLocation};

pub use spec::parse_sequence;

/// Process exit status, a total function of the outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exit {
    Ok = 0,
    NotAttained = 1,
    Malformed = 2,
    NonEquivalent = 3,
    Heuristic = 4,
    CompactSource = 5,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn for_verdict(v: Verdict) -> Exit {
        match v {
            Verdict::Attained => Exit::Ok,
            Verdict::NotAttained => Exit::NotAttained,
            Verdict::HeuristicAttained | Verdict::HeuristicNotAttained => Exit::Heuristic,
        }
    }
}

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: Exit,
    pub message: String,
}

impl CliError {
    pub fn malformed(message: String) -> Self {
        CliError { code: Exit::Malformed, message }
    }
}

impl From<symnorm::Error> for CliError {
    fn from(e: symnorm::Error) -> Self {
        use symnorm::Error as E;
        let code = match &e {
            E::DualNormMayBeInfinite => Exit::NonEquivalent,
            E::CompactSource => Exit::CompactSource,
            E::CompactLimit | E::RatioConditionFails { .. } | E::Infeasible | E::Unbounded => Exit::NotAttained,
            _ => Exit::Malformed,
        };
        let message = match e {
            E::CompactSource => "compact source: lim s_j = 0, no adversary exists".to_string(),
            other => other.to_string(),
        };
        CliError { code, message }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "symnorm", version, about = "Symmetric operator norms and their attainment")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Float scan length when no exact certificate exists.
    #[arg(long, global = true, env = "SYMNORM_HORIZON", default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: u64,
    /// Arithmetic mode; inferred from the inputs when omitted.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Singular values of T (inline spec or @file.json).
    #[arg(long = "s")]
    pub s: String,
    /// Weight sequence pi (inline spec or @file.json).
    #[arg(long = "pi", default_value = "const:1")]
    pub pi: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute ||T|| in the dual norm.
    Norm(Inputs),
    /// Decide whether the norm is attained.
    Check(Inputs),
    /// Build a weight for which the norm of T is not attained.
    Adversary {
        #[arg(long = "s")]
        s: String,
        /// `inverse-square` or `geometric:first,ratio`.
        #[arg(long, default_value = "inverse-square")]
        schedule: String,
        /// Number of factored terms to print.
        #[arg(long, default_value_t = 5)]
        terms: usize,
    },
    /// Run the randomized cross-checks.
    Oracle {
        /// Trials per suite, overriding the defaults (lp 100, modulus 50, diagonal 200).
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub value: Scalar,
    pub exact: bool,
    pub location: SupLocation,
    pub certification: Certification,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub mode: Mode,
    pub report: AttainmentReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub exit: Exit,
    pub message: String,
}

/// One line of structured output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Norm(NormRecord),
    Check(CheckRecord),
    Adversary(AdversaryJson),
    Oracle(SuiteSummary),
    Error(ErrorRecord),
}

pub struct Outcome {
    pub exit: Exit,
    pub record: Record,
}

struct Resolved {
    w: SNWeight,
    s: SingularSequence,
    mode: Mode,
}

fn resolve(inputs: &Inputs, mode: Option<Mode>) -> Result<Resolved, CliError> {
    let s_seq = parse_sequence(&inputs.s)?;
    let w_seq = parse_sequence(&inputs.pi)?;
    let exact_inputs = s_seq.is_exact() && w_seq.is_exact();
    let mode = match mode {
        Some(Mode::Exact) if !exact_inputs => {
            return Err(CliError::malformed("--mode exact is not available for opaque inputs".into()))
        }
        Some(m) => m,
        None if exact_inputs => Mode::Exact,
        None => Mode::Float,
    };
    let s = SingularSequence::new(s_seq)?;
    let w = SNWeight::new(w_seq)?;
    Ok(match mode {
        Mode::Exact => Resolved { w, s, mode },
        Mode::Float => Resolved {
            w: w.to_float_model(),
            s: SingularSequence::new(s.to_float_model())?,
            mode,
        },
    })
}

fn scan_config(g: &GlobalArgs) -> ScanConfig {
    ScanConfig { horizon: g.horizon, ..ScanConfig::default() }
}

pub fn cmd_norm(g: &GlobalArgs, inputs: &Inputs) -> Result<Outcome, CliError> {
    let r = resolve(inputs, g.mode)?;
    let sup = ratio_sup(&r.w, r.s.seq(), &scan_config(g))?;
    let exact = sup.is_exact();
    let record = NormRecord {
        value: sup.value,
        exact,
        location: sup.location,
        certification: sup.certification,
        mode: r.mode,
    };
    Ok(Outcome { exit: Exit::Ok, record: Record::Norm(record) })
}

pub fn cmd_check(g: &GlobalArgs, inputs: &Inputs) -> Result<Outcome, CliError> {
    let r = resolve(inputs, g.mode)?;
    let report = check_attainment_with(&r.w, &r.s, &scan_config(g))?;
    Ok(Outcome { exit: Exit::for_verdict(report.verdict), record: Record::Check(CheckRecord { mode: r.mode, report }) })
}

fn parse_schedule(spec: &str) -> Result<AlphaSchedule, CliError> {
    match spec.split_once(':') {
        None if spec == "inverse-square" => Ok(AlphaSchedule::InverseSquare),
        Some(("geometric", args)) => {
            let v: Vec<&str> = args.split(',').collect();
            let [first, ratio] = v.as_slice() else {
                return Err(CliError::malformed("geometric schedule takes first,ratio".into()));
            };
            Ok(AlphaSchedule::geometric(parse_rational(first.trim())?, parse_rational(ratio.trim())?)?)
        }
        _ => Err(CliError::malformed(format!("unknown schedule `{spec}`"))),
    }
}

pub fn cmd_adversary(g: &GlobalArgs, s: &str, schedule: &str, terms: usize) -> Result<Outcome, CliError> {
    let seq = parse_sequence(s)?;
    if g.mode == Some(Mode::Float) || !seq.is_exact() {
        return Err(CliError::malformed("adversary construction needs an exact sequence".into()));
    }
    let s = SingularSequence::new(seq)?;
    let adv = build_adversary_with(&s, parse_schedule(schedule)?)?;
    Ok(Outcome { exit: Exit::Ok, record: Record::Adversary(adv.to_json_record(terms)?) })
}

pub fn cmd_oracle(g: &GlobalArgs, budget: Option<usize>) -> Result<Outcome, CliError> {
    let budget = budget.map_or_else(SuiteBudget::default, SuiteBudget::uniform);
    let summary = run_suite(g.seed, budget)?;
    let exit = if summary.all_passed() { Exit::Ok } else { Exit::NotAttained };
    Ok(Outcome { exit, record: Record::Oracle(summary) })
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let result = match &cli.command {
        Command::Norm(i) => cmd_norm(g, i),
        Command::Check(i) => cmd_check(g, i),
        Command::Adversary { s, schedule, terms } => cmd_adversary(g, s, schedule, *terms),
        Command::Oracle { budget } => cmd_oracle(g, *budget),
    };
    result.unwrap_or_else(|e| Outcome {
        exit: e.code,
        record: Record::Error(ErrorRecord { exit: e.code, message: e.message }),
    })
}

fn value_with_flag(value: &Scalar, exact: bool) -> String {
    format!("{value} ({})", if exact { "exact" } else { "approx" })
}

fn describe_certificate(c: &Certificate) -> String {
    match c {
        Certificate::RatioCondition { checked_indices, tail } => {
            let head = if checked_indices.is_empty() {
                "ratio condition pi_n/pi_(n+1) > s_n/s_(n+1)".to_string()
            } else {
                format!("ratio condition pi_n/pi_(n+1) > s_n/s_(n+1), checked exactly at n = {checked_indices:?}")
            };
            let tail = match tail {
                TailProof::Symbolic { from, weight_gap, sequence_gap, .. } => {
                    format!("for n >= {from}: pi_n/pi_(n+1) - 1 = {weight_gap} > {sequence_gap} = s_n/s_(n+1) - 1")
                }
                TailProof::Adversary { schedule } => {
                    format!("pi_n/pi_(n+1) = exp(l_n) s_n/s_(n+1) for all n, {}", schedule.describe())
                }
                TailProof::Horizon { checked_through } => format!("checked numerically through n = {checked_through}"),
            };
            format!("{head}; {tail}")
        }
        Certificate::LimitDominance { best_index, best_ratio, limit_ratio, certification } => format!(
            "every vertex ratio is below the limit {limit_ratio} (best r_{best_index} = {best_ratio}; {certification:?})"
        ),
    }
}

/// Human-readable rendering of a record.
pub fn render_human(record: &Record) -> String {
    let mut out = String::new();
    match record {
        Record::Norm(n) => {
            let mut line = value_with_flag(&n.value, n.exact);
            match &n.location {
                SupLocation::Index { index } => write!(line, ", attained index {index}").unwrap(),
                SupLocation::Limit => line.push_str(", supremum at limit"),
            }
            out.push_str(&line);
        }
        Record::Check(c) => {
            let r = &c.report;
            let verdict = match r.verdict {
                Verdict::Attained => "attained",
                Verdict::NotAttained => "not attained",
                Verdict::HeuristicAttained => "attained (heuristic)",
                Verdict::HeuristicNotAttained => "not attained (heuristic)",
            };
            writeln!(out, "{verdict}").unwrap();
            write!(out, "norm: {}", value_with_flag(&r.norm_value.value, r.norm_value.exact)).unwrap();
            if let Some(k) = &r.witness {
                let entries: Vec<String> = k.entries().prefix().iter().map(|q| q.to_string()).collect();
                write!(out, "\nwitness: K = diag({}, 0, ...)", entries.join(", ")).unwrap();
                if let Some(phi) = k.phi_norm() {
                    write!(out, ", ||K|| = {}", phi.value).unwrap();
                }
            }
            if let Some(c) = &r.certificate {
                write!(out, "\ncertificate: {}", describe_certificate(c)).unwrap();
            }
        }
        Record::Adversary(a) => {
            writeln!(out, "pi_n = (s_n/s_1) * exp(-lambda_(n-1)), {}", a.schedule.describe()).unwrap();
            for t in &a.terms {
                writeln!(out, "pi_{} = {} * exp({})", t.n, t.rational, t.exp_coeff).unwrap();
            }
            writeln!(out, "lambda_n -> {}", a.tail_exp_total).unwrap();
            write!(out, "limit = {:.15} (>= {})", a.limit, a.limit_lower_bound).unwrap();
            match &a.ratio_certificate {
                Some(TailProof::Adversary { .. }) => {
                    out.push_str("\nratio condition: pi_n/pi_(n+1) = exp(l_n) s_n/s_(n+1) > s_n/s_(n+1) for all n")
                }
                Some(other) => write!(out, "\nratio condition: {other:?}").unwrap(),
                None => {}
            }
        }
        Record::Oracle(s) => out.push_str(&s.to_string()),
        Record::Error(e) => out.push_str(&format!("error: {}", e.message)),
    }
    out
}

pub fn render(record: &Record, format: Format) -> String {
    match format {
        Format::Human => render_human(record),
        Format::Json => serde_json::to_string(record).expect("records serialize"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let cli = Cli::try_parse_from(std::iter::once("symnorm").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn exit_codes_follow_verdicts() {
        assert_eq!(Exit::for_verdict(Verdict::Attained).code(), 0);
        assert_eq!(Exit::for_verdict(Verdict::NotAttained).code(), 1);
        assert_eq!(Exit::for_verdict(Verdict::HeuristicAttained).code(), 4);
        assert_eq!(Exit::for_verdict(Verdict::HeuristicNotAttained).code(), 4);
    }

    #[test]
    fn norm_lines() {
        let o = run_args(&["norm", "--s", "harmonic:1,1", "--pi", "harmonic:1/2,1/2"]);
        assert_eq!(render_human(&o.record), "2 (exact), attained index 1");
        let o = run_args(&["norm", "--s", "const:1", "--pi", "harmonic:1/3,2/3"]);
        assert_eq!(render_human(&o.record), "3 (exact), supremum at limit");
    }

    #[test]
    fn records_round_trip() {
        for args in [
            &["check", "--s", "harmonic:1,1", "--pi", "harmonic:1/3,2/3"][..],
            &["check", "--s", "harmonic:1,1", "--pi", "harmonic:1/2,1/2"],
            &["norm", "--s", "opaque:sqrt:1,1", "--pi", "harmonic:1/2,1/2", "--horizon", "1000"],
            &["adversary", "--s", "const:1"],
            &["oracle", "--budget", "2"],
            &["adversary", "--s", "zero-prefix:3,2,1"],
        ] {
            let o = run_args(args);
            let line = render(&o.record, Format::Json);
            let back: Record = serde_json::from_str(&line).unwrap();
            assert_eq!(back, o.record, "{line}");
        }
    }

    #[test]
    fn mode_resolution() {
        let o = run_args(&["check", "--mode", "exact", "--s", "opaque:sqrt:1,1", "--pi", "harmonic:1/2,1/2"]);
        assert_eq!(o.exit, Exit::Malformed);
        let o = run_args(&["check", "--mode", "float", "--s", "harmonic:1,1", "--pi", "harmonic:1/2,1/2", "--horizon", "500"]);
        assert_eq!(o.exit, Exit::Heuristic);
    }
}
