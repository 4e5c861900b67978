//! Inline sequence mini-language.
//!
//! | spec                  | sequence                         |
//! |-----------------------|----------------------------------|
//! | `harmonic:c,a`        | `c + a/j`                        |
//! | `const:c`             | `c, c, c, ...`                   |
//! | `zero-prefix:v1,...`  | `v1, ..., vk, 0, 0, ...`         |
//! | `rank1:s`             | `s, 0, 0, ...`                   |
//! | `zero`                | `0, 0, ...`                      |
//! | `opaque:sqrt:c,a`     | `c + a/sqrt(j)` (float only)     |
//! | `@path.json`          | `{"prefix": [...], "tail": {...}}` |

use num_rational::BigRational;
use symnorm::seqcore::{parse_rational, ratio_to_f64, OpaqueTail, StructuredSequence, TailModel};

use crate::CliError;

fn rationals(args: &str) -> Result<Vec<BigRational>, CliError> {
    if args.trim().is_empty() {
        return Ok(vec![]);
    }
    args.split(',')
        .map(|a| parse_rational(a.trim()).map_err(|e| CliError::malformed(e.to_string())))
        .collect()
}

fn exactly<const N: usize>(kind: &str, args: &str) -> Result<[BigRational; N], CliError> {
    let v = rationals(args)?;
    let got = v.len();
    v.try_into()
        .map_err(|_| CliError::malformed(format!("`{kind}` takes {N} argument(s), got {got}")))
}

pub fn parse_sequence(spec: &str) -> Result<StructuredSequence, CliError> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::malformed(format!("cannot read {path}: {e}")))?;
        return serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("{path}: {e}")));
    }
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let seq = match kind {
        "harmonic" => {
            let [c, a] = exactly::<2>(kind, args)?;
            StructuredSequence::harmonic(c, a)
        }
        "const" => {
            let [c] = exactly::<1>(kind, args)?;
            StructuredSequence::constant(c)
        }
        "zero-prefix" => {
            let v = rationals(args)?;
            Ok(StructuredSequence::canonicalize_finite(&v))
        }
        "rank1" => {
            let [s] = exactly::<1>(kind, args)?;
            StructuredSequence::finite(vec![s])
        }
        "zero" => StructuredSequence::finite(vec![]),
        "opaque" => return parse_opaque(args),
        other => return Err(CliError::malformed(format!("unknown sequence kind `{other}`"))),
    };
    seq.map_err(CliError::from)
}

fn parse_opaque(args: &str) -> Result<StructuredSequence, CliError> {
    let (family, rest) = args.split_once(':').unwrap_or((args, ""));
    if family != "sqrt" {
        return Err(CliError::malformed(format!("unknown opaque family `{family}`")));
    }
    let [c, a] = exactly::<2>("opaque:sqrt", rest)?;
    let (cf, af) = (ratio_to_f64(&c), ratio_to_f64(&a));
    if cf < 0.0 || cf + af < 0.0 {
        return Err(CliError::malformed("opaque:sqrt terms must be nonnegative".into()));
    }
    let tail = OpaqueTail::new(format!("{c} + ({a})/sqrt(j)"), cf, af >= 0.0, move |j| cf + af / (j as f64).sqrt());
    StructuredSequence::new(vec![], TailModel::Opaque(tail)).map_err(CliError::from)
}
