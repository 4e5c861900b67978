use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::scalar::ratio_string;
use super::{StructuredSequence, TailModel};
use crate::{Error, Result};

/// Wire form: `{"prefix":["p/q",...],"tail":{"kind":"harmonic","c":"p/q","a":"p/q"}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceJson {
    #[serde(with = "ratio_string::vec")]
    pub prefix: Vec<BigRational>,
    pub tail: TailJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailJson {
    Zero,
    Constant {
        #[serde(with = "ratio_string")]
        c: BigRational,
    },
    Harmonic {
        #[serde(with = "ratio_string")]
        c: BigRational,
        #[serde(with = "ratio_string")]
        a: BigRational,
    },
}

impl TryFrom<&StructuredSequence> for SequenceJson {
    type Error = Error;

    fn try_from(seq: &StructuredSequence) -> Result<Self> {
        let tail = match seq.tail() {
            TailModel::Zero => TailJson::Zero,
            TailModel::Constant(c) => TailJson::Constant { c: c.clone() },
            TailModel::Harmonic { c, a } => TailJson::Harmonic { c: c.clone(), a: a.clone() },
            TailModel::Opaque(_) => return Err(Error::NotExact("opaque tails have no wire form")),
        };
        Ok(SequenceJson { prefix: seq.prefix().to_vec(), tail })
    }
}

impl TryFrom<SequenceJson> for StructuredSequence {
    type Error = Error;

    fn try_from(j: SequenceJson) -> Result<Self> {
        let tail = match j.tail {
            TailJson::Zero => TailModel::Zero,
            TailJson::Constant { c } => TailModel::Constant(c),
            TailJson::Harmonic { c, a } => TailModel::Harmonic { c, a },
        };
        StructuredSequence::new(j.prefix, tail)
    }
}

impl Serialize for StructuredSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SequenceJson::try_from(self)
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructuredSequence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = SequenceJson::deserialize(d)?;
        StructuredSequence::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl StructuredSequence {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SequenceJson::try_from(self)?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SequenceJson = serde_json::from_str(s)?;
        Self::try_from(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{frac, int};

    #[test]
    fn wire_format() {
        let s = StructuredSequence::new(vec![int(3)], TailModel::Harmonic { c: frac(1, 2), a: int(1) }).unwrap();
        let text = s.to_json().unwrap();
        assert_eq!(text, r#"{"prefix":["3"],"tail":{"kind":"harmonic","c":"1/2","a":"1"}}"#);
        assert_eq!(StructuredSequence::from_json(&text).unwrap(), s);
        let z = StructuredSequence::from_json(r#"{"prefix":["2/4","1/4"],"tail":{"kind":"zero"}}"#).unwrap();
        assert_eq!(z.prefix(), &[frac(1, 2), frac(1, 4)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(StructuredSequence::from_json(r#"{"prefix":["-1"],"tail":{"kind":"zero"}}"#).is_err());
        assert!(StructuredSequence::from_json(r#"{"prefix":[],"tail":{"kind":"spiral"}}"#).is_err());
    }
}
