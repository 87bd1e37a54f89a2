//! JSON form `{arity, entries: [{tuple: [symbols], num, den}]}`.
//!
//! `num` and `den` are decimal strings so that large integers survive
//! consumers that parse JSON numbers as doubles.

use num_bigint::BigInt;
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use super::{Atom, DiscreteMeasure};
use crate::rational::Rational;

#[derive(Serialize, Deserialize)]
struct Entry {
    tuple: Vec<String>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct Repr {
    arity: usize,
    entries: Vec<Entry>,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            arity: self.arity,
            entries: self
                .iter()
                .map(|(t, w)| Entry {
                    tuple: t.iter().map(|a| a.as_str().to_owned()).collect(),
                    num: w.numer().to_string(),
                    den: w.denom().to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = Repr::deserialize(d)?;
        let mut pairs = Vec::with_capacity(repr.entries.len());
        for e in repr.entries {
            if e.tuple.len() != repr.arity {
                return Err(D::Error::custom(format!(
                    "tuple of length {} in a measure of arity {}",
                    e.tuple.len(),
                    repr.arity
                )));
            }
            let num: BigInt = e.num.trim().parse().map_err(D::Error::custom)?;
            let den: BigInt = e.den.trim().parse().map_err(D::Error::custom)?;
            if den == BigInt::from(0) {
                return Err(D::Error::custom("zero denominator"));
            }
            let t = e.tuple.iter().map(|s| Atom::new(s)).collect();
            pairs.push((t, Rational::new(num, den)));
        }
        DiscreteMeasure::new(pairs).map_err(D::Error::custom)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Atom::new(&s))
    }
}
