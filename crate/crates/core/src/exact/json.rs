//! Serialization helpers: rationals as `{num, den}` and big integers as
//! plain JSON numbers when they fit, decimal strings otherwise.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for IntRepr {
    fn from(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(x.to_string()),
        }
    }
}

impl IntRepr {
    fn value(&self) -> Result<BigInt, String> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(*v)),
            IntRepr::Big(s) => BigInt::from_str(s).map_err(|e| e.to_string()),
        }
    }
}

/// Exact rational for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction(pub Rational);

#[derive(Serialize, Deserialize)]
struct FractionRepr {
    num: IntRepr,
    den: IntRepr,
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FractionRepr {
            num: self.0.numer().into(),
            den: self.0.denom().into(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = FractionRepr::deserialize(d)?;
        let den = r.den.value().map_err(D::Error::custom)?;
        if den == BigInt::from(0) {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Fraction(Rational::new(r.num.value().map_err(D::Error::custom)?, den)))
    }
}

impl From<Rational> for Fraction {
    fn from(x: Rational) -> Self {
        Fraction(x)
    }
}

/// `#[serde(with = "…::big_ints")]` for `Vec<BigInt>`.
pub mod big_ints {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(IntRepr::from).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<IntRepr>::deserialize(d)?
            .iter()
            .map(|r| r.value().map_err(D::Error::custom))
            .collect()
    }
}
