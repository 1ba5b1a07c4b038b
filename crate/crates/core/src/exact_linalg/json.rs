//! JSON encoding of exact matrices.
//!
//! Matrices are written as `{"rows": r, "cols": c, "entries": [[...], ...]}`
//! with integers as decimal strings and rationals as `"p/q"` strings. On
//! input, plain JSON integers and a bare array of rows are accepted too.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{IntegerMatrix, RationalMatrix};

#[derive(Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    fn into_integer<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            Scalar::Int(x) => Ok(BigInt::from(x)),
            Scalar::Text(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| E::custom(format!("invalid integer {s:?}"))),
        }
    }

    fn into_rational<E: serde::de::Error>(self) -> Result<BigRational, E> {
        match self {
            Scalar::Int(x) => Ok(BigRational::from_integer(x.into())),
            Scalar::Text(s) => parse_rational(&s).map_err(E::custom),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("invalid rational {s:?}");
    let (num, den) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Object {
        rows: usize,
        cols: usize,
        entries: Vec<Vec<Scalar>>,
    },
    Bare(Vec<Vec<Scalar>>),
}

impl MatrixRepr {
    fn into_parts<E: serde::de::Error>(self) -> Result<(usize, usize, Vec<Vec<Scalar>>), E> {
        match self {
            MatrixRepr::Object { rows, cols, entries } => {
                if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
                    return Err(E::custom(format!("entries do not match declared shape {rows}x{cols}")));
                }
                Ok((rows, cols, entries))
            }
            MatrixRepr::Bare(entries) => {
                let rows = entries.len();
                let cols = entries.first().map_or(0, Vec::len);
                if entries.iter().any(|r| r.len() != cols) {
                    return Err(E::custom("ragged matrix rows"));
                }
                Ok((rows, cols, entries))
            }
        }
    }
}

#[derive(Serialize)]
struct MatrixOut<'a, T> {
    rows: usize,
    cols: usize,
    entries: &'a [Vec<T>],
}

impl Serialize for IntegerMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        MatrixOut {
            rows: self.rows(),
            cols: self.cols(),
            entries: &entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntegerMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (rows, cols, entries) = MatrixRepr::deserialize(deserializer)?.into_parts::<D::Error>()?;
        let flat = entries
            .into_iter()
            .flatten()
            .map(Scalar::into_integer::<D::Error>)
            .collect::<Result<Vec<_>, _>>()?;
        IntegerMatrix::from_entries(rows, cols, flat).map_err(D::Error::custom)
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        MatrixOut {
            rows: self.rows(),
            cols: self.cols(),
            entries: &entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (rows, cols, entries) = MatrixRepr::deserialize(deserializer)?.into_parts::<D::Error>()?;
        let flat = entries
            .into_iter()
            .flatten()
            .map(Scalar::into_rational::<D::Error>)
            .collect::<Result<Vec<_>, _>>()?;
        RationalMatrix::from_entries(rows, cols, flat).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<BigRational>` as an array of `"p/q"` strings.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(format_rational).collect();
        strings.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<Scalar>::deserialize(deserializer)?
            .into_iter()
            .map(Scalar::into_rational::<D::Error>)
            .collect()
    }
}

/// Serde adapter for `Vec<BigInt>` as an array of decimal strings.
pub mod integer_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(ToString::to_string).collect();
        strings.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Scalar>::deserialize(deserializer)?
            .into_iter()
            .map(Scalar::into_integer::<D::Error>)
            .collect()
    }
}

/// Serde adapter for `Vec<Vec<BigInt>>` as nested arrays of decimal strings.
pub mod integer_vecs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<Vec<String>> = v
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect();
        strings.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<Scalar>>::deserialize(deserializer)?
            .into_iter()
            .map(|row| row.into_iter().map(Scalar::into_integer::<D::Error>).collect())
            .collect()
    }
}
