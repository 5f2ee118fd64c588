//! JSON helpers: big integers travel as decimal strings.

use num_bigint::BigUint;
use serde::Serializer;
use serde_json::Value;

use crate::error::{Error, Result};

/// Serializes a big integer as a decimal string.
pub fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Serializes a vector of big integers as decimal strings.
pub fn ser_big_vec<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

/// Decimal-string form of a vector.
pub fn big_strings(v: &[BigUint]) -> Vec<String> {
    v.iter().map(|b| b.to_string()).collect()
}

/// Reads a big integer from a JSON string or nonnegative number.
pub fn big_from_value(v: &Value) -> Result<BigUint> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not a nonnegative integer: {s:?}"))),
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| Error::Parse(format!("not a nonnegative integer: {n}"))),
        other => Err(Error::Parse(format!("expected integer, found {other}"))),
    }
}

/// Reads an array of big integers.
pub fn big_vec_from_value(v: &Value) -> Result<Vec<BigUint>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("expected array, found {v}")))?
        .iter()
        .map(big_from_value)
        .collect()
}
