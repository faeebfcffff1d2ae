//! Seeds are 64-bit unsigned, TOML integers are signed. Seeds that fit in
//! an i64 are written as integers, larger ones as decimal strings; both
//! forms are accepted on input.

use serde::{de, Deserialize, Deserializer, Serializer};

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Int(i64),
    Str(String),
}

fn from_repr<E: de::Error>(r: Repr) -> Result<u64, E> {
    match r {
        Repr::Int(v) => u64::try_from(v).map_err(|_| E::custom("seed must be non-negative")),
        Repr::Str(s) => s.trim().parse().map_err(|_| E::custom(format!("invalid seed `{s}`"))),
    }
}

pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(*v) {
        Ok(i) => s.serialize_i64(i),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    from_repr(Repr::deserialize(d)?)
}

pub mod option {
    use super::*;

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
    }
}
