//! Structured outcome of an exact inequality check.
//!
//! JSON form, keys in this order:
//! `{ statement_id, lhs, rhs, verdict, parameters, witness }` where `lhs` and
//! `rhs` are decimal strings (`"p/q"` for non-integers), `parameters` is an
//! insertion-ordered object and `witness` is an array of integer arrays or
//! `null`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::de::{self, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::sets::{LatticePoint, PointSet, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Eq => "==",
        }
    }
}

/// A named quantity attached to a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Integer(BigInt),
    Rational(Rational),
    Bool(bool),
    Text(String),
    Ints(Vec<BigInt>),
}

impl ParamValue {
    pub fn ints<T: Into<BigInt>>(values: impl IntoIterator<Item = T>) -> Self {
        ParamValue::Ints(values.into_iter().map(Into::into).collect())
    }

    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            ParamValue::Integer(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ParamValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

macro_rules! param_from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for ParamValue {
            fn from(v: $t) -> Self { ParamValue::Integer(BigInt::from(v)) }
        }
    )*};
}
param_from_int!(i64, u64, usize, u32, i32);

impl From<BigInt> for ParamValue {
    fn from(v: BigInt) -> Self {
        ParamValue::Integer(v)
    }
}

impl From<Rational> for ParamValue {
    /// Integral values become [`ParamValue::Integer`], matching what parsing
    /// the JSON form gives back.
    fn from(v: Rational) -> Self {
        if v.is_integer() {
            ParamValue::Integer(v.to_integer())
        } else {
            ParamValue::Rational(v)
        }
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Integer(v) => write!(f, "{v}"),
            ParamValue::Rational(v) => write!(f, "{v}"),
            ParamValue::Bool(v) => write!(f, "{v}"),
            ParamValue::Text(v) => f.write_str(v),
            ParamValue::Ints(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

/// Exact outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub statement_id: String,
    #[serde(with = "exact")]
    pub lhs: Rational,
    #[serde(with = "exact")]
    pub rhs: Rational,
    pub verdict: Verdict,
    #[serde(with = "params")]
    pub parameters: Vec<(String, ParamValue)>,
    #[serde(with = "witness")]
    pub witness: Option<Vec<LatticePoint>>,
}

impl VerificationReport {
    /// Report for `lhs <relation> rhs`; the verdict is computed here.
    pub fn compare(
        statement_id: &str,
        lhs: impl Into<Rational>,
        relation: Relation,
        rhs: impl Into<Rational>,
    ) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let verdict = Verdict::from_bool(relation.holds(&lhs, &rhs));
        VerificationReport {
            statement_id: statement_id.to_string(),
            lhs,
            rhs,
            verdict,
            parameters: vec![("relation".into(), relation.symbol().into())],
            witness: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<ParamValue>) -> Self {
        self.parameters.push((key.to_string(), value.into()));
        self
    }

    /// Marks the report failed if `ok` is false, recording the sub-check.
    pub fn require(mut self, key: &str, ok: bool) -> Self {
        if !ok {
            self.verdict = Verdict::Fail;
        }
        self.param(key, ok)
    }

    pub fn with_witness(mut self, w: &PointSet) -> Self {
        self.witness = Some(w.points().to_vec());
        self
    }

    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.parameters.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24}{}", "statement", self.statement_id)?;
        writeln!(f, "{:<24}{}", "lhs", self.lhs)?;
        writeln!(f, "{:<24}{}", "rhs", self.rhs)?;
        writeln!(f, "{:<24}{}", "verdict", self.verdict)?;
        for (k, v) in &self.parameters {
            writeln!(f, "{k:<24}{v}")?;
        }
        if let Some(w) = &self.witness {
            writeln!(f, "witness ({} points)", w.len())?;
            for p in w {
                writeln!(f, "  {p}")?;
            }
        }
        Ok(())
    }
}

/// Formats a rational as `n` or `p/q`.
pub fn format_exact(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n` or `p/q` (q ≠ 0) into a reduced rational.
pub fn parse_exact(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q == BigInt::from(0) {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
    }
}

fn bigint_number(v: &BigInt) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("integer literal")
}

fn number_bigint<E: de::Error>(n: &serde_json::Number) -> Result<BigInt, E> {
    BigInt::from_str(&n.to_string()).map_err(|_| E::custom(format!("not an integer: {n}")))
}

struct IntArray<'a>(&'a [BigInt]);

impl Serialize for IntArray<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for v in self.0 {
            seq.serialize_element(&bigint_number(v))?;
        }
        seq.end()
    }
}

fn ints_from_values<E: de::Error>(values: Vec<serde_json::Number>) -> Result<Vec<BigInt>, E> {
    values.iter().map(number_bigint).collect()
}

impl Serialize for LatticePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntArray(self.coords()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let values = Vec::<serde_json::Number>::deserialize(d)?;
        Ok(LatticePoint::new(ints_from_values(values)?))
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pts = Vec::<LatticePoint>::deserialize(d)?;
        let dim = pts.first().map(LatticePoint::dim).ok_or_else(|| de::Error::custom("empty point list"))?;
        PointSet::new(dim, pts).map_err(de::Error::custom)
    }
}

pub(crate) mod exact {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_exact(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_exact(&s).ok_or_else(|| de::Error::custom(format!("not an exact number: {s:?}")))
    }
}

pub(crate) mod params {
    use super::*;

    pub fn serialize<S: Serializer>(p: &[(String, ParamValue)], s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(p.len()))?;
        for (k, v) in p {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(String, ParamValue)>, D::Error> {
        struct Ordered;
        impl<'de> Visitor<'de> for Ordered {
            type Value = Vec<(String, ParamValue)>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a parameter object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = m.next_entry::<String, ParamValue>()? {
                    out.push((k, v));
                }
                Ok(out)
            }
        }
        d.deserialize_map(Ordered)
    }
}

impl Serialize for ParamValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ParamValue::Integer(v) => s.serialize_str(&v.to_string()),
            ParamValue::Rational(v) => s.serialize_str(&format_exact(v)),
            ParamValue::Bool(v) => s.serialize_bool(*v),
            ParamValue::Text(v) => s.serialize_str(v),
            ParamValue::Ints(v) => IntArray(v).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ParamValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Bool(b) => Ok(ParamValue::Bool(b)),
            serde_json::Value::String(s) => Ok(match parse_exact(&s) {
                Some(r) if r.is_integer() && !s.contains('/') => ParamValue::Integer(r.to_integer()),
                Some(r) if s.contains('/') && format_exact(&r) == s => ParamValue::Rational(r),
                _ => ParamValue::Text(s),
            }),
            serde_json::Value::Number(n) => Ok(ParamValue::Integer(number_bigint(&n)?)),
            serde_json::Value::Array(items) => {
                let nums = items
                    .into_iter()
                    .map(|v| match v {
                        serde_json::Value::Number(n) => Ok(n),
                        other => Err(de::Error::custom(format!("expected integer, found {other}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ParamValue::Ints(ints_from_values(nums)?))
            }
            other => Err(de::Error::custom(format!("unsupported parameter value {other}"))),
        }
    }
}

pub(crate) mod witness {
    use super::*;

    pub fn serialize<S: Serializer>(w: &Option<Vec<LatticePoint>>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            None => s.serialize_none(),
            Some(points) => s.collect_seq(points),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<LatticePoint>>, D::Error> {
        struct W;
        impl<'de> Visitor<'de> for W {
            type Value = Option<Vec<LatticePoint>>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("null or an array of integer arrays")
            }
            fn visit_unit<E: de::Error>(self) -> Result<Self::Value, E> {
                Ok(None)
            }
            fn visit_none<E: de::Error>(self) -> Result<Self::Value, E> {
                Ok(None)
            }
            fn visit_some<D: Deserializer<'de>>(self, d: D) -> Result<Self::Value, D::Error> {
                Vec::<LatticePoint>::deserialize(d).map(Some)
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(p) = seq.next_element::<LatticePoint>()? {
                    out.push(p);
                }
                Ok(Some(out))
            }
        }
        d.deserialize_option(W)
    }
}
