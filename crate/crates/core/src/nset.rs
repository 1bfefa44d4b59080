//! Subsets of ℕ∞ = {1, 2, …} ∪ {∞} and the multiplicative rules on them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element of ℕ∞. `Fin(0)` is never produced by the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NValue {
    Fin(u64),
    Inf,
}

impl NValue {
    pub const ONE: NValue = NValue::Fin(1);

    pub fn is_infinite(self) -> bool {
        matches!(self, NValue::Inf)
    }

    /// Product with `n·∞ = ∞·n = ∞`.
    ///
    /// # Panics
    /// If the finite product overflows `u64`.
    pub fn mul(self, other: NValue) -> NValue {
        match (self, other) {
            (NValue::Fin(a), NValue::Fin(b)) => {
                NValue::Fin(a.checked_mul(b).expect("multiplicity product overflows u64"))
            }
            _ => NValue::Inf,
        }
    }
}

impl fmt::Display for NValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NValue::Fin(n) => write!(f, "{n}"),
            NValue::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for NValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "inf" | "∞" => Ok(NValue::Inf),
            _ => match t.parse::<u64>() {
                Ok(0) => Err(Error::Parse("0 is not in ℕ∞".into())),
                Ok(n) => Ok(NValue::Fin(n)),
                Err(_) => Err(Error::Parse(format!("not an element of ℕ∞: {t:?}"))),
            },
        }
    }
}

impl From<u64> for NValue {
    fn from(n: u64) -> Self {
        NValue::Fin(n)
    }
}

impl Serialize for NValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(0) => Err(serde::de::Error::custom("0 is not in ℕ∞")),
            Raw::Num(n) => Ok(NValue::Fin(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A finite explicit subset of ℕ∞.
///
/// Textual form is a comma-separated list, e.g. `"2,3,inf"`; the empty set is
/// the empty string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NSet {
    finite: BTreeSet<u64>,
    infinite: bool,
}

impl NSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(v: NValue) -> Self {
        let mut s = Self::empty();
        s.insert(v);
        s
    }

    pub fn one() -> Self {
        Self::singleton(NValue::ONE)
    }

    pub fn infinity() -> Self {
        Self::singleton(NValue::Inf)
    }

    pub fn insert(&mut self, v: NValue) {
        match v {
            NValue::Fin(n) => {
                assert!(n > 0, "0 is not in ℕ∞");
                self.finite.insert(n);
            }
            NValue::Inf => self.infinite = true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && !self.infinite
    }

    pub fn len(&self) -> usize {
        self.finite.len() + usize::from(self.infinite)
    }

    pub fn has_infinity(&self) -> bool {
        self.infinite
    }

    pub fn finite_part(&self) -> &BTreeSet<u64> {
        &self.finite
    }

    pub fn contains(&self, v: NValue) -> bool {
        match v {
            NValue::Fin(n) => self.finite.contains(&n),
            NValue::Inf => self.infinite,
        }
    }

    /// Ascending, with ∞ last.
    pub fn iter(&self) -> impl Iterator<Item = NValue> + '_ {
        self.finite
            .iter()
            .map(|&n| NValue::Fin(n))
            .chain(self.infinite.then_some(NValue::Inf))
    }

    pub fn to_vec(&self) -> Vec<NValue> {
        self.iter().collect()
    }

    pub fn as_singleton(&self) -> Option<NValue> {
        (self.len() == 1).then(|| self.iter().next().unwrap())
    }

    pub fn union(&self, other: &NSet) -> NSet {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn extend_from(&mut self, other: &NSet) {
        self.finite.extend(other.finite.iter().copied());
        self.infinite |= other.infinite;
    }

    pub fn is_subset(&self, other: &NSet) -> bool {
        self.finite.is_subset(&other.finite) && (!self.infinite || other.infinite)
    }

    /// `{mn : m ∈ self, n ∈ other}`.
    pub fn product(&self, other: &NSet) -> NSet {
        let mut out = NSet::empty();
        for a in self.iter() {
            for b in other.iter() {
                out.insert(a.mul(b));
            }
        }
        out
    }

    /// All non-empty subsets, in a fixed order. Intended for small sets.
    pub fn nonempty_subsets(&self) -> Vec<NSet> {
        let elems = self.to_vec();
        assert!(elems.len() < 20, "subset enumeration is exponential");
        (1u32..1 << elems.len())
            .map(|mask| {
                elems
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect()
    }
}

impl FromIterator<NValue> for NSet {
    fn from_iter<I: IntoIterator<Item = NValue>>(iter: I) -> Self {
        let mut s = NSet::empty();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Display for NSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for NSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}');
        if t.trim().is_empty() {
            return Ok(NSet::empty());
        }
        t.split(',').map(str::parse::<NValue>).collect()
    }
}

impl Serialize for NSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn nset_product(e: &NSet, f: &NSet) -> NSet {
    e.product(f)
}

/// Mixed invariant of a finite tensor product: the iterated set product.
/// An empty list gives `{1}`.
pub fn tensor_mixed(factors: &[NSet]) -> NSet {
    factors.iter().fold(NSet::one(), |acc, f| acc.product(f))
}

/// Mixed invariant of an infinite tensor product of singleton factors.
///
/// `prefix` lists the first factors explicitly; `tail_all_ones` states
/// whether every later factor is `{1}`. Without that, infinitely many
/// factors exceed 1 and the result is `{∞}`.
pub fn tensor_mixed_infinite(prefix: &[NSet], tail_all_ones: bool) -> Result<NSet> {
    let values = prefix
        .iter()
        .map(|s| s.as_singleton().ok_or(Error::NonSingletonInfinite))
        .collect::<Result<Vec<_>>>()?;
    if !tail_all_ones {
        return Ok(NSet::infinity());
    }
    Ok(NSet::singleton(
        values.into_iter().fold(NValue::ONE, NValue::mul),
    ))
}

/// Invariant of a direct sum of masas: `puk(A) ∪ puk(B) ∪ puk(A, B)`.
pub fn direct_sum_puk(puk_a: &NSet, puk_b: &NSet, mixed: &NSet) -> Result<NSet> {
    if puk_a.is_empty() || puk_b.is_empty() || mixed.is_empty() {
        return Err(Error::EmptyInput("direct sum needs three non-empty sets"));
    }
    Ok(puk_a.union(puk_b).union(mixed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> NSet {
        t.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(s("3, 2,inf").to_string(), "2,3,inf");
        assert_eq!(s("").len(), 0);
        assert_eq!(s("{1,∞}"), s("1,inf"));
        assert!("0".parse::<NSet>().is_err());
        assert!("x".parse::<NSet>().is_err());
    }

    #[test]
    fn product_examples() {
        assert_eq!(s("1").product(&s("4,7,inf")), s("4,7,inf"));
        assert_eq!(s("2").product(&s("inf")), s("inf"));
        assert_eq!(s("2,3").product(&s("2,5")), s("4,6,10,15"));
        assert_eq!(s("2,3").product(&NSet::empty()), NSet::empty());
    }

    #[test]
    fn tensor_rules() {
        assert_eq!(tensor_mixed(&[s("2"), s("3")]), s("6"));
        assert_eq!(tensor_mixed_infinite(&[s("2"), s("2"), s("2")], false).unwrap(), s("inf"));
        assert_eq!(tensor_mixed_infinite(&[s("2"), s("1"), s("1")], true).unwrap(), s("2"));
        assert_eq!(
            tensor_mixed_infinite(&[s("2,3")], true),
            Err(Error::NonSingletonInfinite)
        );
    }

    #[test]
    fn direct_sum_examples() {
        assert_eq!(direct_sum_puk(&s("4"), &s("4"), &s("1")).unwrap(), s("1,4"));
        assert_eq!(direct_sum_puk(&s("2"), &s("3"), &s("5")).unwrap(), s("2,3,5"));
        assert_eq!(direct_sum_puk(&s("inf"), &s("inf"), &s("inf")).unwrap(), s("inf"));
        assert!(direct_sum_puk(&s(""), &s("1"), &s("1")).is_err());
    }

    #[test]
    fn serde_uses_text_form() {
        let json = serde_json::to_string(&s("5,inf")).unwrap();
        assert_eq!(json, "\"5,inf\"");
        let back: NSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s("5,inf"));
        let v: NValue = serde_json::from_str("7").unwrap();
        assert_eq!(v, NValue::Fin(7));
    }
}
