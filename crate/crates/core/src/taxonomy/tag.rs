use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DataCategory, Purpose};
use crate::error::UnknownName;

string_enum! {
    pub enum Identifiability {
        Identifiable => "identifiable",
        Anonymous => "anonymous",
    }
}

string_enum! {
    pub enum Polarity {
        Does => "does",
        DoesNot => "does_not",
    }
}

/// A classifier output class of the policy taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TagClass {
    FirstPartyCollectionShare,
    ThirdPartySharingCollection,
    Identifiability(Identifiability),
    DoesDoesNot(Polarity),
    EncryptionInTransit,
    DataDeletionOption,
    DataCategory(DataCategory),
    Purpose(Purpose),
}

impl TagClass {
    /// Every class, in `Ord` order.
    pub fn all() -> Vec<TagClass> {
        let mut v = Vec::new();
        v.push(TagClass::FirstPartyCollectionShare);
        v.push(TagClass::ThirdPartySharingCollection);
        v.extend(Identifiability::ALL.iter().map(|&i| TagClass::Identifiability(i)));
        v.extend(Polarity::ALL.iter().map(|&p| TagClass::DoesDoesNot(p)));
        v.push(TagClass::EncryptionInTransit);
        v.push(TagClass::DataDeletionOption);
        v.extend(DataCategory::ALL.iter().map(|&c| TagClass::DataCategory(c)));
        v.extend(Purpose::ALL.iter().map(|&p| TagClass::Purpose(p)));
        v
    }
}

impl fmt::Display for TagClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagClass::FirstPartyCollectionShare => f.write_str("FirstPartyCollectionShare"),
            TagClass::ThirdPartySharingCollection => f.write_str("ThirdPartySharingCollection"),
            TagClass::Identifiability(i) => write!(f, "Identifiability({i})"),
            TagClass::DoesDoesNot(p) => write!(f, "DoesDoesNot({p})"),
            TagClass::EncryptionInTransit => f.write_str("EncryptionInTransit"),
            TagClass::DataDeletionOption => f.write_str("DataDeletionOption"),
            TagClass::DataCategory(c) => write!(f, "DataCategory({c})"),
            TagClass::Purpose(p) => write!(f, "Purpose({p})"),
        }
    }
}

impl FromStr for TagClass {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || UnknownName::new("TagClass", s);
        let t = s.trim();
        if let Some(open) = t.find('(') {
            let inner = t[open + 1..].strip_suffix(')').ok_or_else(err)?;
            let r = match &t[..open] {
                "Identifiability" => inner.parse().map(TagClass::Identifiability),
                "DoesDoesNot" => inner.parse().map(TagClass::DoesDoesNot),
                "DataCategory" => inner.parse().map(TagClass::DataCategory),
                "Purpose" => inner.parse().map(TagClass::Purpose),
                _ => return Err(err()),
            };
            return r.map_err(|_| err());
        }
        match t {
            "FirstPartyCollectionShare" => Ok(TagClass::FirstPartyCollectionShare),
            "ThirdPartySharingCollection" => Ok(TagClass::ThirdPartySharingCollection),
            "EncryptionInTransit" => Ok(TagClass::EncryptionInTransit),
            "DataDeletionOption" => Ok(TagClass::DataDeletionOption),
            _ => Err(err()),
        }
    }
}

impl Serialize for TagClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TagClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("score {0} outside [0, 1]")]
pub struct InvalidScore(pub f64);

/// A confidence in `[0, 1]`. Never NaN, so it is totally ordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score(f64);

impl Score {
    pub const ONE: Score = Score(1.0);
    pub const ZERO: Score = Score(0.0);

    pub fn new(v: f64) -> Result<Score, InvalidScore> {
        if (0.0..=1.0).contains(&v) {
            // folds -0.0 into 0.0 so equality, ordering, and hashing agree
            Ok(Score(v + 0.0))
        } else {
            Err(InvalidScore(v))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Eq for Score {}

impl core::hash::Hash for Score {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Serialize for Score {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Score {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Score::new(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// One tag on a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaxonomyTag {
    pub class: TagClass,
    pub score: Score,
}

impl TaxonomyTag {
    pub fn new(class: TagClass, score: Score) -> Self {
        TaxonomyTag { class, score }
    }

    /// A rule-based tag, which always carries score 1.
    pub fn certain(class: TagClass) -> Self {
        TaxonomyTag { class, score: Score::ONE }
    }
}

/// The tag set of one segment: at most one score per class.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annotations(BTreeMap<TagClass, Score>);

impl Annotations {
    pub fn new() -> Self {
        Annotations(BTreeMap::new())
    }

    /// Adds a tag; a class seen twice keeps the higher score.
    pub fn insert(&mut self, tag: TaxonomyTag) {
        let slot = self.0.entry(tag.class).or_insert(tag.score);
        if tag.score > *slot {
            *slot = tag.score;
        }
    }

    pub fn score(&self, class: TagClass) -> Option<Score> {
        self.0.get(&class).copied()
    }

    /// Whether `class` is present with a score of at least `threshold`.
    pub fn has(&self, class: TagClass, threshold: f64) -> bool {
        self.0.get(&class).is_some_and(|s| s.get() >= threshold)
    }

    pub fn iter(&self) -> impl Iterator<Item = TaxonomyTag> + '_ {
        self.0.iter().map(|(&class, &score)| TaxonomyTag { class, score })
    }

    pub fn classes(&self) -> impl Iterator<Item = TagClass> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<TaxonomyTag> for Annotations {
    fn from_iter<I: IntoIterator<Item = TaxonomyTag>>(iter: I) -> Self {
        let mut a = Annotations::new();
        for t in iter {
            a.insert(t);
        }
        a
    }
}

impl Serialize for Annotations {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Annotations {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<TaxonomyTag>::deserialize(d)?.into_iter().collect())
    }
}
