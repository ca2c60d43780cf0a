use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::taxonomy::{
    apple_category_of, google_category_of, AppleCategory, AppleDatatype, ApplePurpose,
    GoogleCategory, GoogleDatatype, GooglePurpose, PrivacyType,
};

/// A purpose/category/datatype row under Data Linked or Not Linked to You.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AppleEntry {
    pub purpose: ApplePurpose,
    pub category: AppleCategory,
    pub datatype: AppleDatatype,
}

/// A row under Data Used to Track You. Tracking has no purpose level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrackedEntry {
    pub category: AppleCategory,
    pub datatype: AppleDatatype,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppleLabel {
    pub privacy_types: BTreeSet<PrivacyType>,
    #[serde(default)]
    pub tracked_entries: BTreeSet<TrackedEntry>,
    #[serde(default)]
    pub linked_entries: BTreeSet<AppleEntry>,
    #[serde(default)]
    pub not_linked_entries: BTreeSet<AppleEntry>,
}

impl AppleLabel {
    pub fn not_collected() -> Self {
        AppleLabel {
            privacy_types: [PrivacyType::DataNotCollected].into_iter().collect(),
            ..AppleLabel::default()
        }
    }

    pub fn collects(&self) -> bool {
        !self.privacy_types.contains(&PrivacyType::DataNotCollected)
    }

    pub fn tracks(&self) -> bool {
        self.privacy_types.contains(&PrivacyType::DataUsedToTrackYou) || !self.tracked_entries.is_empty()
    }

    pub fn asserts_linked(&self) -> bool {
        self.privacy_types.contains(&PrivacyType::DataLinkedToYou) || !self.linked_entries.is_empty()
    }

    pub fn asserts_not_linked(&self) -> bool {
        self.privacy_types.contains(&PrivacyType::DataNotLinkedToYou)
            || !self.not_linked_entries.is_empty()
    }

    /// Whether the label claims any data use at all.
    pub fn asserts_collection(&self) -> bool {
        self.tracks() || self.asserts_linked() || self.asserts_not_linked()
    }
}

/// Tri-state security declarations: `None` means not stated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SecurityPractices {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encrypted_in_transit: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_deletion_option: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independent_review: Option<bool>,
}

impl SecurityPractices {
    pub fn is_unstated(&self) -> bool {
        self.encrypted_in_transit.is_none()
            && self.data_deletion_option.is_none()
            && self.independent_review.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GoogleEntry {
    pub category: GoogleCategory,
    pub datatype: GoogleDatatype,
    pub purposes: BTreeSet<GooglePurpose>,
    #[serde(default)]
    pub optional_flag: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoogleLabel {
    #[serde(default)]
    pub collected: BTreeSet<GoogleEntry>,
    #[serde(default)]
    pub shared: BTreeSet<GoogleEntry>,
    #[serde(default)]
    pub security: SecurityPractices,
}

impl GoogleLabel {
    /// Whether anything is collected or shared.
    pub fn has_data(&self) -> bool {
        !self.collected.is_empty() || !self.shared.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &GoogleEntry> {
        self.collected.iter().chain(self.shared.iter())
    }
}

string_enum! {
    /// Label invariant names.
    pub enum Rule {
        NotCollectedSole => "NotCollectedSole",
        NotCollectedEmpty => "NotCollectedEmpty",
        DatatypeInCategory => "DatatypeInCategory",
        PurposesNonEmpty => "PurposesNonEmpty",
        EntriesHavePrivacyType => "EntriesHavePrivacyType",
    }
}

impl Rule {
    pub fn message(self) -> &'static str {
        match self {
            Rule::NotCollectedSole => "DataNotCollected must be sole type",
            Rule::NotCollectedEmpty => "DataNotCollected label lists entries",
            Rule::DatatypeInCategory => "datatype not in category",
            Rule::PurposesNonEmpty => "entry has no purposes",
            Rule::EntriesHavePrivacyType => "entries under an undeclared privacy type",
        }
    }
}

/// A broken invariant and the element that breaks it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub element: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule.message(), self.element)
    }
}

fn v(rule: Rule, element: String) -> Violation {
    Violation { rule, element }
}

/// Lists every broken invariant of an Apple label, sorted.
pub fn validate_apple_label(label: &AppleLabel) -> Vec<Violation> {
    let mut out = Vec::new();
    let types = &label.privacy_types;
    if types.contains(&PrivacyType::DataNotCollected) {
        for t in types.iter().filter(|t| **t != PrivacyType::DataNotCollected) {
            out.push(v(Rule::NotCollectedSole, format!("privacy_types[{t}]")));
        }
        let n = label.tracked_entries.len() + label.linked_entries.len() + label.not_linked_entries.len();
        if n > 0 {
            out.push(v(Rule::NotCollectedEmpty, format!("{n} entries")));
        }
    }
    for e in &label.tracked_entries {
        if apple_category_of(e.datatype) != e.category {
            out.push(v(Rule::DatatypeInCategory, format!("tracked_entries[{}/{}]", e.category, e.datatype)));
        }
    }
    for (name, set) in [("linked_entries", &label.linked_entries), ("not_linked_entries", &label.not_linked_entries)] {
        for e in set {
            if apple_category_of(e.datatype) != e.category {
                out.push(v(
                    Rule::DatatypeInCategory,
                    format!("{name}[{}/{}/{}]", e.purpose, e.category, e.datatype),
                ));
            }
        }
    }
    let pairs = [
        (PrivacyType::DataUsedToTrackYou, label.tracked_entries.is_empty()),
        (PrivacyType::DataLinkedToYou, label.linked_entries.is_empty()),
        (PrivacyType::DataNotLinkedToYou, label.not_linked_entries.is_empty()),
    ];
    for (t, empty) in pairs {
        if !empty && !types.contains(&t) {
            out.push(v(Rule::EntriesHavePrivacyType, format!("{t}")));
        }
    }
    out.sort();
    out
}

/// Lists every broken invariant of a Google label, sorted.
pub fn validate_google_label(label: &GoogleLabel) -> Vec<Violation> {
    let mut out = Vec::new();
    for (name, set) in [("collected", &label.collected), ("shared", &label.shared)] {
        for e in set {
            if google_category_of(e.datatype) != e.category {
                out.push(v(Rule::DatatypeInCategory, format!("{name}[{}/{}]", e.category, e.datatype)));
            }
            if e.purposes.is_empty() {
                out.push(v(Rule::PurposesNonEmpty, format!("{name}[{}/{}]", e.category, e.datatype)));
            }
        }
    }
    out.sort();
    out
}
