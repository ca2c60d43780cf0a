//! Label against policy, label against label, and the trend flags.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::annotate::PracticeSet;
use crate::error::UnknownName;
use crate::matcher::MatchResult;
use crate::model::{AppRecord, AppleEntry, AppleLabel, GoogleLabel, Platform};
use crate::taxonomy::{
    apple_category_taxonomy, google_category_taxonomy, map_apl_purpose, map_dss_datatype,
    map_dss_purpose, AppleCategory, CommonDatatype, CommonPurpose, DataCategory, GoogleCategory,
};

/// Something a label or a policy can state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Practice {
    DataCollection,
    DataSharing,
    EncryptionInTransit,
    DataDeletionOption,
    DataLinkedToYou,
    DataUsedToTrackYou,
    DataNotLinkedToYou,
    DataNotCollected,
    Collection(DataCategory),
    Sharing(DataCategory),
    Linked(DataCategory),
    NotLinked(DataCategory),
}

const PLAIN: [(Practice, &str); 8] = [
    (Practice::DataCollection, "DataCollection"),
    (Practice::DataSharing, "DataSharing"),
    (Practice::EncryptionInTransit, "EncryptionInTransit"),
    (Practice::DataDeletionOption, "DataDeletionOption"),
    (Practice::DataLinkedToYou, "DataLinkedToYou"),
    (Practice::DataUsedToTrackYou, "DataUsedToTrackYou"),
    (Practice::DataNotLinkedToYou, "DataNotLinkedToYou"),
    (Practice::DataNotCollected, "DataNotCollected"),
];

impl Practice {
    /// True for the per-category forms.
    pub fn is_category(self) -> bool {
        self.category().is_some()
    }

    pub fn category(self) -> Option<DataCategory> {
        match self {
            Practice::Collection(c) | Practice::Sharing(c) | Practice::Linked(c) | Practice::NotLinked(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Practice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Practice::Collection(c) => write!(f, "Collection({c})"),
            Practice::Sharing(c) => write!(f, "Sharing({c})"),
            Practice::Linked(c) => write!(f, "Linked({c})"),
            Practice::NotLinked(c) => write!(f, "NotLinked({c})"),
            p => {
                let name = PLAIN.iter().find(|(q, _)| q == p).map(|(_, n)| *n).unwrap_or_default();
                f.write_str(name)
            }
        }
    }
}

impl FromStr for Practice {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((p, _)) = PLAIN.iter().find(|(_, n)| *n == s) {
            return Ok(*p);
        }
        let err = || UnknownName::new("Practice", s);
        let (head, rest) = s.split_once('(').ok_or_else(err)?;
        let inner = rest.strip_suffix(')').ok_or_else(err)?;
        let c: DataCategory = inner.parse().map_err(|_| err())?;
        match head {
            "Collection" => Ok(Practice::Collection(c)),
            "Sharing" => Ok(Practice::Sharing(c)),
            "Linked" => Ok(Practice::Linked(c)),
            "NotLinked" => Ok(Practice::NotLinked(c)),
            _ => Err(err()),
        }
    }
}

impl Serialize for Practice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Practice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

string_enum! {
    pub enum Direction {
        /// Stated by the label, missing from the policy.
        InLabel => "in_label",
        /// Stated by the policy, missing from the label.
        InPolicy => "in_policy",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Finding {
    pub practice: Practice,
    pub direction: Direction,
}

/// Label against policy for one app.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub platform: Platform,
    pub app_id: String,
    pub findings: BTreeSet<Finding>,
    /// Label categories with no policy counterpart, never checked.
    #[serde(default)]
    pub uncheckable: BTreeSet<String>,
    /// Google datatypes the label marks optional. Informational.
    #[serde(default)]
    pub optional_datatypes: BTreeSet<String>,
}

impl ConsistencyReport {
    fn new(platform: Platform) -> Self {
        ConsistencyReport {
            platform,
            app_id: String::new(),
            findings: BTreeSet::new(),
            uncheckable: BTreeSet::new(),
            optional_datatypes: BTreeSet::new(),
        }
    }

    pub fn with_app_id(mut self, app_id: impl Into<String>) -> Self {
        self.app_id = app_id.into();
        self
    }

    pub fn is_consistent(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has(&self, practice: Practice, direction: Direction) -> bool {
        self.findings.contains(&Finding { practice, direction })
    }

    fn add(&mut self, practice: Practice, direction: Direction) {
        self.findings.insert(Finding { practice, direction });
    }

    /// Emits `practice` in whichever direction the two sides disagree.
    fn compare(&mut self, practice: Practice, label: bool, policy: bool) {
        match (label, policy) {
            (true, false) => self.add(practice, Direction::InLabel),
            (false, true) => self.add(practice, Direction::InPolicy),
            _ => {}
        }
    }

    /// Category-level comparison. Policy-only categories are reported only
    /// when some label category could have expressed them.
    fn compare_categories(
        &mut self,
        wrap: fn(DataCategory) -> Practice,
        label: &BTreeSet<DataCategory>,
        policy: &BTreeSet<DataCategory>,
        expressible: &BTreeSet<DataCategory>,
    ) {
        for &c in label.difference(policy) {
            self.add(wrap(c), Direction::InLabel);
        }
        for &c in policy.difference(label).filter(|c| expressible.contains(c)) {
            self.add(wrap(c), Direction::InPolicy);
        }
    }
}

fn google_expressible() -> BTreeSet<DataCategory> {
    GoogleCategory::ALL.iter().filter_map(|&c| google_category_taxonomy(c)).collect()
}

fn apple_expressible() -> BTreeSet<DataCategory> {
    AppleCategory::ALL.iter().filter_map(|&c| apple_category_taxonomy(c)).collect()
}

pub fn check_google_label_vs_policy(label: &GoogleLabel, practices: &PracticeSet) -> ConsistencyReport {
    let mut r = ConsistencyReport::new(Platform::Google);
    r.compare(Practice::DataCollection, !label.collected.is_empty(), !practices.data_collection.is_empty());
    r.compare(Practice::DataSharing, !label.shared.is_empty(), !practices.data_sharing.is_empty());
    let sec = &label.security;
    r.compare(Practice::EncryptionInTransit, sec.encrypted_in_transit == Some(true), practices.encryption_in_transit);
    r.compare(Practice::DataDeletionOption, sec.data_deletion_option == Some(true), practices.data_deletion_option);

    let expressible = google_expressible();
    let categories = |set: &BTreeSet<crate::model::GoogleEntry>, r: &mut ConsistencyReport| {
        let mut out = BTreeSet::new();
        for e in set {
            match google_category_taxonomy(e.category) {
                Some(c) => {
                    out.insert(c);
                }
                None => {
                    r.uncheckable.insert(e.category.to_string());
                }
            }
            if e.optional_flag {
                r.optional_datatypes.insert(e.datatype.to_string());
            }
        }
        out
    };
    let collected = categories(&label.collected, &mut r);
    let shared = categories(&label.shared, &mut r);
    r.compare_categories(Practice::Collection, &collected, &practices.data_collection, &expressible);
    r.compare_categories(Practice::Sharing, &shared, &practices.data_sharing, &expressible);
    r
}

pub fn check_apple_label_vs_policy(label: &AppleLabel, practices: &PracticeSet) -> ConsistencyReport {
    let mut r = ConsistencyReport::new(Platform::Apple);
    r.compare(Practice::DataLinkedToYou, label.asserts_linked(), !practices.linked.is_empty());
    r.compare(Practice::DataUsedToTrackYou, label.tracks(), practices.tracking_evidence);
    if !practices.not_linked.is_empty() && practices.linked.is_empty() && label.asserts_linked() {
        r.add(Practice::DataNotLinkedToYou, Direction::InPolicy);
    }
    if practices.data_collection.is_empty() && practices.data_sharing.is_empty() && label.asserts_collection() {
        r.add(Practice::DataNotCollected, Direction::InPolicy);
    }

    let expressible = apple_expressible();
    let categories = |set: &BTreeSet<AppleEntry>, r: &mut ConsistencyReport| {
        let mut out = BTreeSet::new();
        for e in set {
            match apple_category_taxonomy(e.category) {
                Some(c) => {
                    out.insert(c);
                }
                None => {
                    r.uncheckable.insert(e.category.to_string());
                }
            }
        }
        out
    };
    let linked = categories(&label.linked_entries, &mut r);
    let not_linked = categories(&label.not_linked_entries, &mut r);
    r.compare_categories(Practice::Linked, &linked, &practices.linked, &expressible);
    r.compare_categories(Practice::NotLinked, &not_linked, &practices.not_linked, &expressible);
    r
}

/// Whether one store says the app collects data and the other says it
/// does not.
pub fn check_cross_collection(g: &GoogleLabel, a: &AppleLabel) -> bool {
    g.has_data() != a.collects()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CommonPair {
    pub datatype: CommonDatatype,
    pub purpose: CommonPurpose,
}

/// Common-space pairs of a Google label. Entries or purposes without a
/// common counterpart drop out.
pub fn google_pairs(g: &GoogleLabel) -> BTreeSet<CommonPair> {
    let mut out = BTreeSet::new();
    for e in g.entries() {
        let Some(dt) = map_dss_datatype(e.datatype).and_then(CommonDatatype::new) else { continue };
        for &p in &e.purposes {
            if let Some(purpose) = map_dss_purpose(p) {
                out.insert(CommonPair { datatype: dt, purpose });
            }
        }
    }
    out
}

/// Common-space pairs of an Apple label. Tracking rows have no purpose and
/// contribute none.
pub fn apple_pairs(a: &AppleLabel) -> BTreeSet<CommonPair> {
    a.linked_entries
        .iter()
        .chain(&a.not_linked_entries)
        .filter_map(|e| {
            Some(CommonPair { datatype: CommonDatatype::new(e.datatype)?, purpose: map_apl_purpose(e.purpose)? })
        })
        .collect()
}

pub fn google_datatypes(g: &GoogleLabel) -> BTreeSet<CommonDatatype> {
    g.entries().filter_map(|e| map_dss_datatype(e.datatype).and_then(CommonDatatype::new)).collect()
}

/// Includes tracked datatypes.
pub fn apple_datatypes(a: &AppleLabel) -> BTreeSet<CommonDatatype> {
    let listed = a.linked_entries.iter().chain(&a.not_linked_entries).map(|e| e.datatype);
    listed
        .chain(a.tracked_entries.iter().map(|t| t.datatype))
        .filter_map(CommonDatatype::new)
        .collect()
}

/// Google label against Apple label for one cross-listed app.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossReport {
    pub google_app_id: String,
    pub apple_app_id: String,
    pub collection_mismatch: bool,
    pub datatype_findings: BTreeSet<CommonDatatype>,
    pub pair_findings: BTreeSet<CommonPair>,
    pub consistent: bool,
    pub google_pairs: BTreeSet<CommonPair>,
    pub apple_pairs: BTreeSet<CommonPair>,
}

/// Compares the two labels in the common space. Ids are left empty; see
/// [`check_cross`].
pub fn check_cross_pairs(g: &GoogleLabel, a: &AppleLabel) -> CrossReport {
    let gp = google_pairs(g);
    let ap = apple_pairs(a);
    let pair_findings: BTreeSet<_> = gp.symmetric_difference(&ap).copied().collect();
    let datatype_findings: BTreeSet<_> =
        google_datatypes(g).symmetric_difference(&apple_datatypes(a)).copied().collect();
    let collection_mismatch = check_cross_collection(g, a);
    CrossReport {
        google_app_id: String::new(),
        apple_app_id: String::new(),
        consistent: !collection_mismatch && pair_findings.is_empty() && datatype_findings.is_empty(),
        collection_mismatch,
        datatype_findings,
        pair_findings,
        google_pairs: gp,
        apple_pairs: ap,
    }
}

pub fn check_cross(m: &MatchResult, g: &GoogleLabel, a: &AppleLabel) -> CrossReport {
    CrossReport {
        google_app_id: m.google_app_id.clone(),
        apple_app_id: m.apple_app_id.clone(),
        ..check_cross_pairs(g, a)
    }
}

/// Nothing collected or shared, yet encryption in transit claimed.
pub fn flag_encrypt_without_collect(label: &GoogleLabel) -> bool {
    !label.has_data() && label.security.encrypted_in_transit == Some(true)
}

string_enum! {
    pub enum EncryptionPermission {
        None => "none",
        /// Network access without declared encryption.
        PermissionWithoutEncryption => "permission_without_encryption",
        /// Declared encryption with no network access.
        EncryptionWithoutPermission => "encryption_without_permission",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no network permission data for `{0}`")]
pub struct MissingPermissionData(pub String);

pub fn flag_encryption_permission_mismatch(
    rec: &AppRecord,
    label: &GoogleLabel,
) -> Result<EncryptionPermission, MissingPermissionData> {
    let permission = rec.requests_network_permission.ok_or_else(|| MissingPermissionData(rec.app_id.clone()))?;
    let encrypted = label.security.encrypted_in_transit == Some(true);
    Ok(match (permission, encrypted) {
        (true, false) => EncryptionPermission::PermissionWithoutEncryption,
        (false, true) => EncryptionPermission::EncryptionWithoutPermission,
        _ => EncryptionPermission::None,
    })
}
