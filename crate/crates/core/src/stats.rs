//! Corpus-level counts by stratum, and the cross-store heatmap.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::consistency::{
    flag_encrypt_without_collect, CommonPair, ConsistencyReport, CrossReport, Direction, Practice,
};
use crate::model::{AgeRating, AppRecord, LabeledApp, Platform, PriceClass};
use crate::taxonomy::{CommonDatatype, CommonPurpose};

/// Google apps below this many downloads are left out of the corpus.
pub const MIN_DOWNLOADS: u64 = 1000;

string_enum! {
    pub enum Popularity {
        /// At most 10K downloads.
        Low => "low",
        /// Above 10K, at most 1M.
        Semi => "semi",
        /// Above 1M.
        Extreme => "extreme",
    }
}

pub fn popularity_bucket(downloads: u64) -> Popularity {
    match downloads {
        d if d > 1_000_000 => Popularity::Extreme,
        d if d > 10_000 => Popularity::Semi,
        _ => Popularity::Low,
    }
}

/// Apple records always pass. Google records need a known download count
/// of at least [`MIN_DOWNLOADS`].
pub fn passes_download_filter(r: &AppRecord) -> bool {
    r.platform == Platform::Apple || r.downloads.is_some_and(|d| d >= MIN_DOWNLOADS)
}

pub fn apply_download_filter<T: AsRef<AppRecord>>(records: impl IntoIterator<Item = T>) -> Vec<T> {
    records.into_iter().filter(|r| passes_download_filter(r.as_ref())).collect()
}

/// A ratio that keeps its parts. `value` is `None` when nothing was counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub numerator: u64,
    pub denominator: u64,
    pub value: Option<f64>,
}

impl Fraction {
    pub fn new(numerator: u64, denominator: u64) -> Fraction {
        let value = (denominator > 0).then(|| numerator as f64 / denominator as f64);
        Fraction { numerator, denominator, value }
    }

    fn count(&mut self, hit: bool) {
        *self = Fraction::new(self.numerator + u64::from(hit), self.denominator + 1);
    }
}

/// One slice of the corpus, such as `price_class = paid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub dimension: String,
    pub value: String,
    pub apps: u64,
    pub labeled: u64,
    /// `label_coverage` is over all apps in the stratum. `collects` is over
    /// labeled apps, `google.*` and `apple.*` over labeled apps of that
    /// store, and `policy.*` over apps of that store with a policy report.
    pub metrics: BTreeMap<String, Fraction>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossStats {
    pub pairs: u64,
    pub inconsistent: Fraction,
    pub collection_mismatch: Fraction,
    pub datatype_inconsistent: Fraction,
    pub pair_inconsistent: Fraction,
}

/// `total` counts cross-listed apps whose labels carry the pair on either
/// store, `inconsistent` those where only one store does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatmapCell {
    pub datatype: CommonDatatype,
    pub purpose: CommonPurpose,
    pub inconsistent: u64,
    pub total: u64,
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub strata: Vec<Stratum>,
    pub cross: CrossStats,
    /// Datatype-major, both axes in ascending order.
    pub heatmap: Vec<HeatmapCell>,
}

const GOOGLE_METRICS: [&str; 5] =
    ["shares", "encrypted_in_transit", "deletion_option", "no_security_info", "encrypt_without_collect"];
const APPLE_METRICS: [&str; 4] = ["tracks", "linked", "not_linked", "not_collected"];

/// High-level findings reported per store.
pub const POLICY_FINDINGS: [(Platform, Practice, Direction); 14] = {
    use Direction::*;
    use Platform::*;
    use Practice::*;
    [
        (Google, DataCollection, InLabel),
        (Google, DataCollection, InPolicy),
        (Google, DataSharing, InLabel),
        (Google, DataSharing, InPolicy),
        (Google, EncryptionInTransit, InLabel),
        (Google, EncryptionInTransit, InPolicy),
        (Google, DataDeletionOption, InLabel),
        (Google, DataDeletionOption, InPolicy),
        (Apple, DataLinkedToYou, InLabel),
        (Apple, DataLinkedToYou, InPolicy),
        (Apple, DataUsedToTrackYou, InLabel),
        (Apple, DataUsedToTrackYou, InPolicy),
        (Apple, DataNotLinkedToYou, InPolicy),
        (Apple, DataNotCollected, InPolicy),
    ]
};

fn metric_names() -> Vec<String> {
    let mut names = alloc::vec![String::from("label_coverage"), String::from("collects")];
    names.extend(GOOGLE_METRICS.iter().map(|m| format!("google.{m}")));
    names.extend(APPLE_METRICS.iter().map(|m| format!("apple.{m}")));
    for (p, practice, dir) in POLICY_FINDINGS {
        names.push(format!("policy.{p}.{practice}.{dir}"));
    }
    for p in [Platform::Google, Platform::Apple] {
        for d in Direction::ALL {
            names.push(format!("policy.{p}.any.{d}"));
        }
    }
    names
}

/// Every stratum in output order.
pub fn strata_keys() -> Vec<(&'static str, &'static str)> {
    let mut keys = alloc::vec![("all", "all")];
    keys.extend(Platform::ALL.iter().map(|p| ("platform", p.as_str())));
    keys.extend(Popularity::ALL.iter().map(|p| ("popularity", p.as_str())));
    keys.extend(AgeRating::ALL.iter().filter(|a| a.aggregated()).map(|a| ("age_rating", a.as_str())));
    keys.extend(PriceClass::ALL.iter().map(|p| ("price_class", p.as_str())));
    keys
}

/// The strata an app belongs to. Apps without a download count have no
/// popularity stratum.
pub fn strata_of(r: &AppRecord) -> Vec<(&'static str, &'static str)> {
    let mut keys = alloc::vec![("all", "all"), ("platform", r.platform.as_str())];
    if let Some(d) = r.downloads {
        keys.push(("popularity", popularity_bucket(d).as_str()));
    }
    if r.age_rating.aggregated() {
        keys.push(("age_rating", r.age_rating.as_str()));
    }
    keys.push(("price_class", r.price_class.as_str()));
    keys
}

fn observe(s: &mut Stratum, app: &LabeledApp, report: Option<&ConsistencyReport>) {
    let mut count = |name: &str, hit: bool| {
        if let Some(f) = s.metrics.get_mut(name) {
            f.count(hit);
        }
    };
    count("label_coverage", app.has_label());
    if let Some(g) = &app.google_label {
        count("collects", g.has_data());
        count("google.shares", !g.shared.is_empty());
        count("google.encrypted_in_transit", g.security.encrypted_in_transit == Some(true));
        count("google.deletion_option", g.security.data_deletion_option == Some(true));
        count("google.no_security_info", g.security.is_unstated());
        count("google.encrypt_without_collect", flag_encrypt_without_collect(g));
    }
    if let Some(a) = &app.apple_label {
        count("collects", a.collects());
        count("apple.tracks", a.tracks());
        count("apple.linked", a.asserts_linked());
        count("apple.not_linked", a.asserts_not_linked());
        count("apple.not_collected", !a.collects());
    }
    if let Some(r) = report {
        let p = r.platform;
        for (platform, practice, dir) in POLICY_FINDINGS.iter().filter(|(q, ..)| *q == p) {
            count(&format!("policy.{platform}.{practice}.{dir}"), r.has(*practice, *dir));
        }
        for d in Direction::ALL {
            count(&format!("policy.{p}.any.{d}"), r.findings.iter().any(|f| f.direction == *d));
        }
    }
    s.apps += 1;
    s.labeled += u64::from(app.has_label());
}

/// Counts every stratum and the heatmap in one pass over each input. Policy
/// reports join apps on platform and app id.
pub fn aggregate(apps: &[LabeledApp], policy: &[ConsistencyReport], cross: &[CrossReport]) -> AggregateStats {
    let names = metric_names();
    let keys = strata_keys();
    let mut strata: Vec<Stratum> = keys
        .iter()
        .map(|(d, v)| Stratum {
            dimension: (*d).into(),
            value: (*v).into(),
            apps: 0,
            labeled: 0,
            metrics: names.iter().map(|n| (n.clone(), Fraction::new(0, 0))).collect(),
        })
        .collect();
    let index: BTreeMap<_, _> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let reports: BTreeMap<(Platform, &str), &ConsistencyReport> =
        policy.iter().map(|r| ((r.platform, r.app_id.as_str()), r)).collect();

    for app in apps {
        let report = reports.get(&(app.record.platform, app.record.app_id.as_str())).copied();
        for k in strata_of(&app.record) {
            observe(&mut strata[index[&k]], app, report);
        }
    }

    let mut cs = CrossStats::default();
    let mut cells: BTreeMap<CommonPair, (u64, u64)> = BTreeMap::new();
    for r in cross {
        cs.pairs += 1;
        cs.inconsistent.count(!r.consistent);
        cs.collection_mismatch.count(r.collection_mismatch);
        cs.datatype_inconsistent.count(!r.datatype_findings.is_empty());
        cs.pair_inconsistent.count(!r.pair_findings.is_empty());
        for p in r.google_pairs.union(&r.apple_pairs) {
            let c = cells.entry(*p).or_default();
            c.1 += 1;
            c.0 += u64::from(r.pair_findings.contains(p));
        }
    }
    let mut heatmap = Vec::new();
    for datatype in CommonDatatype::all() {
        for &purpose in CommonPurpose::ALL {
            let (inconsistent, total) = cells.get(&CommonPair { datatype, purpose }).copied().unwrap_or_default();
            heatmap.push(HeatmapCell {
                datatype,
                purpose,
                inconsistent,
                total,
                rate: Fraction::new(inconsistent, total).value,
            });
        }
    }
    AggregateStats { strata, cross: cs, heatmap }
}

impl AggregateStats {
    pub fn stratum(&self, dimension: &str, value: &str) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.dimension == dimension && s.value == value)
    }

    pub fn cell(&self, datatype: CommonDatatype, purpose: CommonPurpose) -> Option<&HeatmapCell> {
        self.heatmap.iter().find(|c| c.datatype == datatype && c.purpose == purpose)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GoogleEntry, GoogleLabel};
    use crate::taxonomy::{GoogleCategory, GoogleDatatype, GooglePurpose};

    fn google(id: &str, downloads: u64, label: Option<GoogleLabel>) -> LabeledApp {
        LabeledApp {
            record: AppRecord {
                platform: Platform::Google,
                app_id: id.into(),
                name: id.into(),
                developer_name: String::new(),
                policy_url: None,
                developer_website: None,
                downloads: Some(downloads),
                price_class: PriceClass::Free,
                age_rating: AgeRating::Teen,
                genre: String::new(),
                requests_network_permission: None,
            },
            apple_label: None,
            google_label: label,
        }
    }

    fn collecting() -> GoogleLabel {
        GoogleLabel {
            collected: [GoogleEntry {
                category: GoogleCategory::Contacts,
                datatype: GoogleDatatype::Contacts,
                purposes: [GooglePurpose::Analytics].into_iter().collect(),
                optional_flag: false,
            }]
            .into_iter()
            .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn buckets() {
        assert_eq!(popularity_bucket(0), Popularity::Low);
        assert_eq!(popularity_bucket(10_000), Popularity::Low);
        assert_eq!(popularity_bucket(10_001), Popularity::Semi);
        assert_eq!(popularity_bucket(1_000_000), Popularity::Semi);
        assert_eq!(popularity_bucket(2_000_000), Popularity::Extreme);
    }

    #[test]
    fn download_filter() {
        let kept = apply_download_filter([google("a", 999, None), google("b", 1000, None)]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].record.app_id, "b");
        let mut no_count = google("c", 0, None);
        no_count.record.downloads = None;
        assert!(!passes_download_filter(&no_count.record));
    }

    #[test]
    fn ten_apps_five_labeled_two_collect() {
        let mut apps = Vec::new();
        for i in 0..10 {
            let label = match i {
                0 | 1 => Some(collecting()),
                2..=4 => Some(GoogleLabel::default()),
                _ => None,
            };
            apps.push(google(&format!("app{i}"), 5000, label));
        }
        let s = aggregate(&apps, &[], &[]);
        let all = s.stratum("all", "all").unwrap();
        assert_eq!(all.metrics["label_coverage"], Fraction::new(5, 10));
        assert_eq!(all.metrics["collects"].value, Some(0.4));
    }

    #[test]
    fn empty_corpus_is_all_null() {
        let s = aggregate(&[], &[], &[]);
        for st in &s.strata {
            assert!(st.metrics.values().all(|f| f.denominator == 0 && f.value.is_none()));
        }
        assert_eq!(s.heatmap.len(), 26 * 4);
        assert!(s.heatmap.iter().all(|c| c.total == 0 && c.rate.is_none()));
        assert_eq!(s.cross.inconsistent.value, None);
    }
}
