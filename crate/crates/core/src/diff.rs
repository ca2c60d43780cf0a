//! Label changes between consecutive snapshots.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::model::{GoogleLabel, Snapshot};

string_enum! {
    pub enum PracticeChange {
        /// Nothing collected or shared before, something after.
        B => "B",
        /// Something collected or shared before, nothing after.
        C => "C",
        Other => "other",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Change {
    LabelAdded,
    /// The app is still listed but no longer shows a label.
    LabelRemoved,
    AppRemoved,
    PracticesChanged(PracticeChange),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiffEvent {
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub app_id: String,
    pub change: Change,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffReport {
    /// Sorted by `from`, then app id.
    pub events: Vec<DiffEvent>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn of_app<'a>(&'a self, app_id: &'a str) -> impl Iterator<Item = &'a DiffEvent> + 'a {
        self.events.iter().filter(move |e| e.app_id == app_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("snapshot {index} captured {at} does not follow {previous}")]
pub struct UnorderedSnapshots {
    pub index: usize,
    pub previous: NaiveDate,
    pub at: NaiveDate,
}

fn label_change(before: &GoogleLabel, after: &GoogleLabel) -> Option<PracticeChange> {
    match (before.has_data(), after.has_data()) {
        _ if before == after => None,
        (false, true) => Some(PracticeChange::B),
        (true, false) => Some(PracticeChange::C),
        _ => Some(PracticeChange::Other),
    }
}

/// Compares each snapshot with the next. Apps that first appear in a later
/// snapshot produce no event. Fewer than two snapshots give an empty report.
pub fn diff_snapshots(series: &[Snapshot]) -> Result<DiffReport, UnorderedSnapshots> {
    for (i, w) in series.windows(2).enumerate() {
        if w[1].captured_at <= w[0].captured_at {
            return Err(UnorderedSnapshots { index: i + 1, previous: w[0].captured_at, at: w[1].captured_at });
        }
    }
    let mut events = Vec::new();
    for w in series.windows(2) {
        let (t1, t2) = (&w[0], &w[1]);
        for (id, old) in &t1.entries {
            let change = match (t2.entries.get(id), &old.google_label) {
                (None, _) => Some(Change::AppRemoved),
                (Some(new), before) => match (before, &new.google_label) {
                    (None, None) => None,
                    (None, Some(_)) => Some(Change::LabelAdded),
                    (Some(_), None) => Some(Change::LabelRemoved),
                    (Some(b), Some(a)) => label_change(b, a).map(Change::PracticesChanged),
                },
            };
            if let Some(change) = change {
                events.push(DiffEvent { from: t1.captured_at, to: t2.captured_at, app_id: id.clone(), change });
            }
        }
    }
    events.sort();
    Ok(DiffReport { events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::model::{AgeRating, AppRecord, GoogleEntry, LabeledApp, Platform, PriceClass};
    use crate::taxonomy::{GoogleCategory, GoogleDatatype, GooglePurpose};

    fn app(id: &str, label: Option<GoogleLabel>) -> LabeledApp {
        LabeledApp {
            record: AppRecord {
                platform: Platform::Google,
                app_id: id.into(),
                name: id.into(),
                developer_name: String::new(),
                policy_url: None,
                developer_website: None,
                downloads: Some(10_000),
                price_class: PriceClass::Free,
                age_rating: AgeRating::Everyone,
                genre: String::new(),
                requests_network_permission: None,
            },
            apple_label: None,
            google_label: label,
        }
    }

    fn collects() -> GoogleLabel {
        GoogleLabel {
            collected: [GoogleEntry {
                category: GoogleCategory::Location,
                datatype: GoogleDatatype::PreciseLocation,
                purposes: [GooglePurpose::AppFunctionality].into_iter().collect(),
                optional_flag: false,
            }]
            .into_iter()
            .collect(),
            ..Default::default()
        }
    }

    fn snap(day: u32, apps: Vec<LabeledApp>) -> Snapshot {
        Snapshot::new(NaiveDate::from_ymd_opt(2022, 8, day).unwrap(), apps).unwrap()
    }

    #[test]
    fn identical_is_empty() {
        let a = || alloc::vec![app("x", Some(collects())), app("y", None)];
        assert!(diff_snapshots(&[snap(1, a()), snap(2, a())]).unwrap().is_empty());
    }

    #[test]
    fn each_change() {
        let s1 = snap(1, alloc::vec![
            app("removed", Some(collects())),
            app("gone", None),
            app("added", None),
            app("b", Some(GoogleLabel::default())),
            app("c", Some(collects())),
        ]);
        let mut other = collects();
        other.security.encrypted_in_transit = Some(true);
        let s2 = snap(2, alloc::vec![
            app("removed", None),
            app("added", Some(GoogleLabel::default())),
            app("b", Some(collects())),
            app("c", Some(GoogleLabel::default())),
            app("new", Some(collects())),
        ]);
        let s3 = snap(3, alloc::vec![app("b", Some(other))]);
        let r = diff_snapshots(&[s1, s2, s3]).unwrap();
        let got: Vec<_> = r.events.iter().map(|e| (e.from.format("%d").to_string(), e.app_id.as_str(), e.change)).collect();
        use Change::*;
        let d = |s: &str| String::from(s);
        assert_eq!(
            got,
            alloc::vec![
                (d("01"), "added", LabelAdded),
                (d("01"), "b", PracticesChanged(PracticeChange::B)),
                (d("01"), "c", PracticesChanged(PracticeChange::C)),
                (d("01"), "gone", AppRemoved),
                (d("01"), "removed", LabelRemoved),
                (d("02"), "added", AppRemoved),
                (d("02"), "b", PracticesChanged(PracticeChange::Other)),
                (d("02"), "c", AppRemoved),
                (d("02"), "new", AppRemoved),
                (d("02"), "removed", AppRemoved),
            ]
        );
    }

    #[test]
    fn rejects_unordered() {
        let e = diff_snapshots(&[snap(2, alloc::vec![]), snap(2, alloc::vec![])]).unwrap_err();
        assert_eq!(e.index, 1);
    }

    #[test]
    fn change_serializes_by_name() {
        let s = serde_json::to_string(&Change::PracticesChanged(PracticeChange::B)).unwrap();
        assert_eq!(s, r#"{"practices_changed":"B"}"#);
        assert_eq!(serde_json::to_string(&Change::LabelRemoved).unwrap(), r#""label_removed""#);
    }
}
