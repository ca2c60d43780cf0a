use alloc::collections::BTreeMap;
use alloc::string::String;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{AppRecord, GoogleLabel, LabeledApp};

/// Sidecar file describing a snapshot's capture date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub captured_at: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotEntry {
    pub record: AppRecord,
    pub google_label: Option<GoogleLabel>,
}

/// The store listing as seen on one date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub captured_at: NaiveDate,
    pub entries: BTreeMap<String, SnapshotEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SnapshotError {
    #[error("app `{0}` appears twice in one snapshot")]
    DuplicateApp(String),
}

impl Snapshot {
    pub fn new(
        captured_at: NaiveDate,
        apps: impl IntoIterator<Item = LabeledApp>,
    ) -> Result<Snapshot, SnapshotError> {
        let mut entries = BTreeMap::new();
        for app in apps {
            let id = app.record.app_id.clone();
            let entry = SnapshotEntry { record: app.record, google_label: app.google_label };
            if entries.insert(id.clone(), entry).is_some() {
                return Err(SnapshotError::DuplicateApp(id));
            }
        }
        Ok(Snapshot { captured_at, entries })
    }
}
