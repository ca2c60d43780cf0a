//! Canonical app records and snapshot files.

use std::fs;
use std::path::{Path, PathBuf};

use privlabel_core::model::{
    validate_apple_label, validate_google_label, AppRecord, LabeledApp, RawApp, RecordError, Snapshot,
    SnapshotError, SnapshotManifest, Violation,
};

use serde::Deserialize;

use crate::jsonl::{self, JsonlError};

/// Reads one canonical record. Unknown keys are ignored; labels are not
/// read.
pub fn parse_app_record(value: &serde_json::Value) -> Result<AppRecord, RecordError> {
    AppRecord::from_raw(raw(value)?)
}

/// Like [`parse_app_record`] but keeps the platform's label.
pub fn parse_labeled_app(value: &serde_json::Value) -> Result<LabeledApp, RecordError> {
    LabeledApp::from_raw(raw(value)?)
}

fn raw(value: &serde_json::Value) -> Result<RawApp, RecordError> {
    RawApp::deserialize(value).map_err(|e| RecordError::MalformedRecord(e.to_string()))
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error("{path}:{line}: {source}")]
    Record { path: PathBuf, line: usize, source: RecordError },
    #[error("{path}:{line}: {app_id}: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidLabel { path: PathBuf, line: usize, app_id: String, violations: Vec<Violation> },
    #[error("{path}: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Snapshot { path: PathBuf, source: SnapshotError },
}

impl IngestError {
    /// Whether the failure is in the data rather than the filesystem.
    pub fn is_data(&self) -> bool {
        !matches!(self, IngestError::Jsonl(JsonlError::Io { .. }))
    }
}

pub fn label_violations(app: &LabeledApp) -> Vec<Violation> {
    let mut v = Vec::new();
    if let Some(l) = &app.apple_label {
        v.extend(validate_apple_label(l));
    }
    if let Some(l) = &app.google_label {
        v.extend(validate_google_label(l));
    }
    v
}

/// Parses and validates every line. With `skip_invalid`, bad lines are
/// logged and dropped instead of failing the read.
pub fn read_apps(path: &Path, skip_invalid: bool) -> Result<Vec<LabeledApp>, IngestError> {
    let mut out = Vec::new();
    for (line, text) in jsonl::lines(path)? {
        let value: serde_json::Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(source) => {
                let e = IngestError::Jsonl(JsonlError::Parse { path: path.into(), line, source });
                if skip_invalid {
                    log::warn!("{e}");
                    continue;
                }
                return Err(e);
            }
        };
        let result = parse_labeled_app(&value)
            .map_err(|source| IngestError::Record { path: path.into(), line, source })
            .and_then(|app| {
                let violations = label_violations(&app);
                if violations.is_empty() {
                    Ok(app)
                } else {
                    Err(IngestError::InvalidLabel {
                        path: path.into(),
                        line,
                        app_id: app.record.app_id.clone(),
                        violations,
                    })
                }
            });
        match result {
            Ok(app) => out.push(app),
            Err(e) if skip_invalid => log::warn!("{e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `snap.jsonl` is described by `snap.manifest.json`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.manifest.json"))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, IngestError> {
    let mpath = manifest_path(path);
    let text = fs::read_to_string(&mpath).map_err(|e| JsonlError::io(&mpath, e))?;
    let manifest: SnapshotManifest =
        serde_json::from_str(&text).map_err(|source| IngestError::Manifest { path: mpath, source })?;
    let apps = read_apps(path, false)?;
    Snapshot::new(manifest.captured_at, apps).map_err(|source| IngestError::Snapshot { path: path.into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn zero_downloads() {
        let v = json!({"platform":"google","app_id":"com.x","name":"X","downloads":0,
            "price_class":"free","age_rating":"Everyone","extra":1});
        assert_eq!(parse_app_record(&v).unwrap().downloads, Some(0));
    }

    #[test]
    fn apple_downloads_rejected() {
        let v = json!({"platform":"apple","app_id":"123","downloads":5,"price_class":"free","age_rating":"4+"});
        assert!(matches!(parse_app_record(&v), Err(RecordError::MalformedRecord(_))));
    }

    #[test]
    fn missing_id_and_bad_enum() {
        let v = json!({"platform":"google","price_class":"free","age_rating":"Everyone"});
        assert!(matches!(parse_app_record(&v), Err(RecordError::MalformedRecord(_))));
        let v = json!({"platform":"google","app_id":"a","price_class":"cheap","age_rating":"Everyone"});
        assert!(matches!(parse_app_record(&v), Err(RecordError::InvalidEnum { field: "price_class", .. })));
        let v = json!({"platform":"google","app_id":"a","price_class":"free","age_rating":"4+"});
        assert!(matches!(parse_app_record(&v), Err(RecordError::InvalidEnum { field: "age_rating", .. })));
    }

    #[test]
    fn wrong_type_is_malformed() {
        let v = json!({"platform":"google","app_id":"a","downloads":"many","price_class":"free","age_rating":"Teen"});
        assert!(matches!(parse_app_record(&v), Err(RecordError::MalformedRecord(_))));
    }
}
