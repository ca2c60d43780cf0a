//! Apps, labels, snapshots, and policy documents.

mod app;
mod document;
mod label;
mod snapshot;

pub use app::{AgeRating, AppRecord, LabeledApp, Platform, PriceClass, RawApp, RecordError};
pub use document::{PolicyDocument, Segment};
pub use label::{
    validate_apple_label, validate_google_label, AppleEntry, AppleLabel, GoogleEntry, GoogleLabel,
    Rule, SecurityPractices, TrackedEntry, Violation,
};
pub use snapshot::{Snapshot, SnapshotEntry, SnapshotError, SnapshotManifest};
