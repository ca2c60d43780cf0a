//! Annotations and policy scores computed elsewhere, stored as JSONL.

use std::collections::HashMap;
use std::path::Path;

use privlabel_core::annotate::{AnnotatorBackend, BackendError, SegmentContext};
use privlabel_core::model::PolicyDocument;
use privlabel_core::taxonomy::{Annotations, Score, TagClass, TaxonomyTag};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::jsonl::{self, JsonlError};

/// One segment's tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRow {
    pub doc_url: String,
    pub segment_index: usize,
    pub tags: Vec<TaxonomyTag>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExternalError {
    #[error(transparent)]
    Io(JsonlError),
    #[error("{path}:{line}: malformed annotation row: {message}")]
    MalformedAnnotationFile { path: String, line: usize, message: String },
    #[error("{path}:{line}: unknown tag class `{class}`")]
    UnknownTagClass { path: String, line: usize, class: String },
    #[error("{path}:{line}: malformed score row: {message}")]
    MalformedScoreFile { path: String, line: usize, message: String },
}

#[derive(Deserialize)]
struct WireTag {
    class: String,
    score: f64,
}

#[derive(Deserialize)]
struct WireRow {
    doc_url: String,
    segment_index: usize,
    tags: Vec<WireTag>,
}

/// Replays tags from a file. Segments the file does not cover get no tags.
#[derive(Debug, Clone)]
pub struct FileBackend {
    version: String,
    rows: HashMap<(String, usize), Annotations>,
}

impl FileBackend {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

impl AnnotatorBackend for FileBackend {
    fn name(&self) -> &str {
        "file"
    }

    /// Digest of the file contents.
    fn version(&self) -> &str {
        &self.version
    }

    fn tag(&self, seg: &SegmentContext<'_>) -> Result<Annotations, BackendError> {
        match self.rows.get(&(seg.doc_url.to_string(), seg.index)) {
            Some(a) => Ok(a.clone()),
            None => {
                log::warn!("no stored annotations for {} segment {}", seg.doc_url, seg.index);
                Ok(Annotations::new())
            }
        }
    }
}

pub fn load_external_annotations(path: &Path) -> Result<FileBackend, ExternalError> {
    let bytes = std::fs::read(path).map_err(|e| ExternalError::Io(JsonlError::io(path, e)))?;
    let p = path.display().to_string();
    let malformed = |line, message: String| ExternalError::MalformedAnnotationFile { path: p.clone(), line, message };
    let mut rows: HashMap<(String, usize), Annotations> = HashMap::new();
    let text = String::from_utf8(bytes.clone()).map_err(|e| malformed(0, e.to_string()))?;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let line_no = i + 1;
        let row: WireRow = serde_json::from_str(line).map_err(|e| malformed(line_no, e.to_string()))?;
        let tags = rows.entry((row.doc_url, row.segment_index)).or_default();
        for t in row.tags {
            let class: TagClass = t
                .class
                .parse()
                .map_err(|_| ExternalError::UnknownTagClass { path: p.clone(), line: line_no, class: t.class.clone() })?;
            let score = Score::new(t.score).map_err(|e| malformed(line_no, e.to_string()))?;
            tags.insert(TaxonomyTag::new(class, score));
        }
    }
    let digest = Sha256::digest(&bytes);
    let version = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    Ok(FileBackend { version, rows })
}

/// Rows for every segment of every document, in document order.
pub fn export_annotations<'a>(docs: impl IntoIterator<Item = &'a PolicyDocument>) -> Vec<AnnotationRow> {
    docs.into_iter()
        .flat_map(|d| {
            d.segments.iter().map(|s| AnnotationRow {
                doc_url: d.source_url.clone(),
                segment_index: s.index,
                tags: s.annotations.iter().collect(),
            })
        })
        .collect()
}

pub fn write_annotations(path: &Path, rows: &[AnnotationRow]) -> Result<(), ExternalError> {
    jsonl::write(path, rows).map_err(ExternalError::Io)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub url: String,
    pub score: f64,
}

/// Per-document policy scores that replace the lexicon's.
pub fn load_scores(path: &Path) -> Result<HashMap<String, f64>, ExternalError> {
    let p = path.display().to_string();
    let mut out = HashMap::new();
    for (line, text) in jsonl::lines(path).map_err(ExternalError::Io)? {
        let bad = |message: String| ExternalError::MalformedScoreFile { path: p.clone(), line, message };
        let row: ScoreRow = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if !(0.0..=1.0).contains(&row.score) {
            return Err(bad(format!("score {} outside [0, 1]", row.score)));
        }
        out.insert(row.url, row.score);
    }
    Ok(out)
}
