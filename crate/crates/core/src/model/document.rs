use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::taxonomy::Annotations;

/// A unit of policy text and its tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    pub text: String,
    #[serde(default)]
    pub annotations: Annotations,
}

impl Segment {
    pub fn word_count(&self) -> usize {
        crate::text::word_count(&self.text)
    }
}

/// A cleaned privacy policy. `language` is `"und"` when detection gave up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyDocument {
    pub source_url: String,
    pub language: String,
    pub language_confidence: f64,
    pub word_count: usize,
    pub segments: Vec<Segment>,
    pub is_policy: bool,
    pub policy_score: f64,
}

impl PolicyDocument {
    /// Segment texts joined by blank lines.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                out.push_str("\n\n");
            }
            out.push_str(&s.text);
        }
        out
    }
}
