//! Cleaning, gating, segmentation, and the baseline is-policy scorer.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lang::{LanguageDetector, UNDETERMINED};
use crate::model::{PolicyDocument, Segment};
use crate::taxonomy::Annotations;
use crate::text::{self, Phrase};

pub const DEFAULT_MIN_WORDS: usize = 100;
pub const DEFAULT_MERGE_FLOOR: usize = 20;

const POLICY_LEXICON: &str = include_str!("../data/policy_lexicon.txt");

/// Splits on blank lines and merges consecutive paragraphs until each
/// segment reaches `merge_floor` words. A short tail joins the segment
/// before it. Joining the texts with blank lines gives [`text::normalize`].
pub fn segment_policy(text: &str, merge_floor: usize) -> Vec<Segment> {
    let mut out: Vec<String> = Vec::new();
    let mut cur = String::new();
    let mut words = 0;
    for p in text::paragraphs(text) {
        if !cur.is_empty() {
            cur.push_str("\n\n");
        }
        words += text::word_count(&p);
        cur.push_str(&p);
        if words >= merge_floor {
            out.push(core::mem::take(&mut cur));
            words = 0;
        }
    }
    if !cur.is_empty() {
        match out.last_mut() {
            Some(last) if words < merge_floor => {
                last.push_str("\n\n");
                last.push_str(&cur);
            }
            _ => out.push(cur),
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(index, text)| Segment { index, text, annotations: Annotations::new() })
        .collect()
}

string_enum! {
    pub enum RejectReason {
        TooShort => "too_short",
        NonEnglish => "non_english",
        UnsupportedFormat => "unsupported_format",
    }
}

/// Why a document left the pipeline, with what was measured before it did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub source_url: String,
    pub reason: RejectReason,
    pub word_count: usize,
    pub language: String,
    pub language_confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub min_words: usize,
    pub merge_floor: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { min_words: DEFAULT_MIN_WORDS, merge_floor: DEFAULT_MERGE_FLOOR }
    }
}

/// Gates extracted text on length and language, then segments and scores
/// it. Language is detected first so rejections still carry it.
pub fn clean_and_filter(
    source_url: &str,
    raw: &str,
    config: &PipelineConfig,
    detector: &LanguageDetector,
    scorer: &PolicyLexicon,
) -> Result<PolicyDocument, Rejection> {
    let normalized = text::normalize(raw);
    let word_count = text::word_count(&normalized);
    let (language, language_confidence) = match detector.detect(&normalized) {
        Ok(d) => (d.code, d.confidence),
        Err(u) => (UNDETERMINED.to_string(), u.confidence),
    };
    let reject = |reason, language: String| Rejection {
        source_url: source_url.to_string(),
        reason,
        word_count,
        language,
        language_confidence,
    };
    if word_count < config.min_words {
        return Err(reject(RejectReason::TooShort, language));
    }
    if language != "en" {
        return Err(reject(RejectReason::NonEnglish, language));
    }
    let segments = segment_policy(&normalized, config.merge_floor);
    let policy_score = scorer.score(&normalized);
    Ok(PolicyDocument {
        source_url: source_url.to_string(),
        language,
        language_confidence,
        word_count,
        segments,
        is_policy: policy_score >= scorer.threshold,
        policy_score,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("lexicon line {0}: expected `<weight> <phrase>`")]
    Entry(usize),
    #[error("lexicon line {0}: bad directive")]
    Directive(usize),
    #[error("lexicon has no entries")]
    Empty,
}

/// Weighted phrases for the keyword is-policy baseline.
///
/// `score = coverage * min(1, density / saturation)`, where coverage is the
/// weight share of distinct phrases present and density is weighted hits per
/// 100 words.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyLexicon {
    entries: Vec<(Phrase, f64)>,
    pub saturation: f64,
    pub threshold: f64,
}

impl PolicyLexicon {
    pub fn parse(src: &str) -> Result<PolicyLexicon, LexiconError> {
        let mut lex = PolicyLexicon { entries: Vec::new(), saturation: 2.0, threshold: 0.5 };
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(d) = line.strip_prefix('@') {
                let (key, val) = d.split_once(' ').ok_or(LexiconError::Directive(i + 1))?;
                let val: f64 = val.trim().parse().map_err(|_| LexiconError::Directive(i + 1))?;
                match key {
                    "saturation" if val > 0.0 => lex.saturation = val,
                    "threshold" if (0.0..=1.0).contains(&val) => lex.threshold = val,
                    _ => return Err(LexiconError::Directive(i + 1)),
                }
                continue;
            }
            let (w, phrase) = line.split_once(' ').ok_or(LexiconError::Entry(i + 1))?;
            let w: f64 = w.parse().map_err(|_| LexiconError::Entry(i + 1))?;
            let p = Phrase::new(phrase).ok_or(LexiconError::Entry(i + 1))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(LexiconError::Entry(i + 1));
            }
            lex.entries.push((p, w));
        }
        if lex.entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        Ok(lex)
    }

    pub fn bundled() -> PolicyLexicon {
        PolicyLexicon::parse(POLICY_LEXICON).expect("bundled lexicon is well-formed")
    }

    pub fn score(&self, text: &str) -> f64 {
        let words = text::word_count(text);
        if words == 0 {
            return 0.0;
        }
        let folded = text::fold(text);
        let total: f64 = self.entries.iter().map(|(_, w)| w).sum();
        let mut seen = 0.0;
        let mut hits = 0.0;
        for (p, w) in &self.entries {
            let n = p.count_in(&folded);
            if n > 0 {
                seen += w;
                hits += w * n as f64;
            }
        }
        let density = hits * 100.0 / words as f64;
        let s = (seen / total) * (density / self.saturation).min(1.0);
        s.clamp(0.0, 1.0)
    }

    /// Baseline verdict for a cleaned document.
    pub fn is_policy(&self, doc: &PolicyDocument) -> (bool, f64) {
        let s = self.score(&doc.text());
        (s >= self.threshold, s)
    }
}
