//! Segment tagging backends and practice extraction.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::PolicyDocument;
use crate::taxonomy::{
    Annotations, DataCategory, Identifiability, Polarity, Purpose, TagClass, TaxonomyTag,
};
use crate::text::{self, Phrase};

const ANNOTATION_LEXICON: &str = include_str!("../data/annotation_lexicon.txt");

/// What a backend sees of one segment.
#[derive(Debug, Clone, Copy)]
pub struct SegmentContext<'a> {
    pub doc_url: &'a str,
    pub index: usize,
    pub text: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct BackendError(pub String);

/// A segment classifier. Equal input must give equal output for a fixed
/// name and version.
pub trait AnnotatorBackend: Send + Sync {
    fn name(&self) -> &str;
    fn version(&self) -> &str;
    fn tag(&self, segment: &SegmentContext<'_>) -> Result<Annotations, BackendError>;
}

/// Tags nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullBackend;

impl AnnotatorBackend for NullBackend {
    fn name(&self) -> &str {
        "null"
    }

    fn version(&self) -> &str {
        "1"
    }

    fn tag(&self, _: &SegmentContext<'_>) -> Result<Annotations, BackendError> {
        Ok(Annotations::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KeywordLexiconError {
    #[error("annotation lexicon line {0}: expected `<class>: phrase | phrase`")]
    Syntax(usize),
    #[error("annotation lexicon line {line}: {source}")]
    Class {
        line: usize,
        #[source]
        source: crate::error::UnknownName,
    },
}

/// Rule-based tagger: a class fires when any of its phrases occurs.
#[derive(Debug, Clone)]
pub struct KeywordBackend {
    rules: Vec<(TagClass, Vec<Phrase>)>,
    version: String,
}

impl KeywordBackend {
    pub fn parse(src: &str, version: &str) -> Result<KeywordBackend, KeywordLexiconError> {
        let mut rules: Vec<(TagClass, Vec<Phrase>)> = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            // class names contain no ':' but phrases might
            let (class, phrases) = line.split_once(':').ok_or(KeywordLexiconError::Syntax(i + 1))?;
            let class: TagClass = class
                .parse()
                .map_err(|source| KeywordLexiconError::Class { line: i + 1, source })?;
            let phrases: Vec<Phrase> = phrases.split('|').filter_map(Phrase::new).collect();
            if phrases.is_empty() {
                return Err(KeywordLexiconError::Syntax(i + 1));
            }
            match rules.iter_mut().find(|(c, _)| *c == class) {
                Some((_, ps)) => ps.extend(phrases),
                None => rules.push((class, phrases)),
            }
        }
        rules.sort_by_key(|(c, _)| *c);
        Ok(KeywordBackend { rules, version: version.to_string() })
    }

    pub fn bundled() -> KeywordBackend {
        KeywordBackend::parse(ANNOTATION_LEXICON, env!("CARGO_PKG_VERSION"))
            .expect("bundled annotation lexicon is well-formed")
    }

    pub fn tag_text(&self, text: &str) -> Annotations {
        let folded = text::fold(text);
        self.rules
            .iter()
            .filter(|(_, ps)| ps.iter().any(|p| p.is_in(&folded)))
            .map(|(c, _)| TaxonomyTag::certain(*c))
            .collect()
    }
}

impl AnnotatorBackend for KeywordBackend {
    fn name(&self) -> &str {
        "keyword"
    }

    fn version(&self) -> &str {
        &self.version
    }

    fn tag(&self, segment: &SegmentContext<'_>) -> Result<Annotations, BackendError> {
        Ok(self.tag_text(segment.text))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnnotateError {
    #[error("backend {backend} {version} failed on segment {segment}: {message}")]
    BackendFailure { backend: String, version: String, segment: usize, message: String },
}

/// Replaces every segment's tags with the backend's.
pub fn annotate(
    doc: &PolicyDocument,
    backend: &dyn AnnotatorBackend,
) -> Result<PolicyDocument, AnnotateError> {
    let mut out = doc.clone();
    for seg in &mut out.segments {
        let ctx = SegmentContext { doc_url: &doc.source_url, index: seg.index, text: &seg.text };
        seg.annotations = backend.tag(&ctx).map_err(|e| AnnotateError::BackendFailure {
            backend: backend.name().to_string(),
            version: backend.version().to_string(),
            segment: seg.index,
            message: e.0,
        })?;
    }
    Ok(out)
}

/// Practices a policy states, at the granularity labels can be checked.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PracticeSet {
    pub data_collection: BTreeSet<DataCategory>,
    pub data_sharing: BTreeSet<DataCategory>,
    pub linked: BTreeSet<DataCategory>,
    pub not_linked: BTreeSet<DataCategory>,
    pub encryption_in_transit: bool,
    pub data_deletion_option: bool,
    pub tracking_evidence: bool,
    #[serde(default)]
    pub purposes: BTreeSet<Purpose>,
}

impl PracticeSet {
    pub fn is_empty(&self) -> bool {
        *self == PracticeSet::default()
    }
}

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// A practice holds when at least one segment supports it. Segments tagged
/// `DoesDoesNot(does_not)` support nothing. Tags below `threshold` are
/// ignored.
pub fn extract_practices(doc: &PolicyDocument, threshold: f64) -> PracticeSet {
    let mut p = PracticeSet::default();
    for seg in &doc.segments {
        let a = &seg.annotations;
        let has = |c: TagClass| a.has(c, threshold);
        if has(TagClass::DoesDoesNot(Polarity::DoesNot)) {
            continue;
        }
        let first = has(TagClass::FirstPartyCollectionShare);
        let third = has(TagClass::ThirdPartySharingCollection);
        let party = first || third;
        let ident = has(TagClass::Identifiability(Identifiability::Identifiable));
        let anon = has(TagClass::Identifiability(Identifiability::Anonymous));
        for tag in a.iter().filter(|t| t.score.get() >= threshold) {
            match tag.class {
                TagClass::DataCategory(c) => {
                    if first {
                        p.data_collection.insert(c);
                    }
                    if third {
                        p.data_sharing.insert(c);
                    }
                    if party && ident {
                        p.linked.insert(c);
                    }
                    if party && anon {
                        p.not_linked.insert(c);
                    }
                }
                TagClass::Purpose(pu) => {
                    p.purposes.insert(pu);
                }
                _ => {}
            }
        }
        p.encryption_in_transit |= has(TagClass::EncryptionInTransit);
        p.data_deletion_option |= has(TagClass::DataDeletionOption);
        p.tracking_evidence |= third && has(TagClass::Purpose(Purpose::AdvertisingOrMarketing));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Segment;
    use crate::taxonomy::Score;

    fn doc(segs: &[&[TagClass]]) -> PolicyDocument {
        PolicyDocument {
            source_url: "https://example.com/privacy".into(),
            language: "en".into(),
            language_confidence: 1.0,
            word_count: 0,
            segments: segs
                .iter()
                .enumerate()
                .map(|(index, tags)| Segment {
                    index,
                    text: "x".into(),
                    annotations: tags.iter().map(|c| TaxonomyTag::certain(*c)).collect(),
                })
                .collect(),
            is_policy: true,
            policy_score: 1.0,
        }
    }

    use TagClass as T;
    const LOC: TagClass = T::DataCategory(DataCategory::Location);
    const CONTACTS: TagClass = T::DataCategory(DataCategory::Contacts);
    const IDENT: TagClass = T::Identifiability(Identifiability::Identifiable);
    const NOT: TagClass = T::DoesDoesNot(Polarity::DoesNot);

    #[test]
    fn no_tags_no_practices() {
        let p = extract_practices(&doc(&[&[], &[]]), 0.5);
        assert!(p.is_empty());
    }

    #[test]
    fn first_party_identifiable() {
        let p = extract_practices(&doc(&[&[LOC, T::FirstPartyCollectionShare, IDENT]]), 0.5);
        assert_eq!(p.data_collection, [DataCategory::Location].into_iter().collect());
        assert_eq!(p.linked, [DataCategory::Location].into_iter().collect());
        assert!(p.data_sharing.is_empty() && p.not_linked.is_empty());
    }

    #[test]
    fn negation_suppresses_segment() {
        let p = extract_practices(&doc(&[&[CONTACTS, T::ThirdPartySharingCollection, NOT]]), 0.5);
        assert!(p.data_sharing.is_empty());
        assert!(p.is_empty());
    }

    #[test]
    fn categories_do_not_cross_segments() {
        let p = extract_practices(&doc(&[&[LOC], &[T::FirstPartyCollectionShare]]), 0.5);
        assert!(p.data_collection.is_empty());
    }

    #[test]
    fn tracking_needs_third_party_advertising() {
        let adv = T::Purpose(Purpose::AdvertisingOrMarketing);
        assert!(!extract_practices(&doc(&[&[adv]]), 0.5).tracking_evidence);
        assert!(!extract_practices(&doc(&[&[adv, T::FirstPartyCollectionShare]]), 0.5).tracking_evidence);
        assert!(extract_practices(&doc(&[&[adv, T::ThirdPartySharingCollection]]), 0.5).tracking_evidence);
    }

    #[test]
    fn threshold_filters_tags() {
        let mut d = doc(&[&[]]);
        d.segments[0].annotations = [
            TaxonomyTag::new(T::EncryptionInTransit, Score::new(0.49).unwrap()),
            TaxonomyTag::new(T::DataDeletionOption, Score::new(0.5).unwrap()),
        ]
        .into_iter()
        .collect();
        let p = extract_practices(&d, 0.5);
        assert!(!p.encryption_in_transit);
        assert!(p.data_deletion_option);
    }

    #[test]
    fn keyword_backend_example() {
        let kb = KeywordBackend::bundled();
        let tags = kb.tag_text("We share your location with advertisers");
        assert!(tags.score(T::ThirdPartySharingCollection).is_some());
        assert!(tags.score(LOC).is_some());
        assert!(tags.iter().all(|t| t.score == Score::ONE));
        assert_eq!(kb.tag_text("We share your location with advertisers"), tags);
    }

    #[test]
    fn keyword_lexicon_covers_every_class_but_affirmation() {
        let kb = KeywordBackend::bundled();
        let covered: Vec<TagClass> = kb.rules.iter().map(|(c, _)| *c).collect();
        for c in TagClass::all() {
            if c != T::DoesDoesNot(Polarity::Does) {
                assert!(covered.contains(&c), "{c}");
            }
        }
    }

    #[test]
    fn keyword_lexicon_errors() {
        assert!(matches!(KeywordBackend::parse("Foo: bar", "t"), Err(KeywordLexiconError::Class { line: 1, .. })));
        assert!(matches!(KeywordBackend::parse("no colon", "t"), Err(KeywordLexiconError::Syntax(1))));
        assert!(matches!(KeywordBackend::parse("EncryptionInTransit: | ", "t"), Err(KeywordLexiconError::Syntax(1))));
    }

    #[test]
    fn annotate_replaces_tags() {
        let mut d = doc(&[&[LOC]]);
        d.segments[0].text = "We use TLS.".into();
        let out = annotate(&d, &NullBackend).unwrap();
        assert!(out.segments[0].annotations.is_empty());
        let out = annotate(&d, &KeywordBackend::bundled()).unwrap();
        let classes: Vec<TagClass> = out.segments[0].annotations.classes().collect();
        assert_eq!(classes, [T::EncryptionInTransit]);
    }

    struct Failing;
    impl AnnotatorBackend for Failing {
        fn name(&self) -> &str {
            "failing"
        }
        fn version(&self) -> &str {
            "0"
        }
        fn tag(&self, s: &SegmentContext<'_>) -> Result<Annotations, BackendError> {
            if s.index == 1 { Err(BackendError("boom".into())) } else { Ok(Annotations::new()) }
        }
    }

    #[test]
    fn backend_failure_names_backend_and_segment() {
        let err = annotate(&doc(&[&[], &[]]), &Failing).unwrap_err();
        assert_eq!(
            err,
            AnnotateError::BackendFailure {
                backend: "failing".into(),
                version: "0".into(),
                segment: 1,
                message: "boom".into()
            }
        );
    }
}
