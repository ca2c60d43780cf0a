//! Word counting, whitespace normalization, and phrase matching.

use alloc::string::String;
use alloc::vec::Vec;

/// Words are maximal runs of alphanumeric characters.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty())
}

pub fn word_count(text: &str) -> usize {
    words(text).count()
}

/// Collapses every whitespace run to one space and trims the ends.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for w in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

/// Paragraphs separated by blank lines, each whitespace-collapsed. Empty
/// paragraphs are dropped.
pub fn paragraphs(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(collapse_whitespace(&cur));
                cur.clear();
            }
        } else {
            cur.push_str(line);
            cur.push('\n');
        }
    }
    if !cur.trim().is_empty() {
        out.push(collapse_whitespace(&cur));
    }
    out
}

/// Normal form used for comparing texts: paragraphs joined by blank lines.
pub fn normalize(text: &str) -> String {
    paragraphs(text).join("\n\n")
}

/// Lowercases and maps every non-alphanumeric run to a single space, with
/// one space at each end, so `" " + phrase` finds matches at word starts.
pub fn fold(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push(' ');
    for c in text.chars() {
        if c.is_alphanumeric() {
            for l in c.to_lowercase().filter(|l| l.is_alphanumeric()) {
                out.push(l);
            }
        } else if !out.ends_with(' ') {
            out.push(' ');
        }
    }
    if !out.ends_with(' ') {
        out.push(' ');
    }
    out
}

/// A lexicon phrase in folded form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    needle: String,
}

impl Phrase {
    pub fn new(phrase: &str) -> Option<Phrase> {
        let f = fold(phrase);
        let core = f.trim_end();
        (core.len() > 1).then(|| Phrase { needle: String::from(core) })
    }

    /// Non-overlapping matches in folded text. Each match starts at a word
    /// and may end mid-word.
    pub fn count_in(&self, folded: &str) -> usize {
        folded.matches(self.needle.as_str()).count()
    }

    pub fn is_in(&self, folded: &str) -> bool {
        folded.contains(self.needle.as_str())
    }

    pub fn as_str(&self) -> &str {
        &self.needle[1..]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_words() {
        assert_eq!(word_count(""), 0);
        assert_eq!(word_count("We don't sell data."), 5);
        assert_eq!(word_count("  a\n\nb-c 42 "), 4);
        assert_eq!(word_count("数据 données"), 2);
    }

    #[test]
    fn paragraph_split() {
        let t = "one  two\nthree\n\n\n  \nfour\n";
        assert_eq!(paragraphs(t), ["one two three", "four"]);
        assert_eq!(normalize(t), "one two three\n\nfour");
        assert!(paragraphs(" \n\n ").is_empty());
    }

    #[test]
    fn folding() {
        assert_eq!(fold("We DON'T share, ever."), " we don t share ever ");
        assert_eq!(fold(""), " ");
    }

    #[test]
    fn phrase_matching() {
        let f = fold("Our third-party partners and Third Parties; unthird party.");
        let p = Phrase::new("third part").unwrap();
        assert_eq!(p.count_in(&f), 2);
        assert!(Phrase::new("advertis").unwrap().is_in(&fold("advertisers")));
        assert!(!Phrase::new("tls").unwrap().is_in(&fold("bottles")));
        assert!(Phrase::new(" - ").is_none());
    }
}
