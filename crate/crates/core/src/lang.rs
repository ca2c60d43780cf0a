//! Character n-gram language identification.
//!
//! Each profile holds 1- to 3-gram counts over lowercased letter runs padded
//! with one space per side. Scoring is multinomial naive Bayes with additive
//! smoothing, plus a background hypothesis that gives every n-gram the same
//! fixed probability. Text no profile explains well loses to the
//! background and comes out undetermined.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use once_cell::race::OnceBox;

pub const MAX_ORDER: usize = 3;
const ALPHA: f64 = 0.01;
/// Nominal n-gram space size per order, used by smoothing.
const SPACE: [f64; MAX_ORDER] = [1_000.0, 10_000.0, 100_000.0];
/// Background probability of any single n-gram, per order.
const BACKGROUND: [f64; MAX_ORDER] = [1.0 / 300.0, 1.0 / 5_000.0, 1.0 / 20_000.0];
/// Below this posterior the detector refuses to name a language.
pub const MIN_CONFIDENCE: f64 = 0.5;
pub const UNDETERMINED: &str = "und";

/// Bundled `(code, training text, profile)` triples.
pub const BUNDLED: &[(&str, &str, &str)] = &[
    ("de", include_str!("../data/lang/corpus/de.txt"), include_str!("../data/lang/profiles/de.txt")),
    ("en", include_str!("../data/lang/corpus/en.txt"), include_str!("../data/lang/profiles/en.txt")),
    ("es", include_str!("../data/lang/corpus/es.txt"), include_str!("../data/lang/profiles/es.txt")),
    ("fr", include_str!("../data/lang/corpus/fr.txt"), include_str!("../data/lang/profiles/fr.txt")),
    ("pt", include_str!("../data/lang/corpus/pt.txt"), include_str!("../data/lang/profiles/pt.txt")),
    ("zh", include_str!("../data/lang/corpus/zh.txt"), include_str!("../data/lang/profiles/zh.txt")),
];

/// Lowercased letter runs, each wrapped as `" run "`.
fn padded_runs(text: &str) -> Vec<String> {
    let mut runs = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            cur.extend(c.to_lowercase().filter(|l| l.is_alphabetic()));
        } else if !cur.is_empty() {
            runs.push(format!(" {cur} "));
            cur.clear();
        }
    }
    if !cur.is_empty() {
        runs.push(format!(" {cur} "));
    }
    runs
}

/// Calls `f(order, gram)` for every n-gram of the text, orders 1 to 3.
/// The lone space unigram is skipped.
fn for_each_gram(text: &str, mut f: impl FnMut(usize, &str)) {
    for run in padded_runs(text) {
        let idx: Vec<usize> = run.char_indices().map(|(i, _)| i).chain([run.len()]).collect();
        let chars = idx.len() - 1;
        for n in 1..=MAX_ORDER {
            if n > chars {
                break;
            }
            for s in 0..=chars - n {
                let g = &run[idx[s]..idx[s + n]];
                if n == 1 && g == " " {
                    continue;
                }
                f(n, g);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("profile line {0}: expected `<ngram>\\t<count>`")]
    Syntax(usize),
    #[error("profile has no `# lang:` header")]
    NoLanguage,
    #[error("profile n-gram `{0}` is not 1 to 3 characters")]
    Order(String),
}

/// n-gram counts for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    code: String,
    counts: [BTreeMap<String, u64>; MAX_ORDER],
    totals: [u64; MAX_ORDER],
}

impl LanguageProfile {
    pub fn train(code: &str, text: &str) -> LanguageProfile {
        let mut counts: [BTreeMap<String, u64>; MAX_ORDER] = Default::default();
        for_each_gram(text, |n, g| {
            *counts[n - 1].entry(g.to_string()).or_insert(0) += 1;
        });
        LanguageProfile::from_counts(code.to_string(), counts)
    }

    fn from_counts(code: String, counts: [BTreeMap<String, u64>; MAX_ORDER]) -> LanguageProfile {
        let mut totals = [0; MAX_ORDER];
        for (t, c) in totals.iter_mut().zip(&counts) {
            *t = c.values().sum();
        }
        LanguageProfile { code, counts, totals }
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    /// The on-disk form: a header, then `ngram<TAB>count` lines by order.
    pub fn to_text(&self) -> String {
        let mut out = format!("# lang: {}\n", self.code);
        for c in &self.counts {
            for (g, n) in c {
                out.push_str(g);
                out.push('\t');
                out.push_str(&n.to_string());
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<LanguageProfile, ProfileError> {
        let mut code = None;
        let mut counts: [BTreeMap<String, u64>; MAX_ORDER] = Default::default();
        for (i, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(c) = rest.trim().strip_prefix("lang:") {
                    code = Some(c.trim().to_string());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (g, n) = line.rsplit_once('\t').ok_or(ProfileError::Syntax(i + 1))?;
            let n: u64 = n.parse().map_err(|_| ProfileError::Syntax(i + 1))?;
            let order = g.chars().count();
            if !(1..=MAX_ORDER).contains(&order) {
                return Err(ProfileError::Order(g.to_string()));
            }
            counts[order - 1].insert(g.to_string(), n);
        }
        Ok(LanguageProfile::from_counts(code.ok_or(ProfileError::NoLanguage)?, counts))
    }

    fn log_prob(&self, order: usize, gram: &str) -> f64 {
        let c = self.counts[order - 1].get(gram).copied().unwrap_or(0) as f64;
        let k = order - 1;
        libm::log((c + ALPHA) / (self.totals[k] as f64 + ALPHA * SPACE[k]))
    }
}

/// A confident guess.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub code: String,
    pub confidence: f64,
}

/// No language reached [`MIN_CONFIDENCE`]. `best` is the leading profile.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("language undetermined (best guess {best:?}, confidence {confidence:.3})")]
pub struct Undetermined {
    pub best: Option<String>,
    pub confidence: f64,
}

#[derive(Debug, Clone)]
pub struct LanguageDetector {
    profiles: Vec<LanguageProfile>,
}

impl LanguageDetector {
    pub fn new(mut profiles: Vec<LanguageProfile>) -> Self {
        profiles.sort_by(|a, b| a.code.cmp(&b.code));
        LanguageDetector { profiles }
    }

    pub fn profiles(&self) -> &[LanguageProfile] {
        &self.profiles
    }

    /// Posterior over the profiles, in profile order, with the background
    /// hypothesis as the last element. Empty-evidence text gives the prior.
    pub fn posteriors(&self, text: &str) -> Vec<f64> {
        let k = self.profiles.len();
        let mut ll = alloc::vec![0.0f64; k + 1];
        for_each_gram(text, |n, g| {
            for (i, p) in self.profiles.iter().enumerate() {
                ll[i] += p.log_prob(n, g);
            }
            ll[k] += libm::log(BACKGROUND[n - 1]);
        });
        let max = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = ll.iter().map(|x| libm::exp(x - max)).collect();
        let z: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / z).collect()
    }

    pub fn detect(&self, text: &str) -> Result<Detection, Undetermined> {
        let post = self.posteriors(text);
        let best = post[..self.profiles.len()]
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |acc, (i, &p)| match acc {
                Some((_, bp)) if bp >= p => acc,
                _ => Some((i, p)),
            });
        match best {
            Some((i, p)) if p >= MIN_CONFIDENCE => {
                Ok(Detection { code: self.profiles[i].code.clone(), confidence: p })
            }
            Some((i, p)) => Err(Undetermined { best: Some(self.profiles[i].code.clone()), confidence: p }),
            None => Err(Undetermined { best: None, confidence: 0.0 }),
        }
    }
}

static DETECTOR: OnceBox<LanguageDetector> = OnceBox::new();

/// The detector over the bundled profiles.
pub fn bundled() -> &'static LanguageDetector {
    DETECTOR.get_or_init(|| {
        let profiles = BUNDLED
            .iter()
            .map(|(_, _, p)| LanguageProfile::parse(p).expect("bundled profiles are well-formed"))
            .collect();
        Box::new(LanguageDetector::new(profiles))
    })
}

/// Detects with the bundled profiles.
pub fn detect_language(text: &str) -> Result<Detection, Undetermined> {
    bundled().detect(text)
}
