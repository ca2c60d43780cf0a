//! Registrable domains and URL normalization.
//!
//! The bundled public suffix list is a snapshot whose newest entries date
//! from March 2021. Both its ICANN and private sections are used.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use once_cell::race::OnceBox;
use url::{Host, Url};

const PUBLIC_SUFFIX_LIST: &str = include_str!("../data/public_suffix_list.dat");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("`{0}` is not a URL")]
    InvalidUrl(String),
    #[error("`{0}` has no host")]
    NoHost(String),
    #[error("`{0}` is itself a public suffix")]
    PublicSuffix(String),
}

/// Public suffix rules, split by kind. IDN rules are stored in ASCII form.
#[derive(Debug, Clone, Default)]
pub struct SuffixList {
    rules: BTreeSet<String>,
    wildcards: BTreeSet<String>,
    exceptions: BTreeSet<String>,
}

fn ascii(rule: &str) -> Option<String> {
    if rule.is_ascii() {
        return Some(rule.to_ascii_lowercase());
    }
    match Host::parse(rule) {
        Ok(Host::Domain(d)) => Some(d),
        _ => None,
    }
}

impl SuffixList {
    /// Parses the publicsuffix.org format. Unparseable rules are skipped.
    pub fn parse(text: &str) -> SuffixList {
        let mut list = SuffixList::default();
        for line in text.lines() {
            let Some(rule) = line.split_whitespace().next() else { continue };
            if rule.starts_with("//") {
                continue;
            }
            if let Some(r) = rule.strip_prefix('!') {
                list.exceptions.extend(ascii(r));
            } else if let Some(r) = rule.strip_prefix("*.") {
                list.wildcards.extend(ascii(r));
            } else {
                list.rules.extend(ascii(rule));
            }
        }
        list
    }

    pub fn len(&self) -> usize {
        self.rules.len() + self.wildcards.len() + self.exceptions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of trailing labels of `host` that form its public suffix.
    pub fn suffix_labels(&self, host: &str) -> usize {
        let starts: Vec<usize> = core::iter::once(0)
            .chain(host.match_indices('.').map(|(i, _)| i + 1))
            .collect();
        let n = starts.len();
        for (i, &s) in starts.iter().enumerate() {
            let suffix = &host[s..];
            if self.exceptions.contains(suffix) {
                return n - i - 1;
            }
            let wild = starts.get(i + 1).is_some_and(|&t| self.wildcards.contains(&host[t..]));
            if self.rules.contains(suffix) || wild {
                return n - i;
            }
        }
        1
    }

    /// eTLD+1 of a lowercase ASCII hostname.
    pub fn registrable_domain<'h>(&self, host: &'h str) -> Option<&'h str> {
        let host = host.strip_suffix('.').unwrap_or(host);
        if host.is_empty() || host.split('.').any(str::is_empty) {
            return None;
        }
        let labels = host.split('.').count();
        let keep = self.suffix_labels(host) + 1;
        if keep > labels {
            return None;
        }
        match labels - keep {
            0 => Some(host),
            skip => host.match_indices('.').nth(skip - 1).map(|(i, _)| &host[i + 1..]),
        }
    }
}

static SUFFIXES: OnceBox<SuffixList> = OnceBox::new();

pub fn suffix_list() -> &'static SuffixList {
    SUFFIXES.get_or_init(|| Box::new(SuffixList::parse(PUBLIC_SUFFIX_LIST)))
}

fn parse(url: &str) -> Result<Url, DomainError> {
    Url::parse(url.trim()).map_err(|e| match e {
        url::ParseError::RelativeUrlWithoutBase => DomainError::NoHost(url.to_string()),
        _ => DomainError::InvalidUrl(url.to_string()),
    })
}

/// Registrable domain of a URL's host, lowercased. IP hosts are returned
/// as written.
pub fn first_level_domain(url: &str) -> Result<String, DomainError> {
    let u = parse(url)?;
    match u.host() {
        None => Err(DomainError::NoHost(url.to_string())),
        Some(Host::Domain(d)) => {
            let d = d.to_ascii_lowercase();
            suffix_list()
                .registrable_domain(&d)
                .map(str::to_string)
                .ok_or(DomainError::PublicSuffix(d.clone()))
        }
        Some(h) => Ok(h.to_string()),
    }
}

/// Canonical form for exact URL comparison: scheme and host lowercased,
/// default port, credentials, fragment, and trailing slashes dropped; the
/// query kept.
pub fn normalize_url(url: &str) -> Result<String, DomainError> {
    let u = parse(url)?;
    let host = u.host_str().filter(|h| !h.is_empty()).ok_or_else(|| DomainError::NoHost(url.to_string()))?;
    let port = u.port().map(|p| format!(":{p}")).unwrap_or_default();
    let path = u.path().trim_end_matches('/');
    let query = u.query().map(|q| format!("?{q}")).unwrap_or_default();
    Ok(format!("{}://{}{}{}{}", u.scheme(), host.to_ascii_lowercase(), port, path, query))
}
