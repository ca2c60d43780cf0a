//! Links apps listed on both stores.
//!
//! Candidates share a normalized name. A pair is scored by the first tier
//! that fires: identical normalized policy URL, same policy URL domain, or
//! same developer website domain. A pair is kept only when it sits at the
//! best tier of both apps and neither app has a second counterpart there.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::domain::{first_level_domain, normalize_url};
use crate::model::{AppRecord, Platform};

string_enum! {
    /// Declaration order is precedence order.
    pub enum MatchTier {
        PolicyUrlExact => "policy_url_exact",
        PolicyDomain => "policy_domain",
        DeveloperDomain => "developer_domain",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchResult {
    pub google_app_id: String,
    pub apple_app_id: String,
    pub tier: MatchTier,
    /// The normalized URL or domain both apps share.
    pub evidence: String,
}

string_enum! {
    pub enum AmbiguityReason {
        /// The app has several counterparts at its best tier.
        MultipleCounterparts => "multiple_counterparts",
        /// The app's only counterpart has several of its own.
        CounterpartAmbiguous => "counterpart_ambiguous",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AmbiguityReport {
    pub platform: Platform,
    pub app_id: String,
    pub tier: MatchTier,
    pub reason: AmbiguityReason,
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchOutput {
    pub matches: Vec<MatchResult>,
    pub ambiguous: Vec<AmbiguityReport>,
}

/// Case-folded name with whitespace runs collapsed.
pub fn normalize_name(name: &str) -> String {
    crate::text::collapse_whitespace(&name.to_lowercase())
}

struct Keys<'a> {
    id: &'a str,
    url: Option<String>,
    policy_domain: Option<String>,
    developer_domain: Option<String>,
}

impl<'a> Keys<'a> {
    fn of(r: &'a AppRecord) -> Self {
        let p = r.policy_url.as_deref();
        Keys {
            id: &r.app_id,
            url: p.and_then(|u| normalize_url(u).ok()),
            policy_domain: p.and_then(|u| first_level_domain(u).ok()),
            developer_domain: r.developer_website.as_deref().and_then(|u| first_level_domain(u).ok()),
        }
    }
}

fn same(a: &Option<String>, b: &Option<String>) -> Option<String> {
    match (a, b) {
        (Some(x), Some(y)) if x == y => Some(x.clone()),
        _ => None,
    }
}

fn tier(g: &Keys<'_>, a: &Keys<'_>) -> Option<(MatchTier, String)> {
    same(&g.url, &a.url)
        .map(|e| (MatchTier::PolicyUrlExact, e))
        .or_else(|| same(&g.policy_domain, &a.policy_domain).map(|e| (MatchTier::PolicyDomain, e)))
        .or_else(|| same(&g.developer_domain, &a.developer_domain).map(|e| (MatchTier::DeveloperDomain, e)))
}

/// Tier of one pair, or `None` when no criterion fires. Names are not
/// compared here.
pub fn pair_tier(google: &AppRecord, apple: &AppRecord) -> Option<(MatchTier, String)> {
    tier(&Keys::of(google), &Keys::of(apple))
}

type Best<'a> = BTreeMap<&'a str, (MatchTier, BTreeSet<&'a str>)>;

fn note<'a>(best: &mut Best<'a>, me: &'a str, other: &'a str, t: MatchTier) {
    let e = best.entry(me).or_insert((t, BTreeSet::new()));
    if t < e.0 {
        *e = (t, BTreeSet::new());
    }
    if t == e.0 {
        e.1.insert(other);
    }
}

fn ambiguous(best: &Best<'_>, id: &str) -> bool {
    best.get(id).is_some_and(|(_, s)| s.len() > 1)
}

pub fn match_apps(google: &[AppRecord], apple: &[AppRecord]) -> MatchOutput {
    let mut buckets: BTreeMap<String, (Vec<Keys<'_>>, Vec<Keys<'_>>)> = BTreeMap::new();
    for r in google {
        let n = normalize_name(&r.name);
        if !n.is_empty() {
            buckets.entry(n).or_default().0.push(Keys::of(r));
        }
    }
    for r in apple {
        let n = normalize_name(&r.name);
        if !n.is_empty() {
            buckets.entry(n).or_default().1.push(Keys::of(r));
        }
    }

    // strongest tier per (google, apple) id pair; evidence breaks ties so
    // duplicated ids stay order-independent
    let mut edges: BTreeMap<(&str, &str), (MatchTier, String)> = BTreeMap::new();
    for (gs, aps) in buckets.values() {
        for g in gs {
            for a in aps {
                if let Some(t) = tier(g, a) {
                    let slot = edges.entry((g.id, a.id)).or_insert_with(|| t.clone());
                    if t < *slot {
                        *slot = t;
                    }
                }
            }
        }
    }

    let mut best_g: Best<'_> = BTreeMap::new();
    let mut best_a: Best<'_> = BTreeMap::new();
    for (&(g, a), (t, _)) in &edges {
        note(&mut best_g, g, a, *t);
        note(&mut best_a, a, g, *t);
    }

    let mut out = MatchOutput::default();
    for (&(g, a), (t, evidence)) in &edges {
        if *t != best_g[g].0 || *t != best_a[a].0 {
            continue;
        }
        match (ambiguous(&best_g, g), ambiguous(&best_a, a)) {
            (false, false) => out.matches.push(MatchResult {
                google_app_id: g.into(),
                apple_app_id: a.into(),
                tier: *t,
                evidence: evidence.clone(),
            }),
            (false, true) => out.ambiguous.push(AmbiguityReport {
                platform: Platform::Google,
                app_id: g.into(),
                tier: *t,
                reason: AmbiguityReason::CounterpartAmbiguous,
                candidates: alloc::vec![a.into()],
            }),
            (true, false) => out.ambiguous.push(AmbiguityReport {
                platform: Platform::Apple,
                app_id: a.into(),
                tier: *t,
                reason: AmbiguityReason::CounterpartAmbiguous,
                candidates: alloc::vec![g.into()],
            }),
            (true, true) => {}
        }
    }
    for (platform, best) in [(Platform::Google, &best_g), (Platform::Apple, &best_a)] {
        for (id, (t, others)) in best.iter().filter(|(_, (_, s))| s.len() > 1) {
            out.ambiguous.push(AmbiguityReport {
                platform,
                app_id: (*id).into(),
                tier: *t,
                reason: AmbiguityReason::MultipleCounterparts,
                candidates: others.iter().map(|s| String::from(*s)).collect(),
            });
        }
    }
    out.matches.sort();
    out.ambiguous.sort();
    out
}
