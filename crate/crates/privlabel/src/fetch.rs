//! Polite single-page fetching.
//!
//! Every host gets its robots.txt read once, and requests to one host run
//! one at a time with a minimum gap between their starts. Redirects are
//! followed by hand so each hop passes the same checks.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};
use std::thread;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use texting_robots::Robot;
use url::Url;

use crate::jsonl::{self, JsonlError};

pub const MAX_REDIRECTS: u32 = 5;
pub const LOG_FILE: &str = "fetch_log.jsonl";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchConfig {
    /// Cap on content requests per URL, first try included.
    pub max_attempts: u32,
    pub min_interval: Duration,
    /// Wait after the first failure; doubles after each further one.
    pub backoff_base: Duration,
    pub timeout: Duration,
    pub user_agent: String,
    pub max_body_bytes: u64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            max_attempts: 3,
            min_interval: Duration::from_millis(1000),
            backoff_base: Duration::from_millis(500),
            timeout: Duration::from_secs(30),
            user_agent: concat!("privlabel/", env!("CARGO_PKG_VERSION")).into(),
            max_body_bytes: 10 * 1024 * 1024,
        }
    }
}

impl FetchConfig {
    /// Delay before attempt `n + 1` after `n` failures.
    pub fn backoff(&self, failures: u32) -> Duration {
        self.backoff_base.saturating_mul(1u32 << failures.saturating_sub(1).min(16))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FetchStatus {
    Ok,
    RobotsDenied,
    /// Code 0 stands for a failure below HTTP, such as a refused connection
    /// or a URL that is not http(s).
    HttpError(u16),
    Timeout,
    NonHtml,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchResult {
    pub url: String,
    pub status: FetchStatus,
    /// Present exactly when `status` is `Ok`.
    pub body: Option<Vec<u8>>,
    pub content_type: Option<String>,
    /// Content requests sent. Zero when robots.txt forbade the first one.
    pub attempts: u32,
}

enum Robots {
    AllowAll,
    DenyAll,
    Rules(Box<Robot>),
}

impl Robots {
    fn allows(&self, url: &Url) -> bool {
        match self {
            Robots::AllowAll => true,
            Robots::DenyAll => false,
            Robots::Rules(r) => r.allowed(url.as_str()),
        }
    }

    fn delay(&self) -> Option<Duration> {
        match self {
            Robots::Rules(r) => r.delay.filter(|d| d.is_finite() && *d > 0.0).map(Duration::from_secs_f32),
            _ => None,
        }
    }
}

#[derive(Default)]
struct Host {
    robots: OnceLock<Robots>,
    last_start: Mutex<Option<Instant>>,
}

pub struct Fetcher {
    config: FetchConfig,
    agent: ureq::Agent,
    hosts: Mutex<HashMap<String, Arc<Host>>>,
}

enum Outcome {
    Response { code: u16, content_type: Option<String>, location: Option<String>, body: Option<Vec<u8>> },
    Timeout,
    Failed,
}

fn host_key(url: &Url) -> String {
    format!("{}://{}:{}", url.scheme(), url.host_str().unwrap_or(""), url.port_or_known_default().unwrap_or(0))
}

fn is_html(content_type: Option<&str>) -> bool {
    let Some(ct) = content_type else { return true };
    let mime = ct.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    mime == "text/html" || mime == "application/xhtml+xml"
}

fn is_transient(code: u16) -> bool {
    code == 429 || (500..600).contains(&code)
}

impl Fetcher {
    pub fn new(config: FetchConfig) -> Fetcher {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .max_redirects(0)
            .max_redirects_will_error(false)
            .timeout_global(Some(config.timeout))
            .user_agent(config.user_agent.as_str())
            .build()
            .into();
        Fetcher { config, agent, hosts: Mutex::new(HashMap::new()) }
    }

    pub fn config(&self) -> &FetchConfig {
        &self.config
    }

    fn host(&self, url: &Url) -> Arc<Host> {
        let mut hosts = self.hosts.lock().unwrap_or_else(|e| e.into_inner());
        hosts.entry(host_key(url)).or_default().clone()
    }

    /// Runs `request` once the host's gap has passed. Holding the lock keeps
    /// requests to one host strictly sequential.
    fn paced<T>(&self, host: &Host, request: impl FnOnce() -> T) -> T {
        let mut last = host.last_start.lock().unwrap_or_else(|e| e.into_inner());
        let gap = host.robots.get().and_then(Robots::delay).map_or(self.config.min_interval, |d| {
            d.max(self.config.min_interval)
        });
        if let Some(t) = *last {
            let ready = t + gap;
            let now = Instant::now();
            if ready > now {
                thread::sleep(ready - now);
            }
        }
        *last = Some(Instant::now());
        request()
    }

    fn get(&self, url: &Url) -> Outcome {
        let resp = match self.agent.get(url.as_str()).call() {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Outcome::Timeout,
            Err(ureq::Error::Io(e)) if e.kind() == std::io::ErrorKind::TimedOut => return Outcome::Timeout,
            Err(e) => {
                log::debug!("{url}: {e}");
                return Outcome::Failed;
            }
        };
        let code = resp.status().as_u16();
        let header = |name: &str| resp.headers().get(name).and_then(|v| v.to_str().ok()).map(str::to_owned);
        let content_type = header("content-type");
        let location = header("location");
        let body = if (200..300).contains(&code) && is_html(content_type.as_deref()) {
            match resp.into_body().with_config().limit(self.config.max_body_bytes).read_to_vec() {
                Ok(b) => Some(b),
                Err(ureq::Error::Timeout(_)) => return Outcome::Timeout,
                Err(e) => {
                    log::debug!("{url}: {e}");
                    return Outcome::Failed;
                }
            }
        } else {
            None
        };
        Outcome::Response { code, content_type, location, body }
    }

    fn robots(&self, url: &Url, host: &Host) -> bool {
        let robots = host.robots.get_or_init(|| {
            let Ok(robots_url) = url.join("/robots.txt") else { return Robots::AllowAll };
            match self.paced(host, || self.get_robots(&robots_url)) {
                Some((200..=299, body)) => Robot::new(&self.config.user_agent, &body)
                    .map(|r| Robots::Rules(Box::new(r)))
                    .unwrap_or(Robots::AllowAll),
                Some((400..=499, _)) => Robots::AllowAll,
                // unreachable or erroring robots.txt: stay away
                _ => Robots::DenyAll,
            }
        });
        robots.allows(url)
    }

    fn get_robots(&self, url: &Url) -> Option<(u16, Vec<u8>)> {
        let resp = self.agent.get(url.as_str()).call().ok()?;
        let code = resp.status().as_u16();
        let body = resp.into_body().with_config().limit(512 * 1024).read_to_vec().ok()?;
        Some((code, body))
    }

    pub fn fetch_policy(&self, url: &str) -> FetchResult {
        let done = |status, body, content_type, attempts| FetchResult {
            url: url.to_string(),
            status,
            body,
            content_type,
            attempts,
        };
        let mut current = match Url::parse(url) {
            Ok(u) if matches!(u.scheme(), "http" | "https") && u.host_str().is_some() => u,
            _ => return done(FetchStatus::HttpError(0), None, None, 0),
        };
        let mut attempts = 0;
        let mut failures = 0;
        let mut hops = 0;
        loop {
            let host = self.host(&current);
            if !self.robots(&current, &host) {
                return done(FetchStatus::RobotsDenied, None, None, attempts);
            }
            attempts += 1;
            let outcome = self.paced(&host, || self.get(&current));
            let retry_as = match outcome {
                Outcome::Response { code: 200..=299, content_type, body, .. } => {
                    return match body {
                        Some(b) => done(FetchStatus::Ok, Some(b), content_type, attempts),
                        None => done(FetchStatus::NonHtml, None, content_type, attempts),
                    };
                }
                Outcome::Response { code: 300..=399, location: Some(loc), .. } if hops < MAX_REDIRECTS => {
                    match current.join(&loc) {
                        Ok(next) if matches!(next.scheme(), "http" | "https") => {
                            hops += 1;
                            current = next;
                            if attempts >= self.config.max_attempts {
                                return done(FetchStatus::HttpError(0), None, None, attempts);
                            }
                            continue;
                        }
                        _ => return done(FetchStatus::HttpError(0), None, None, attempts),
                    }
                }
                Outcome::Response { code, .. } if is_transient(code) => FetchStatus::HttpError(code),
                Outcome::Response { code, .. } => return done(FetchStatus::HttpError(code), None, None, attempts),
                Outcome::Timeout => FetchStatus::Timeout,
                Outcome::Failed => FetchStatus::HttpError(0),
            };
            failures += 1;
            if attempts >= self.config.max_attempts {
                return done(retry_as, None, None, attempts);
            }
            let wait = self.config.backoff(failures);
            log::info!("{current}: {retry_as:?}, retrying in {wait:?}");
            thread::sleep(wait);
        }
    }

    /// Fetches hosts in parallel and each host's URLs in input order.
    /// Results come back in input order.
    pub fn fetch_all(&self, urls: &[String]) -> Vec<FetchResult> {
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        let mut by_host: HashMap<String, usize> = HashMap::new();
        for (i, u) in urls.iter().enumerate() {
            let key = Url::parse(u).map(|u| host_key(&u)).unwrap_or_default();
            let g = *by_host.entry(key.clone()).or_insert_with(|| {
                groups.push((key, Vec::new()));
                groups.len() - 1
            });
            groups[g].1.push(i);
        }
        let mut results: Vec<(usize, FetchResult)> = groups
            .par_iter()
            .flat_map_iter(|(_, idx)| idx.iter().map(|&i| (i, self.fetch_policy(&urls[i]))).collect::<Vec<_>>())
            .collect();
        results.sort_by_key(|(i, _)| *i);
        results.into_iter().map(|(_, r)| r).collect()
    }
}

pub fn fetch_policy(url: &str, config: &FetchConfig) -> FetchResult {
    Fetcher::new(config.clone()).fetch_policy(url)
}

/// One line of `fetch_log.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchLogEntry {
    pub url: String,
    pub status: FetchStatus,
    pub attempts: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_type: Option<String>,
    /// Body file inside the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

/// Writes each body as `NNNNN.html` next to a log of every result.
pub fn write_raw(dir: &Path, results: &[FetchResult]) -> Result<Vec<FetchLogEntry>, JsonlError> {
    fs::create_dir_all(dir).map_err(|e| JsonlError::io(dir, e))?;
    let mut log = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let file = match &r.body {
            Some(body) => {
                let name = format!("{i:05}.html");
                let path = dir.join(&name);
                fs::write(&path, body).map_err(|e| JsonlError::io(&path, e))?;
                Some(name)
            }
            None => None,
        };
        log.push(FetchLogEntry {
            url: r.url.clone(),
            status: r.status,
            attempts: r.attempts,
            content_type: r.content_type.clone(),
            file,
        });
    }
    jsonl::write(&dir.join(LOG_FILE), &log)?;
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles() {
        let c = FetchConfig { backoff_base: Duration::from_millis(100), ..Default::default() };
        assert_eq!(c.backoff(1), Duration::from_millis(100));
        assert_eq!(c.backoff(2), Duration::from_millis(200));
        assert_eq!(c.backoff(3), Duration::from_millis(400));
    }

    #[test]
    fn status_wire_form() {
        assert_eq!(serde_json::to_string(&FetchStatus::HttpError(503)).unwrap(), r#"{"http_error":503}"#);
        assert_eq!(serde_json::to_string(&FetchStatus::RobotsDenied).unwrap(), r#""robots_denied""#);
    }

    #[test]
    fn html_types() {
        assert!(is_html(Some("text/html; charset=utf-8")));
        assert!(is_html(None));
        assert!(!is_html(Some("application/pdf")));
    }

    #[test]
    fn bad_url_is_not_requested() {
        let r = fetch_policy("mailto:a@b.c", &FetchConfig::default());
        assert_eq!((r.status, r.attempts), (FetchStatus::HttpError(0), 0));
    }
}
