//! Optional TOML file mirroring the command-line flags. Flags win.
//!
//! ```toml
//! jobs = 4
//! log_level = "info"
//!
//! [fetch]
//! max_retries = 3
//! min_interval_ms = 1000
//! backoff_ms = 500
//! timeout_ms = 30000
//! user_agent = "privlabel"
//!
//! [clean]
//! min_words = 100
//! merge_floor = 20
//! link_density = 0.5
//!
//! [annotate]
//! backend = "keyword"
//! threshold = 0.5
//!
//! [report]
//! format = "json"
//! ```

use std::path::Path;

use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub jobs: Option<usize>,
    pub log_level: Option<String>,
    #[serde(default)]
    pub fetch: FetchSection,
    #[serde(default)]
    pub clean: CleanSection,
    #[serde(default)]
    pub annotate: AnnotateSection,
    #[serde(default)]
    pub report: ReportSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FetchSection {
    pub max_retries: Option<u32>,
    pub min_interval_ms: Option<u64>,
    pub backoff_ms: Option<u64>,
    pub timeout_ms: Option<u64>,
    pub user_agent: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanSection {
    pub min_words: Option<usize>,
    pub merge_floor: Option<usize>,
    pub link_density: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotateSection {
    pub backend: Option<String>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    pub format: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: toml::de::Error },
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse { path: p, source })
    }
}
