use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::{AppleLabel, GoogleLabel};

string_enum! {
    pub enum Platform {
        Apple => "apple",
        Google => "google",
    }
}

string_enum! {
    pub enum PriceClass {
        Free => "free",
        FreeWithIap => "free_with_iap",
        Paid => "paid",
    }
}

string_enum! {
    /// Store age ratings. `Adults18` is accepted but left out of age strata.
    pub enum AgeRating {
        Everyone => "Everyone",
        Everyone10 => "Everyone10",
        Teen => "Teen",
        Mature17 => "Mature17",
        Adults18 => "Adults18",
        Age4 => "4+",
        Age9 => "9+",
        Age12 => "12+",
        Age17 => "17+",
    }
}

impl AgeRating {
    pub fn platform(self) -> Platform {
        match self {
            AgeRating::Age4 | AgeRating::Age9 | AgeRating::Age12 | AgeRating::Age17 => Platform::Apple,
            _ => Platform::Google,
        }
    }

    /// Whether the rating takes part in age-rating aggregation.
    pub fn aggregated(self) -> bool {
        self != AgeRating::Adults18
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("invalid {field} `{value}`")]
    InvalidEnum { field: &'static str, value: String },
}

/// Store metadata for one app.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawApp")]
pub struct AppRecord {
    pub platform: Platform,
    pub app_id: String,
    pub name: String,
    pub developer_name: String,
    pub policy_url: Option<String>,
    pub developer_website: Option<String>,
    pub downloads: Option<u64>,
    pub price_class: PriceClass,
    pub age_rating: AgeRating,
    pub genre: String,
    pub requests_network_permission: Option<bool>,
}

/// One ingest line as it appears on the wire, before checking.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct RawApp {
    pub platform: Option<String>,
    pub app_id: Option<String>,
    pub name: Option<String>,
    pub developer_name: Option<String>,
    pub policy_url: Option<String>,
    pub developer_website: Option<String>,
    pub downloads: Option<u64>,
    pub price_class: Option<String>,
    pub age_rating: Option<String>,
    pub genre: Option<String>,
    pub requests_network_permission: Option<bool>,
    pub apple_label: Option<AppleLabel>,
    pub google_label: Option<GoogleLabel>,
}

fn malformed(msg: impl Into<String>) -> RecordError {
    RecordError::MalformedRecord(msg.into())
}

fn absolute(field: &str, v: Option<String>) -> Result<Option<String>, RecordError> {
    match v {
        Some(s) if url::Url::parse(&s).is_err() => {
            Err(malformed(format!("{field} `{s}` is not an absolute URL")))
        }
        other => Ok(other),
    }
}

impl AppRecord {
    /// Checks a raw record. Labels on `raw` are ignored here.
    pub fn from_raw(raw: RawApp) -> Result<AppRecord, RecordError> {
        let platform = raw.platform.ok_or_else(|| malformed("missing platform"))?;
        let platform: Platform = platform
            .parse()
            .map_err(|_| RecordError::InvalidEnum { field: "platform", value: platform })?;
        let app_id = raw.app_id.filter(|s| !s.is_empty()).ok_or_else(|| malformed("missing app_id"))?;
        if platform == Platform::Apple {
            if raw.downloads.is_some() {
                return Err(malformed(format!("{app_id}: downloads on an apple record")));
            }
            if raw.requests_network_permission.is_some() {
                return Err(malformed(format!("{app_id}: network permission on an apple record")));
            }
        }
        let price = raw.price_class.ok_or_else(|| malformed(format!("{app_id}: missing price_class")))?;
        let price_class = price
            .parse()
            .map_err(|_| RecordError::InvalidEnum { field: "price_class", value: price })?;
        let age = raw.age_rating.ok_or_else(|| malformed(format!("{app_id}: missing age_rating")))?;
        let age_rating = match age.parse::<AgeRating>() {
            Ok(a) if a.platform() == platform => a,
            _ => return Err(RecordError::InvalidEnum { field: "age_rating", value: age }),
        };
        Ok(AppRecord {
            platform,
            name: raw.name.unwrap_or_default(),
            developer_name: raw.developer_name.unwrap_or_default(),
            policy_url: absolute("policy_url", raw.policy_url)?,
            developer_website: absolute("developer_website", raw.developer_website)?,
            downloads: raw.downloads,
            price_class,
            age_rating,
            genre: raw.genre.unwrap_or_default(),
            requests_network_permission: raw.requests_network_permission,
            app_id,
        })
    }
}

impl TryFrom<RawApp> for AppRecord {
    type Error = RecordError;

    fn try_from(raw: RawApp) -> Result<Self, Self::Error> {
        AppRecord::from_raw(raw)
    }
}

impl AsRef<AppRecord> for AppRecord {
    fn as_ref(&self) -> &AppRecord {
        self
    }
}

/// An app with whichever label its platform publishes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawApp")]
pub struct LabeledApp {
    #[serde(flatten)]
    pub record: AppRecord,
    pub apple_label: Option<AppleLabel>,
    pub google_label: Option<GoogleLabel>,
}

impl LabeledApp {
    pub fn from_raw(mut raw: RawApp) -> Result<LabeledApp, RecordError> {
        let apple_label = raw.apple_label.take();
        let google_label = raw.google_label.take();
        let record = AppRecord::from_raw(raw)?;
        let wrong = match record.platform {
            Platform::Apple => google_label.is_some(),
            Platform::Google => apple_label.is_some(),
        };
        if wrong {
            return Err(malformed(format!(
                "{}: label of the other platform on a {} record",
                record.app_id, record.platform
            )));
        }
        Ok(LabeledApp { record, apple_label, google_label })
    }

    pub fn has_label(&self) -> bool {
        self.apple_label.is_some() || self.google_label.is_some()
    }
}

impl TryFrom<RawApp> for LabeledApp {
    type Error = RecordError;

    fn try_from(raw: RawApp) -> Result<Self, Self::Error> {
        LabeledApp::from_raw(raw)
    }
}

impl AsRef<AppRecord> for LabeledApp {
    fn as_ref(&self) -> &AppRecord {
        &self.record
    }
}

impl From<AppRecord> for LabeledApp {
    fn from(record: AppRecord) -> Self {
        LabeledApp { record, apple_label: None, google_label: None }
    }
}

