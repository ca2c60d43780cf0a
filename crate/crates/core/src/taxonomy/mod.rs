//! Platform enumerations, the policy annotation taxonomy, and the
//! cross-platform mapping tables.

mod tables;
mod tag;

pub use tables::{bundled, tables, CrossPlatformMap, Tables, TABLE_FILES};
pub use tag::{Annotations, Identifiability, InvalidScore, Polarity, Score, TagClass, TaxonomyTag};

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};

string_enum! {
    /// Apple privacy label top level.
    pub enum PrivacyType {
        DataUsedToTrackYou => "DataUsedToTrackYou",
        DataLinkedToYou => "DataLinkedToYou",
        DataNotLinkedToYou => "DataNotLinkedToYou",
        DataNotCollected => "DataNotCollected",
    }
}

string_enum! {
    pub enum AppleCategory {
        ContactInfo => "ContactInfo",
        HealthAndFitness => "HealthAndFitness",
        FinancialInfo => "FinancialInfo",
        Location => "Location",
        SensitiveInfo => "SensitiveInfo",
        Contacts => "Contacts",
        UserContent => "UserContent",
        BrowsingHistory => "BrowsingHistory",
        SearchHistory => "SearchHistory",
        Identifiers => "Identifiers",
        Purchases => "Purchases",
        UsageData => "UsageData",
        Diagnostics => "Diagnostics",
        OtherData => "OtherData",
    }
}

string_enum! {
    pub enum AppleDatatype {
        Name => "Name",
        EmailAddress => "EmailAddress",
        PhoneNumber => "PhoneNumber",
        PhysicalAddress => "PhysicalAddress",
        OtherUserContactInfo => "OtherUserContactInfo",
        Health => "Health",
        Fitness => "Fitness",
        PaymentInfo => "PaymentInfo",
        CreditInfo => "CreditInfo",
        OtherFinancialInfo => "OtherFinancialInfo",
        PreciseLocation => "PreciseLocation",
        CoarseLocation => "CoarseLocation",
        SensitiveInfo => "SensitiveInfo",
        Contacts => "Contacts",
        EmailsOrTextMessages => "EmailsOrTextMessages",
        PhotosOrVideos => "PhotosOrVideos",
        AudioData => "AudioData",
        GameplayContent => "GameplayContent",
        CustomerSupport => "CustomerSupport",
        OtherUserContent => "OtherUserContent",
        BrowsingHistory => "BrowsingHistory",
        SearchHistory => "SearchHistory",
        UserId => "UserId",
        DeviceId => "DeviceId",
        PurchaseHistory => "PurchaseHistory",
        ProductInteraction => "ProductInteraction",
        AdvertisingData => "AdvertisingData",
        OtherUsageData => "OtherUsageData",
        CrashData => "CrashData",
        PerformanceData => "PerformanceData",
        OtherDiagnosticData => "OtherDiagnosticData",
        OtherDataTypes => "OtherDataTypes",
    }
}

string_enum! {
    /// The purposes Apple lists. The label documentation speaks of five main
    /// purposes but names six; all six are accepted.
    pub enum ApplePurpose {
        ThirdPartyAdvertising => "ThirdPartyAdvertising",
        DevelopersAdvertising => "DevelopersAdvertising",
        Analytics => "Analytics",
        ProductPersonalization => "ProductPersonalization",
        AppFunctionality => "AppFunctionality",
        OtherPurposes => "OtherPurposes",
    }
}

string_enum! {
    pub enum GoogleCategory {
        Location => "Location",
        PersonalInfo => "PersonalInfo",
        FinancialInfo => "FinancialInfo",
        HealthAndFitness => "HealthAndFitness",
        Messages => "Messages",
        PhotosAndVideos => "PhotosAndVideos",
        AudioFiles => "AudioFiles",
        FilesAndDocs => "FilesAndDocs",
        Calendar => "Calendar",
        Contacts => "Contacts",
        AppActivity => "AppActivity",
        WebBrowsing => "WebBrowsing",
        AppInfoAndPerformance => "AppInfoAndPerformance",
        DeviceOrOtherIds => "DeviceOrOtherIds",
    }
}

string_enum! {
    pub enum GoogleDatatype {
        ApproximateLocation => "ApproximateLocation",
        PreciseLocation => "PreciseLocation",
        Name => "Name",
        EmailAddress => "EmailAddress",
        Address => "Address",
        PhoneNumber => "PhoneNumber",
        RaceAndEthnicity => "RaceAndEthnicity",
        PoliticalOrReligiousBeliefs => "PoliticalOrReligiousBeliefs",
        SexualOrientation => "SexualOrientation",
        UserIds => "UserIds",
        UserPaymentInfo => "UserPaymentInfo",
        CreditScore => "CreditScore",
        OtherFinancialInfo => "OtherFinancialInfo",
        PurchaseHistory => "PurchaseHistory",
        HealthInfo => "HealthInfo",
        FitnessInfo => "FitnessInfo",
        Emails => "Emails",
        SmsOrMms => "SmsOrMms",
        OtherInAppMessages => "OtherInAppMessages",
        Photos => "Photos",
        Videos => "Videos",
        VoiceOrSoundRecordings => "VoiceOrSoundRecordings",
        MusicFiles => "MusicFiles",
        OtherAudioFiles => "OtherAudioFiles",
        FilesAndDocs => "FilesAndDocs",
        Calendar => "Calendar",
        Contacts => "Contacts",
        AppInteractions => "AppInteractions",
        OtherUserGeneratedContent => "OtherUserGeneratedContent",
        InAppSearchHistory => "InAppSearchHistory",
        OtherActions => "OtherActions",
        WebBrowsingHistory => "WebBrowsingHistory",
        CrashLogs => "CrashLogs",
        /// Google's datatype, distinct from Apple's `Diagnostics` category.
        Diagnostics => "Diagnostics",
        OtherAppPerformanceData => "OtherAppPerformanceData",
        DeviceOrOtherIds => "DeviceOrOtherIds",
        OtherInfo => "OtherInfo",
    }
}

string_enum! {
    pub enum GooglePurpose {
        AdvertisingOrMarketing => "AdvertisingOrMarketing",
        Analytics => "Analytics",
        AppFunctionality => "AppFunctionality",
        FraudPreventionSecurityCompliance => "FraudPreventionSecurityCompliance",
        Personalization => "Personalization",
        AccountManagement => "AccountManagement",
        DeveloperCommunication => "DeveloperCommunication",
    }
}

string_enum! {
    /// Purposes both stores can express.
    pub enum CommonPurpose {
        AdvertisingOrMarketing => "AdvertisingOrMarketing",
        Analytics => "Analytics",
        AppFunctionality => "AppFunctionality",
        Personalization => "Personalization",
    }
}

string_enum! {
    /// Data categories recognized in policy text.
    pub enum DataCategory {
        AppActivity => "AppActivity",
        AppInfoAndPerformance => "AppInfoAndPerformance",
        SensitiveInfo => "SensitiveInfo",
        Location => "Location",
        HealthAndFitness => "HealthAndFitness",
        DeviceOrOtherId => "DeviceOrOtherId",
        PhotosAndVideos => "PhotosAndVideos",
        WebBrowsing => "WebBrowsing",
        Contacts => "Contacts",
        Calendar => "Calendar",
    }
}

string_enum! {
    /// Purposes recognized in policy text.
    pub enum Purpose {
        AdvertisingOrMarketing => "AdvertisingOrMarketing",
        Personalization => "Personalization",
        AccountManagement => "AccountManagement",
        DeveloperCommunication => "DeveloperCommunication",
    }
}

/// An Apple datatype that some Google datatype maps onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommonDatatype(AppleDatatype);

impl CommonDatatype {
    pub fn new(dt: AppleDatatype) -> Option<Self> {
        tables().common_datatypes().contains(&dt).then_some(CommonDatatype(dt))
    }

    pub fn apple(self) -> AppleDatatype {
        self.0
    }

    pub fn as_str(self) -> &'static str {
        self.0.as_str()
    }

    /// Every common datatype in ascending order.
    pub fn all() -> impl Iterator<Item = CommonDatatype> {
        tables().common_datatypes().iter().map(|&dt| CommonDatatype(dt))
    }
}

impl core::fmt::Display for CommonDatatype {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.0.as_str())
    }
}

impl core::str::FromStr for CommonDatatype {
    type Err = crate::error::UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<AppleDatatype>()
            .ok()
            .and_then(CommonDatatype::new)
            .ok_or_else(|| crate::error::UnknownName::new("CommonDatatype", s))
    }
}

impl serde::Serialize for CommonDatatype {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> serde::Deserialize<'de> for CommonDatatype {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Errors from the string-keyed mapping entry points.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("unknown datatype `{0}`")]
    UnknownDatatype(String),
    #[error("unknown purpose `{0}`")]
    UnknownPurpose(String),
}

/// Looks up the Apple counterpart of a Google datatype; `None` is N/A.
pub fn map_dss_datatype(dt: GoogleDatatype) -> Option<AppleDatatype> {
    tables().cross_map().datatype(dt)
}

/// Looks up the common purpose of a Google purpose; `None` is N/A.
pub fn map_dss_purpose(p: GooglePurpose) -> Option<CommonPurpose> {
    tables().cross_map().purpose(p)
}

/// Like [`map_dss_datatype`] but over raw names.
pub fn map_dss_datatype_name(name: &str) -> Result<Option<AppleDatatype>, TaxonomyError> {
    let dt = name
        .parse::<GoogleDatatype>()
        .map_err(|_| TaxonomyError::UnknownDatatype(name.to_string()))?;
    Ok(map_dss_datatype(dt))
}

/// Like [`map_dss_purpose`] but over raw names.
pub fn map_dss_purpose_name(name: &str) -> Result<Option<CommonPurpose>, TaxonomyError> {
    let p = name
        .parse::<GooglePurpose>()
        .map_err(|_| TaxonomyError::UnknownPurpose(name.to_string()))?;
    Ok(map_dss_purpose(p))
}

/// Folds an Apple purpose into the common space; `None` for Other Purposes.
pub fn map_apl_purpose(p: ApplePurpose) -> Option<CommonPurpose> {
    tables().apl_purpose(p)
}

/// Both sides of the common comparison space.
pub fn common_space() -> (BTreeSet<CommonDatatype>, BTreeSet<CommonPurpose>) {
    let t = tables();
    (
        CommonDatatype::all().collect(),
        t.cross_map().purpose_image(),
    )
}

pub fn apple_category_of(dt: AppleDatatype) -> AppleCategory {
    tables().apple_category_of(dt)
}

pub fn google_category_of(dt: GoogleDatatype) -> GoogleCategory {
    tables().google_category_of(dt)
}

/// Policy taxonomy category checked for a Google label category, if any.
pub fn google_category_taxonomy(c: GoogleCategory) -> Option<DataCategory> {
    tables().google_taxonomy(c)
}

/// Policy taxonomy category checked for an Apple label category, if any.
pub fn apple_category_taxonomy(c: AppleCategory) -> Option<DataCategory> {
    tables().apple_taxonomy(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes() {
        assert_eq!(AppleCategory::ALL.len(), 14);
        assert_eq!(AppleDatatype::ALL.len(), 32);
        assert_eq!(ApplePurpose::ALL.len(), 6);
        assert_eq!(GoogleCategory::ALL.len(), 14);
        assert_eq!(GoogleDatatype::ALL.len(), 37);
        assert_eq!(GooglePurpose::ALL.len(), 7);
        assert_eq!(CommonPurpose::ALL.len(), 4);
    }

    #[test]
    fn names_round_trip() {
        for dt in GoogleDatatype::ALL {
            assert_eq!(dt.as_str().parse::<GoogleDatatype>(), Ok(*dt));
        }
        assert!("Diagnostics".parse::<GoogleDatatype>().is_ok());
        assert!("Diagnostics".parse::<AppleCategory>().is_ok());
        assert!("Diagnostics".parse::<AppleDatatype>().is_err());
    }

    #[test]
    fn datatype_rows() {
        use AppleDatatype as A;
        use GoogleDatatype as G;
        assert_eq!(map_dss_datatype(G::ApproximateLocation), Some(A::CoarseLocation));
        assert_eq!(map_dss_datatype(G::RaceAndEthnicity), Some(A::SensitiveInfo));
        assert_eq!(map_dss_datatype(G::MusicFiles), None);
        assert_eq!(map_dss_datatype(G::Diagnostics), Some(A::PerformanceData));
        assert_eq!(
            map_dss_datatype_name("Fax"),
            Err(TaxonomyError::UnknownDatatype("Fax".into()))
        );
    }

    #[test]
    fn purpose_rows() {
        use GooglePurpose as G;
        assert_eq!(map_dss_purpose(G::FraudPreventionSecurityCompliance), Some(CommonPurpose::AppFunctionality));
        assert_eq!(map_dss_purpose(G::AccountManagement), None);
        assert_eq!(map_dss_purpose(G::DeveloperCommunication), None);
        assert_eq!(map_dss_purpose(G::Analytics), Some(CommonPurpose::Analytics));
        assert_eq!(map_dss_purpose(G::AdvertisingOrMarketing), Some(CommonPurpose::AdvertisingOrMarketing));
        assert_eq!(
            map_dss_purpose_name("Spam"),
            Err(TaxonomyError::UnknownPurpose("Spam".into()))
        );
    }

    #[test]
    fn apple_purposes_fold() {
        assert_eq!(map_apl_purpose(ApplePurpose::ThirdPartyAdvertising), Some(CommonPurpose::AdvertisingOrMarketing));
        assert_eq!(map_apl_purpose(ApplePurpose::DevelopersAdvertising), Some(CommonPurpose::AdvertisingOrMarketing));
        assert_eq!(map_apl_purpose(ApplePurpose::ProductPersonalization), Some(CommonPurpose::Personalization));
        assert_eq!(map_apl_purpose(ApplePurpose::OtherPurposes), None);
    }

    #[test]
    fn common_space_sizes() {
        let (dts, ps) = common_space();
        assert_eq!(dts.len(), 26);
        assert_eq!(ps.len(), 4);
        let emails = CommonDatatype::new(AppleDatatype::EmailsOrTextMessages).unwrap();
        assert!(dts.contains(&emails));
        assert_eq!(CommonDatatype::new(AppleDatatype::GameplayContent), None);
    }

    #[test]
    fn mapped_datatypes_have_apple_categories() {
        for &g in GoogleDatatype::ALL {
            if let Some(a) = map_dss_datatype(g) {
                assert!(AppleCategory::ALL.contains(&apple_category_of(a)));
            }
        }
    }

    #[test]
    fn membership() {
        assert_eq!(apple_category_of(AppleDatatype::PreciseLocation), AppleCategory::Location);
        assert_eq!(google_category_of(GoogleDatatype::Contacts), GoogleCategory::Contacts);
        assert_eq!(google_category_of(GoogleDatatype::UserIds), GoogleCategory::PersonalInfo);
        let per_apple = AppleCategory::ALL
            .iter()
            .filter(|c| AppleDatatype::ALL.iter().any(|d| apple_category_of(*d) == **c))
            .count();
        assert_eq!(per_apple, 14);
    }

    #[test]
    fn taxonomy_maps() {
        assert_eq!(google_category_taxonomy(GoogleCategory::DeviceOrOtherIds), Some(DataCategory::DeviceOrOtherId));
        assert_eq!(google_category_taxonomy(GoogleCategory::PersonalInfo), None);
        assert_eq!(apple_category_taxonomy(AppleCategory::Identifiers), Some(DataCategory::DeviceOrOtherId));
        assert_eq!(apple_category_taxonomy(AppleCategory::ContactInfo), None);
    }
}
