use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;
use core::str::FromStr;

use once_cell::race::OnceBox;

use super::{
    AppleCategory, AppleDatatype, ApplePurpose, CommonPurpose, DataCategory, GoogleCategory,
    GoogleDatatype, GooglePurpose,
};
use crate::error::{TableError, UnknownName};

const APPLE_CATEGORIES: &str = include_str!("../../data/apple_categories.csv");
const GOOGLE_CATEGORIES: &str = include_str!("../../data/google_categories.csv");
const DSS_DATATYPE_MAP: &str = include_str!("../../data/dss_datatype_map.csv");
const DSS_PURPOSE_MAP: &str = include_str!("../../data/dss_purpose_map.csv");
const APL_PURPOSE_MAP: &str = include_str!("../../data/apl_purpose_map.csv");
const GOOGLE_CATEGORY_TAXONOMY: &str = include_str!("../../data/google_category_taxonomy.csv");
const APPLE_CATEGORY_TAXONOMY: &str = include_str!("../../data/apple_category_taxonomy.csv");

/// Bundled table files as `(file name, contents)`.
pub const TABLE_FILES: &[(&str, &str)] = &[
    ("apple_categories.csv", APPLE_CATEGORIES),
    ("google_categories.csv", GOOGLE_CATEGORIES),
    ("dss_datatype_map.csv", DSS_DATATYPE_MAP),
    ("dss_purpose_map.csv", DSS_PURPOSE_MAP),
    ("apl_purpose_map.csv", APL_PURPOSE_MAP),
    ("google_category_taxonomy.csv", GOOGLE_CATEGORY_TAXONOMY),
    ("apple_category_taxonomy.csv", APPLE_CATEGORY_TAXONOMY),
];

const NA: &str = "N/A";

/// The Google to Apple datatype and purpose mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossPlatformMap {
    datatype: BTreeMap<GoogleDatatype, Option<AppleDatatype>>,
    purpose: BTreeMap<GooglePurpose, Option<CommonPurpose>>,
}

impl CrossPlatformMap {
    /// Parses `google_datatype,apple_datatype` and `google_purpose,apple_purpose`
    /// CSV text. Both must cover their whole domain.
    pub fn from_csv(datatype_csv: &str, purpose_csv: &str) -> Result<Self, TableError> {
        Ok(CrossPlatformMap {
            datatype: keyed("dss_datatype_map", datatype_csv, GoogleDatatype::ALL, 0, |s| {
                optional(s)
            })?,
            purpose: keyed("dss_purpose_map", purpose_csv, GooglePurpose::ALL, 0, |s| {
                optional(s)
            })?,
        })
    }

    pub fn datatype(&self, dt: GoogleDatatype) -> Option<AppleDatatype> {
        self.datatype[&dt]
    }

    pub fn purpose(&self, p: GooglePurpose) -> Option<CommonPurpose> {
        self.purpose[&p]
    }

    /// Distinct non-N/A datatypes in the image.
    pub fn datatype_image(&self) -> BTreeSet<AppleDatatype> {
        self.datatype.values().flatten().copied().collect()
    }

    /// Distinct non-N/A purposes in the image.
    pub fn purpose_image(&self) -> BTreeSet<CommonPurpose> {
        self.purpose.values().flatten().copied().collect()
    }
}

/// Every lookup table, parsed and checked.
#[derive(Debug, Clone)]
pub struct Tables {
    apple_members: BTreeMap<AppleDatatype, AppleCategory>,
    google_members: BTreeMap<GoogleDatatype, GoogleCategory>,
    cross: CrossPlatformMap,
    common: BTreeSet<AppleDatatype>,
    apl_purpose: BTreeMap<ApplePurpose, Option<CommonPurpose>>,
    google_taxonomy: BTreeMap<GoogleCategory, Option<DataCategory>>,
    apple_taxonomy: BTreeMap<AppleCategory, Option<DataCategory>>,
}

impl Tables {
    fn parse() -> Result<Self, TableError> {
        let apple_members = keyed("apple_categories", APPLE_CATEGORIES, AppleDatatype::ALL, 1, |s| {
            AppleCategory::from_str(s)
        })?;
        let google_members =
            keyed("google_categories", GOOGLE_CATEGORIES, GoogleDatatype::ALL, 1, |s| {
                GoogleCategory::from_str(s)
            })?;
        let cross = CrossPlatformMap::from_csv(DSS_DATATYPE_MAP, DSS_PURPOSE_MAP)?;
        let common = cross.datatype_image();
        Ok(Tables {
            apple_members,
            google_members,
            cross,
            common,
            apl_purpose: keyed("apl_purpose_map", APL_PURPOSE_MAP, ApplePurpose::ALL, 0, optional)?,
            google_taxonomy: keyed(
                "google_category_taxonomy",
                GOOGLE_CATEGORY_TAXONOMY,
                GoogleCategory::ALL,
                0,
                optional,
            )?,
            apple_taxonomy: keyed(
                "apple_category_taxonomy",
                APPLE_CATEGORY_TAXONOMY,
                AppleCategory::ALL,
                0,
                optional,
            )?,
        })
    }

    pub fn cross_map(&self) -> &CrossPlatformMap {
        &self.cross
    }

    pub fn common_datatypes(&self) -> &BTreeSet<AppleDatatype> {
        &self.common
    }

    pub fn apple_category_of(&self, dt: AppleDatatype) -> AppleCategory {
        self.apple_members[&dt]
    }

    pub fn google_category_of(&self, dt: GoogleDatatype) -> GoogleCategory {
        self.google_members[&dt]
    }

    pub fn apl_purpose(&self, p: ApplePurpose) -> Option<CommonPurpose> {
        self.apl_purpose[&p]
    }

    pub fn google_taxonomy(&self, c: GoogleCategory) -> Option<DataCategory> {
        self.google_taxonomy[&c]
    }

    pub fn apple_taxonomy(&self, c: AppleCategory) -> Option<DataCategory> {
        self.apple_taxonomy[&c]
    }
}

/// Parses the bundled tables without caching.
pub fn bundled() -> Result<Tables, TableError> {
    Tables::parse()
}

static TABLES: OnceBox<Tables> = OnceBox::new();

/// Process-wide parsed tables.
pub fn tables() -> &'static Tables {
    TABLES.get_or_init(|| Box::new(Tables::parse().expect("bundled tables are well-formed")))
}

fn optional<T: FromStr<Err = UnknownName>>(s: &str) -> Result<Option<T>, UnknownName> {
    if s == NA {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// Two-column rows after the comment lines and header.
fn rows<'a>(table: &'static str, text: &'a str) -> Result<Vec<(usize, &'a str, &'a str)>, TableError> {
    let mut out = Vec::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(TableError::Syntax {
                table,
                line: i + 1,
                message: "expected two columns".to_string(),
            });
        };
        if !header {
            header = true;
            continue;
        }
        out.push((i + 1, a, b));
    }
    Ok(out)
}

/// Builds a total map over `domain`. `key_col` picks which column is the key.
fn keyed<K, V>(
    table: &'static str,
    text: &str,
    domain: &[K],
    key_col: usize,
    value: impl Fn(&str) -> Result<V, UnknownName>,
) -> Result<BTreeMap<K, V>, TableError>
where
    K: FromStr<Err = UnknownName> + Ord + Copy + core::fmt::Display,
{
    let mut map = BTreeMap::new();
    for (line, a, b) in rows(table, text)? {
        let (k, v) = if key_col == 0 { (a, b) } else { (b, a) };
        let key = k.parse::<K>().map_err(|source| TableError::Name { table, line, source })?;
        let val = value(v).map_err(|source| TableError::Name { table, line, source })?;
        if map.insert(key, val).is_some() {
            return Err(TableError::Duplicate { table, key: k.to_string() });
        }
    }
    if let Some(missing) = domain.iter().find(|k| !map.contains_key(k)) {
        return Err(TableError::Missing { table, key: missing.to_string() });
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_parse() {
        bundled().unwrap();
    }

    #[test]
    fn purpose_image_is_common_purpose() {
        let img = tables().cross_map().purpose_image();
        assert_eq!(img.into_iter().collect::<Vec<_>>(), CommonPurpose::ALL.to_vec());
    }

    #[test]
    fn rejects_partial_map() {
        let err = CrossPlatformMap::from_csv("google_datatype,apple_datatype\nName,Name\n", DSS_PURPOSE_MAP)
            .unwrap_err();
        assert!(matches!(err, TableError::Missing { .. }));
    }

    #[test]
    fn rejects_duplicates_and_bad_names() {
        let dup = "# x\ngoogle_purpose,apple_purpose\nAnalytics,Analytics\nAnalytics,N/A\n";
        assert!(matches!(
            CrossPlatformMap::from_csv(DSS_DATATYPE_MAP, dup),
            Err(TableError::Duplicate { .. })
        ));
        let bad = "google_purpose,apple_purpose\nAnalytics,Tracking\n";
        assert!(matches!(
            CrossPlatformMap::from_csv(DSS_DATATYPE_MAP, bad),
            Err(TableError::Name { line: 2, .. })
        ));
    }
}
