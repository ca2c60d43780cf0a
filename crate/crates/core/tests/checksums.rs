//! Bundled data files are pinned by `data/SHA256SUMS`. Editing a table means
//! updating the sum on purpose.

use std::collections::BTreeMap;
use std::path::Path;

use privlabel_core::taxonomy::TABLE_FILES;
use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn sums() -> BTreeMap<String, String> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::read_to_string(data.join("SHA256SUMS"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (sum, name) = l.split_once("  ").expect("`<sum>  <file>` lines");
            (name.to_string(), sum.to_string())
        })
        .collect()
}

#[test]
fn bundled_tables_match_pinned_sums() {
    let sums = sums();
    for (name, contents) in TABLE_FILES {
        let want = sums.get(*name).unwrap_or_else(|| panic!("{name} is not pinned"));
        assert_eq!(&hex(contents.as_bytes()), want, "{name} changed");
    }
}

#[test]
fn data_files_match_pinned_sums() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for (name, want) in sums() {
        let bytes = std::fs::read(data.join(&name)).unwrap();
        assert_eq!(hex(&bytes), want, "{name} changed");
    }
}
