//! Regenerates `data/lang/profiles/*.txt` from `data/lang/corpus/*.txt`.

use std::fs;
use std::path::Path;

use privlabel_core::lang::LanguageProfile;

fn main() -> std::io::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/lang");
    let mut entries: Vec<_> = fs::read_dir(data.join("corpus"))?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let path = e.path();
        let Some(code) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        let text = fs::read_to_string(&path)?;
        let profile = LanguageProfile::train(code, &text);
        let out = data.join("profiles").join(format!("{code}.txt"));
        fs::write(&out, profile.to_text())?;
        println!("{}", out.display());
    }
    Ok(())
}
