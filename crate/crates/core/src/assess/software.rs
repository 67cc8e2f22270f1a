//! Source-code detection from the declared file formats.

use serde::{Deserialize, Serialize};

use crate::model::DatasetRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SoftwareContent {
    NoFormatsListed,
    NoSoftwareDetected,
    MixedDataAndSoftware,
    SoftwareOnly,
}

impl SoftwareContent {
    pub fn as_str(self) -> &'static str {
        match self {
            SoftwareContent::NoFormatsListed => "no_formats_listed",
            SoftwareContent::NoSoftwareDetected => "no_software_detected",
            SoftwareContent::MixedDataAndSoftware => "mixed_data_and_software",
            SoftwareContent::SoftwareOnly => "software_only",
        }
    }
}

/// Source-file extensions, plus MIME types that stand for them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SoftwareExtensions {
    pub extensions: Vec<String>,
    /// MIME type to extension.
    pub mime_aliases: Vec<(String, String)>,
}

impl Default for SoftwareExtensions {
    fn default() -> Self {
        SoftwareExtensions {
            extensions: vec!["py".into(), "ipynb".into(), "r".into()],
            mime_aliases: [
                ("text/x-python", "py"),
                ("text/x-python-script", "py"),
                ("application/x-python-code", "py"),
                ("application/x-ipynb+json", "ipynb"),
                ("text/x-r", "r"),
                ("text/x-r-source", "r"),
                ("text/x-rsrc", "r"),
            ]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        }
    }
}

impl SoftwareExtensions {
    /// Extension named by one `formats` entry: a MIME type, `.py`, `py` or
    /// a file name.
    fn extension_of<'a>(&'a self, format: &'a str) -> String {
        let f = format.trim().to_lowercase();
        if f.contains('/') {
            let mime = f.split(';').next().unwrap_or("").trim();
            return self
                .mime_aliases
                .iter()
                .find(|(m, _)| m.eq_ignore_ascii_case(mime))
                .map(|(_, e)| e.to_lowercase())
                .unwrap_or_default();
        }
        f.rsplit('.').next().unwrap_or("").to_string()
    }

    pub fn is_software(&self, format: &str) -> bool {
        let ext = self.extension_of(format);
        !ext.is_empty() && self.extensions.iter().any(|e| e.trim_start_matches('.').eq_ignore_ascii_case(&ext))
    }
}

pub fn detect_software_content(record: &DatasetRecord, exts: &SoftwareExtensions) -> SoftwareContent {
    let formats: Vec<&String> = record.formats.iter().filter(|f| !f.trim().is_empty()).collect();
    if formats.is_empty() {
        return SoftwareContent::NoFormatsListed;
    }
    let software = formats.iter().filter(|f| exts.is_software(f)).count();
    match software {
        0 => SoftwareContent::NoSoftwareDetected,
        n if n == formats.len() => SoftwareContent::SoftwareOnly,
        _ => SoftwareContent::MixedDataAndSoftware,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SourceTag;
    use proptest::prelude::*;

    fn rec(formats: &[&str]) -> DatasetRecord {
        let mut r = DatasetRecord::new("10.1234/x", SourceTag::DataciteGeneral);
        r.formats = formats.iter().map(|s| s.to_string()).collect();
        r
    }

    #[test]
    fn classes() {
        let e = SoftwareExtensions::default();
        assert_eq!(detect_software_content(&rec(&["csv", "py"]), &e), SoftwareContent::MixedDataAndSoftware);
        assert_eq!(detect_software_content(&rec(&["py", "ipynb"]), &e), SoftwareContent::SoftwareOnly);
        assert_eq!(detect_software_content(&rec(&[]), &e), SoftwareContent::NoFormatsListed);
        assert_eq!(detect_software_content(&rec(&["text/csv"]), &e), SoftwareContent::NoSoftwareDetected);
        assert_eq!(detect_software_content(&rec(&["analysis.R", "text/x-python"]), &e), SoftwareContent::SoftwareOnly);
        assert_eq!(detect_software_content(&rec(&[".py", "image/tiff"]), &e), SoftwareContent::MixedDataAndSoftware);
    }

    fn rank(c: SoftwareContent) -> u8 {
        match c {
            SoftwareContent::NoFormatsListed | SoftwareContent::NoSoftwareDetected => 0,
            _ => 1,
        }
    }

    proptest! {
        #[test]
        fn adding_software_never_moves_away(
            formats in prop::collection::vec(prop::sample::select(vec!["csv", "py", "tiff", "r", "ipynb", "txt", ""]), 0..6),
            add in prop::sample::select(vec!["py", "r", "ipynb"]),
        ) {
            let e = SoftwareExtensions::default();
            let before = detect_software_content(&rec(&formats), &e);
            let mut more = formats.clone();
            more.push(add);
            let after = detect_software_content(&rec(&more), &e);
            prop_assert_eq!(rank(after), 1);
            prop_assert!(rank(after) >= rank(before));
            if before == SoftwareContent::MixedDataAndSoftware {
                prop_assert_eq!(after, SoftwareContent::MixedDataAndSoftware);
            }
        }
    }
}
