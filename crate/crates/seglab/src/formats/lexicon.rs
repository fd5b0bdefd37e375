//! Morph lexicon: `morph<TAB>count`, sorted by morph.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use seglab_core::MorphLexicon;

use crate::error::{read_to_string, write_file, Error, Result};

/// `oov_penalty` overrides the default per-character cost of strings
/// outside the lexicon, as in training.
pub fn parse_lexicon(text: &str, oov_penalty: Option<f64>, path: &Path) -> Result<MorphLexicon> {
    let mut morphs = BTreeMap::new();
    for (line_no, line) in super::content_lines(text) {
        let (morph, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, line_no, "expected `morph<TAB>count`"))?;
        let count: u64 = count
            .parse()
            .map_err(|e| Error::parse(path, line_no, format!("bad count: {e}")))?;
        if morph.is_empty() || count == 0 {
            return Err(Error::parse(path, line_no, "empty morph or zero count"));
        }
        if morphs.insert(morph.to_string(), count).is_some() {
            return Err(Error::parse(
                path,
                line_no,
                format!("duplicate morph `{morph}`"),
            ));
        }
    }
    Ok(MorphLexicon::from_counts(morphs, oov_penalty))
}

pub fn load_lexicon(path: &Path, oov_penalty: Option<f64>) -> Result<MorphLexicon> {
    parse_lexicon(&read_to_string(path)?, oov_penalty, path)
}

pub fn format_lexicon(lexicon: &MorphLexicon) -> String {
    let mut out = String::new();
    for (m, c) in lexicon.morphs() {
        let _ = writeln!(out, "{m}\t{c}");
    }
    out
}

pub fn write_lexicon(path: &Path, lexicon: &MorphLexicon) -> Result<()> {
    write_file(path, format_lexicon(lexicon))
}
