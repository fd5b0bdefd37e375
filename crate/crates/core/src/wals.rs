//! Typological feature values per language and their join with
//! per-language surprisal.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::stats::GroupedSample;

/// The morphology chapters in scope, as `(id, name)`.
pub const FEATURE_CATALOG: [(&str, &str); 12] = [
    ("20A", "Fusion of Selected Inflectional Formatives"),
    ("21A", "Exponence of Selected Inflectional Formatives"),
    ("21B", "Exponence of Tense-Aspect-Mood Inflection"),
    ("22A", "Inflectional Synthesis of the Verb"),
    ("23A", "Locus of Marking in the Clause"),
    ("24A", "Locus of Marking in Possessive Noun Phrases"),
    ("25A", "Locus of Marking: Whole-language Typology"),
    ("25B", "Zero Marking of A and P Arguments"),
    ("26A", "Prefixing vs. Suffixing in Inflectional Morphology"),
    ("27A", "Reduplication"),
    ("28A", "Case Syncretism"),
    ("29A", "Syncretism in Verbal Person/Number Marking"),
];

pub fn feature_name(id: &str) -> Option<&'static str> {
    FEATURE_CATALOG
        .iter()
        .find(|(fid, _)| *fid == id)
        .map(|(_, name)| *name)
}

pub fn feature_ids() -> impl Iterator<Item = &'static str> {
    FEATURE_CATALOG.iter().map(|(id, _)| *id)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypologyError {
    #[error("unknown feature id {0:?}")]
    UnknownFeature(String),
    #[error("duplicate value for language {language:?}, feature {feature}")]
    Duplicate { language: String, feature: String },
    #[error("empty value for language {language:?}, feature {feature}")]
    EmptyValue { language: String, feature: String },
    #[error("empty language code")]
    EmptyLanguage,
}

/// Feature values keyed by language code. An absent key means the value
/// is unknown.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypologyTable {
    rows: BTreeMap<String, BTreeMap<String, String>>,
}

impl TypologyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        language: &str,
        feature: &str,
        value: &str,
    ) -> Result<(), TypologyError> {
        if feature_name(feature).is_none() {
            return Err(TypologyError::UnknownFeature(String::from(feature)));
        }
        if language.is_empty() {
            return Err(TypologyError::EmptyLanguage);
        }
        if value.is_empty() {
            return Err(TypologyError::EmptyValue {
                language: String::from(language),
                feature: String::from(feature),
            });
        }
        let row = self.rows.entry(String::from(language)).or_default();
        if row.contains_key(feature) {
            return Err(TypologyError::Duplicate {
                language: String::from(language),
                feature: String::from(feature),
            });
        }
        row.insert(String::from(feature), String::from(value));
        Ok(())
    }

    pub fn get(&self, language: &str, feature: &str) -> Option<&str> {
        self.rows.get(language)?.get(feature).map(String::as_str)
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// `(language, feature, value)` in sorted order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.rows.iter().flat_map(|(lang, row)| {
            row.iter()
                .map(move |(f, v)| (lang.as_str(), f.as_str(), v.as_str()))
        })
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Languages that did not make it into a feature's groups.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Exclusions {
    pub included: Vec<String>,
    pub missing_feature: Vec<String>,
    pub missing_surprisal: Vec<String>,
}

impl Exclusions {
    pub fn total(&self) -> usize {
        self.included.len() + self.missing_feature.len() + self.missing_surprisal.len()
    }
}

/// Groups surprisal values by the language's value for `feature`.
///
/// `languages` is the universe being accounted for; each lands in exactly
/// one of the three [`Exclusions`] lists. A language lacking both
/// surprisal and the feature counts as missing surprisal.
pub fn group_by_feature<'a>(
    table: &TypologyTable,
    feature: &str,
    surprisals: &BTreeMap<String, f64>,
    languages: impl IntoIterator<Item = &'a str>,
) -> Result<(GroupedSample, Exclusions), TypologyError> {
    if feature_name(feature).is_none() {
        return Err(TypologyError::UnknownFeature(String::from(feature)));
    }
    let mut gs = GroupedSample {
        feature: String::from(feature),
        groups: BTreeMap::new(),
    };
    let mut ex = Exclusions::default();
    let mut seen: Vec<&str> = languages.into_iter().collect();
    seen.sort_unstable();
    seen.dedup();
    for lang in seen {
        let Some(&l) = surprisals.get(lang) else {
            ex.missing_surprisal.push(String::from(lang));
            continue;
        };
        match table.get(lang, feature) {
            Some(value) => {
                gs.groups.entry(String::from(value)).or_default().push(l);
                ex.included.push(String::from(lang));
            }
            None => ex.missing_feature.push(String::from(lang)),
        }
    }
    Ok((gs, ex))
}
