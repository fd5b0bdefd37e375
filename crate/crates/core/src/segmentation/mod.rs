//! Segmented-verse representation shared by every method, plus character
//! segmentation. BPE lives in [`bpe`].
//!
//! Subword methods mark every non-final unit of a word with the `@@`
//! suffix. The character method instead emits one unit per character and a
//! `_` unit between words; a literal underscore inside a word is written as
//! the unit `__` so that the two cannot be confused.

pub mod bpe;

pub use bpe::{bpe_apply, bpe_train, merge_count_for, MergeTable, END_OF_WORD};

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::corpus::{VerseRecord, CONTINUATION};

/// Word boundary unit of the character method.
pub const WORD_BOUNDARY: &str = "_";
/// Unit standing for a literal underscore character in character mode.
pub const ESCAPED_UNDERSCORE: &str = "__";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("verse `{0}` ends with a dangling continuation unit")]
    DanglingContinuation(String),
    #[error("verse `{0}` contains an empty unit")]
    EmptyUnit(String),
    #[error("verse `{0}` contains a bare continuation marker")]
    BareMarker(String),
    #[error("verse `{0}` has an empty word between boundaries")]
    EmptyWord(String),
    #[error("cannot segment an empty word")]
    EmptyInput,
    #[error("unknown segmentation method `{0}`")]
    UnknownMethod(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Char,
    Bpe,
    Morfessor,
    FstBpe,
    FstMorfessor,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Char,
        Method::Bpe,
        Method::Morfessor,
        Method::FstBpe,
        Method::FstMorfessor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Char => "char",
            Method::Bpe => "bpe",
            Method::Morfessor => "morfessor",
            Method::FstBpe => "fst_bpe",
            Method::FstMorfessor => "fst_morfessor",
        }
    }

    pub fn uses_fst(self) -> bool {
        matches!(self, Method::FstBpe | Method::FstMorfessor)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = SegmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', '+'], "_")
            .as_str()
        {
            "char" | "character" => Ok(Method::Char),
            "bpe" => Ok(Method::Bpe),
            "morfessor" => Ok(Method::Morfessor),
            "fst_bpe" => Ok(Method::FstBpe),
            "fst_morfessor" => Ok(Method::FstMorfessor),
            _ => Err(SegmentError::UnknownMethod(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedVerse {
    pub verse_id: String,
    pub units: Vec<String>,
    pub method: Method,
}

/// Anything that can split a single word into surface substrings.
pub trait WordSegmenter {
    /// Returns non-empty pieces whose concatenation is `word`.
    fn segment_word(&self, word: &str) -> Result<Vec<String>, SegmentError>;
}

impl<T: WordSegmenter + ?Sized> WordSegmenter for &T {
    fn segment_word(&self, word: &str) -> Result<Vec<String>, SegmentError> {
        (**self).segment_word(word)
    }
}

/// Appends `pieces` to `units`, marking all but the last with `@@`.
pub fn push_marked(units: &mut Vec<String>, pieces: Vec<String>) {
    let last = pieces.len().saturating_sub(1);
    for (i, mut p) in pieces.into_iter().enumerate() {
        if i < last {
            p.push_str(CONTINUATION);
        }
        units.push(p);
    }
}

/// Segments every token of `verse` with `segmenter` into marked units.
pub fn segment_with<S: WordSegmenter + ?Sized>(
    segmenter: &S,
    verse: &VerseRecord,
    method: Method,
) -> Result<SegmentedVerse, SegmentError> {
    let mut units = Vec::with_capacity(verse.tokens.len() * 2);
    for token in &verse.tokens {
        push_marked(&mut units, segmenter.segment_word(token)?);
    }
    Ok(SegmentedVerse {
        verse_id: verse.verse_id.clone(),
        units,
        method,
    })
}

pub fn char_segment(verse: &VerseRecord) -> SegmentedVerse {
    let mut units = Vec::with_capacity(verse.char_count() + verse.tokens.len());
    for (i, token) in verse.tokens.iter().enumerate() {
        if i > 0 {
            units.push(WORD_BOUNDARY.to_string());
        }
        for c in token.chars() {
            if c == '_' {
                units.push(ESCAPED_UNDERSCORE.to_string());
            } else {
                units.push(c.to_string());
            }
        }
    }
    SegmentedVerse {
        verse_id: verse.verse_id.clone(),
        units,
        method: Method::Char,
    }
}

/// Reconstructs the word tokens of a segmented verse.
pub fn desegment(sv: &SegmentedVerse) -> Result<Vec<String>, SegmentError> {
    let id = || sv.verse_id.clone();
    if sv.units.iter().any(String::is_empty) {
        return Err(SegmentError::EmptyUnit(id()));
    }
    let mut tokens = Vec::new();
    if sv.method == Method::Char {
        let mut word = String::new();
        for unit in &sv.units {
            match unit.as_str() {
                WORD_BOUNDARY => {
                    if word.is_empty() {
                        return Err(SegmentError::EmptyWord(id()));
                    }
                    tokens.push(core::mem::take(&mut word));
                }
                ESCAPED_UNDERSCORE => word.push('_'),
                other => word.push_str(other),
            }
        }
        if word.is_empty() {
            if !sv.units.is_empty() {
                return Err(SegmentError::EmptyWord(id()));
            }
        } else {
            tokens.push(word);
        }
        return Ok(tokens);
    }
    let mut word = String::new();
    let mut open = false;
    for unit in &sv.units {
        if unit == CONTINUATION {
            return Err(SegmentError::BareMarker(id()));
        }
        match unit.strip_suffix(CONTINUATION) {
            Some(stem) => {
                word.push_str(stem);
                open = true;
            }
            None => {
                word.push_str(unit);
                tokens.push(core::mem::take(&mut word));
                open = false;
            }
        }
    }
    if open {
        return Err(SegmentError::DanglingContinuation(id()));
    }
    Ok(tokens)
}
