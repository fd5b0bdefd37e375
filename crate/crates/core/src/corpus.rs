//! Verse-aligned corpora, the deterministic block split, and singleton
//! character replacement.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// Replacement for characters that occur at most once in training data.
pub const UNK_CHAR: char = '\u{2047}';

/// Continuation marker carried by non-final subword units.
pub const CONTINUATION: &str = "@@";

/// Verses per split block.
pub const BLOCK_LEN: usize = 30;
/// Leading verses of each block that go to the development set.
pub const DEV_PER_BLOCK: usize = 5;
/// Verses following the dev slice that go to the test set.
pub const TEST_PER_BLOCK: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("verse `{0}` has no tokens")]
    EmptyVerse(String),
    #[error("verse `{verse}` has an empty token")]
    EmptyToken { verse: String },
    #[error("token `{token}` in verse `{verse}` contains whitespace")]
    WhitespaceInToken { verse: String, token: String },
    #[error("token `{token}` in verse `{verse}` contains reserved symbol `{symbol}`")]
    ReservedSymbol {
        verse: String,
        token: String,
        symbol: &'static str,
    },
    #[error("duplicate verse id `{0}`")]
    DuplicateVerse(String),
    #[error("corpus is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerseRecord {
    pub verse_id: String,
    pub tokens: Vec<String>,
}

impl VerseRecord {
    /// Builds a verse, checking that every token is a non-empty string
    /// without whitespace or reserved symbols.
    pub fn new(verse_id: impl Into<String>, tokens: Vec<String>) -> Result<Self, CorpusError> {
        Self::checked(verse_id.into(), tokens, false)
    }

    /// Like [`VerseRecord::new`] but accepts [`UNK_CHAR`], for reading
    /// back verses that have already been preprocessed.
    pub fn preprocessed(
        verse_id: impl Into<String>,
        tokens: Vec<String>,
    ) -> Result<Self, CorpusError> {
        Self::checked(verse_id.into(), tokens, true)
    }

    fn checked(
        verse_id: String,
        tokens: Vec<String>,
        allow_unk: bool,
    ) -> Result<Self, CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::EmptyVerse(verse_id));
        }
        for token in &tokens {
            check_token(&verse_id, token, allow_unk)?;
        }
        Ok(Self { verse_id, tokens })
    }

    /// Convenience constructor splitting `text` on single spaces.
    pub fn from_text(verse_id: impl Into<String>, text: &str) -> Result<Self, CorpusError> {
        let tokens = text.split(' ').map(String::from).collect();
        Self::new(verse_id, tokens)
    }

    pub fn char_count(&self) -> usize {
        self.tokens.iter().map(|t| t.chars().count()).sum()
    }
}

fn check_token(verse: &str, token: &str, allow_unk: bool) -> Result<(), CorpusError> {
    if token.is_empty() {
        return Err(CorpusError::EmptyToken {
            verse: verse.into(),
        });
    }
    if token.chars().any(char::is_whitespace) {
        return Err(CorpusError::WhitespaceInToken {
            verse: verse.into(),
            token: token.into(),
        });
    }
    if token.contains(CONTINUATION) {
        return Err(CorpusError::ReservedSymbol {
            verse: verse.into(),
            token: token.into(),
            symbol: CONTINUATION,
        });
    }
    if !allow_unk && token.contains(UNK_CHAR) {
        return Err(CorpusError::ReservedSymbol {
            verse: verse.into(),
            token: token.into(),
            symbol: "\u{2047}",
        });
    }
    Ok(())
}

/// One language's verses in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub language_code: String,
    verses: Vec<VerseRecord>,
}

impl ParallelCorpus {
    pub fn new(
        language_code: impl Into<String>,
        verses: Vec<VerseRecord>,
    ) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for v in &verses {
            if !seen.insert(v.verse_id.as_str()) {
                return Err(CorpusError::DuplicateVerse(v.verse_id.clone()));
            }
        }
        Ok(Self {
            language_code: language_code.into(),
            verses,
        })
    }

    pub fn verses(&self) -> &[VerseRecord] {
        &self.verses
    }

    pub fn len(&self) -> usize {
        self.verses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verses.is_empty()
    }

    pub fn into_verses(self) -> Vec<VerseRecord> {
        self.verses
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DataSplit {
    pub train: Vec<VerseRecord>,
    pub dev: Vec<VerseRecord>,
    pub test: Vec<VerseRecord>,
}

impl DataSplit {
    pub fn len(&self) -> usize {
        self.train.len() + self.dev.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which split a verse at `position` lands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPart {
    Train,
    Dev,
    Test,
}

/// Assignment for the verse at `position` in a corpus of `n` verses.
///
/// Complete blocks of 30 give 5 dev, 5 test and 20 train verses; a
/// trailing incomplete block goes entirely to train.
pub fn split_part(position: usize, n: usize) -> SplitPart {
    let complete = (n / BLOCK_LEN) * BLOCK_LEN;
    if position >= complete {
        return SplitPart::Train;
    }
    match position % BLOCK_LEN {
        p if p < DEV_PER_BLOCK => SplitPart::Dev,
        p if p < DEV_PER_BLOCK + TEST_PER_BLOCK => SplitPart::Test,
        _ => SplitPart::Train,
    }
}

pub fn split_corpus(corpus: &ParallelCorpus) -> Result<DataSplit, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::Empty);
    }
    let n = corpus.len();
    let mut split = DataSplit::default();
    for (i, verse) in corpus.verses().iter().enumerate() {
        let target = match split_part(i, n) {
            SplitPart::Train => &mut split.train,
            SplitPart::Dev => &mut split.dev,
            SplitPart::Test => &mut split.test,
        };
        target.push(verse.clone());
    }
    Ok(split)
}

/// Character frequencies over the tokens of `verses`.
pub fn char_counts(verses: &[VerseRecord]) -> BTreeMap<char, u64> {
    let mut counts = BTreeMap::new();
    for verse in verses {
        for token in &verse.tokens {
            for c in token.chars() {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Replaces every character seen at most once in `split.train` (including
/// characters absent from train) with [`UNK_CHAR`], in all three parts.
pub fn unk_singleton_chars(split: &DataSplit) -> DataSplit {
    let counts = char_counts(&split.train);
    let keep = |c: char| counts.get(&c).is_some_and(|&n| n > 1);
    let map = |verses: &[VerseRecord]| -> Vec<VerseRecord> {
        verses
            .iter()
            .map(|v| VerseRecord {
                verse_id: v.verse_id.clone(),
                tokens: v
                    .tokens
                    .iter()
                    .map(|t| {
                        t.chars()
                            .map(|c| if keep(c) { c } else { UNK_CHAR })
                            .collect()
                    })
                    .collect(),
            })
            .collect()
    };
    DataSplit {
        train: map(&split.train),
        dev: map(&split.dev),
        test: map(&split.test),
    }
}

/// All tokens of `verses` in corpus order.
pub fn token_stream(verses: &[VerseRecord]) -> Vec<&str> {
    verses
        .iter()
        .flat_map(|v| v.tokens.iter().map(String::as_str))
        .collect()
}
