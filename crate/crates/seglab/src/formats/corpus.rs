//! Verse TSV: `verse_id<TAB>tok1 tok2 ...`, one verse per line.
//!
//! Segmented corpora use the same shape with units in place of tokens.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use seglab_core::corpus::CorpusError;
use seglab_core::segmentation::{Method, SegmentedVerse};
use seglab_core::{ParallelCorpus, VerseRecord};

use crate::error::{read_to_string, write_file, Error, Result};

fn split_line<'a>(path: &Path, line_no: usize, line: &'a str) -> Result<(&'a str, &'a str)> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let (id, rest) = line
        .split_once('\t')
        .ok_or_else(|| Error::parse(path, line_no, "expected `verse_id<TAB>text`"))?;
    if id.is_empty() {
        return Err(Error::parse(path, line_no, "empty verse id"));
    }
    Ok((id, rest))
}

fn parse_records(text: &str, path: &Path, preprocessed: bool) -> Result<Vec<VerseRecord>> {
    let mut seen = BTreeSet::new();
    let mut verses = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let (id, rest) = split_line(path, line_no, line)?;
        let tokens = rest.split(' ').map(String::from).collect();
        let verse = if preprocessed {
            VerseRecord::preprocessed(id, tokens)
        } else {
            VerseRecord::new(id, tokens)
        }
        .map_err(|e| Error::parse(path, line_no, e))?;
        if !seen.insert(verse.verse_id.clone()) {
            return Err(Error::parse(
                path,
                line_no,
                CorpusError::DuplicateVerse(verse.verse_id),
            ));
        }
        verses.push(verse);
    }
    Ok(verses)
}

/// Parses a raw corpus. The UNK character is rejected.
pub fn parse_corpus(text: &str, language: &str, path: &Path) -> Result<ParallelCorpus> {
    let verses = parse_records(text, path, false)?;
    Ok(ParallelCorpus::new(language, verses)?)
}

pub fn load_corpus(path: &Path, language: &str) -> Result<ParallelCorpus> {
    parse_corpus(&read_to_string(path)?, language, path)
}

/// Parses verses that may contain the UNK character (split files).
pub fn parse_verses(text: &str, path: &Path) -> Result<Vec<VerseRecord>> {
    parse_records(text, path, true)
}

pub fn load_verses(path: &Path) -> Result<Vec<VerseRecord>> {
    parse_verses(&read_to_string(path)?, path)
}

pub fn format_verses(verses: &[VerseRecord]) -> String {
    let mut out = String::new();
    for v in verses {
        let _ = writeln!(out, "{}\t{}", v.verse_id, v.tokens.join(" "));
    }
    out
}

pub fn write_verses(path: &Path, verses: &[VerseRecord]) -> Result<()> {
    write_file(path, format_verses(verses))
}

pub fn format_segmented(verses: &[SegmentedVerse]) -> String {
    let mut out = String::new();
    for v in verses {
        let _ = writeln!(out, "{}\t{}", v.verse_id, v.units.join(" "));
    }
    out
}

pub fn write_segmented(path: &Path, verses: &[SegmentedVerse]) -> Result<()> {
    write_file(path, format_segmented(verses))
}

pub fn parse_segmented(text: &str, method: Method, path: &Path) -> Result<Vec<SegmentedVerse>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let (id, rest) = split_line(path, i + 1, line)?;
        let units: Vec<String> = rest.split(' ').map(String::from).collect();
        if units.iter().any(String::is_empty) {
            return Err(Error::parse(path, i + 1, "empty unit"));
        }
        out.push(SegmentedVerse {
            verse_id: id.to_string(),
            units,
            method,
        });
    }
    Ok(out)
}

pub fn load_segmented(path: &Path, method: Method) -> Result<Vec<SegmentedVerse>> {
    parse_segmented(&read_to_string(path)?, method, path)
}
