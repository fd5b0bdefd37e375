//! Text formats for corpora, trained models and transducers.
//!
//! Parsers take the file contents plus the path used in error messages;
//! the `load_*` wrappers read the file first. Line numbers are 1-based.

pub mod att;
pub mod corpus;
pub mod lexicon;
pub mod lm;
pub mod merges;
pub mod typology;

/// Content lines with their 1-based numbers, skipping blank lines and
/// `#` comments.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}
