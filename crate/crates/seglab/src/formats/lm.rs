//! Language model text format. The model is fully determined by its
//! order, discount, vocabulary and top-order n-gram counts:
//!
//! ```text
//! seglab-ngram
//! order 5
//! discount 0.75
//! vocab <V>
//! <one unit per line, in id order>
//! ngrams <M>
//! <id id ... id><TAB><count>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use seglab_core::LanguageModel;

use crate::error::{read_to_string, write_file, Error, Result};

const MAGIC: &str = "seglab-ngram";

pub fn format_lm(lm: &LanguageModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "order {}", lm.order());
    let _ = writeln!(out, "discount {}", lm.discount());
    let _ = writeln!(out, "vocab {}", lm.vocab().len());
    for unit in lm.vocab() {
        let _ = writeln!(out, "{unit}");
    }
    let _ = writeln!(out, "ngrams {}", lm.ngram_counts().len());
    for (gram, count) in lm.ngram_counts() {
        let ids: Vec<String> = gram.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{}\t{count}", ids.join(" "));
    }
    out
}

pub fn write_lm(path: &Path, lm: &LanguageModel) -> Result<()> {
    write_file(path, format_lm(lm))
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    path: &'a Path,
    at: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        let (i, line) = self.inner.next().ok_or_else(|| {
            Error::parse(
                self.path,
                self.at + 1,
                format!("unexpected end of file, expected {what}"),
            )
        })?;
        self.at = i + 1;
        Ok(line)
    }

    fn err(&self, message: impl ToString) -> Error {
        Error::parse(self.path, self.at, message)
    }

    fn header<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let line = self.next(key)?;
        let value = line
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected `{key} <value>`")))?;
        value
            .parse()
            .map_err(|e| self.err(format!("bad {key}: {e}")))
    }
}

pub fn parse_lm(text: &str, path: &Path) -> Result<LanguageModel> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        path,
        at: 0,
    };
    if lines.next("header")? != MAGIC {
        return Err(lines.err("not a seglab n-gram model"));
    }
    let order: usize = lines.header("order")?;
    let discount: f64 = lines.header("discount")?;
    let vocab_len: usize = lines.header("vocab")?;
    let mut vocab = Vec::with_capacity(vocab_len);
    for _ in 0..vocab_len {
        vocab.push(lines.next("vocabulary entry")?.to_string());
    }
    let ngram_len: usize = lines.header("ngrams")?;
    let mut ngrams = BTreeMap::new();
    for _ in 0..ngram_len {
        let line = lines.next("n-gram")?;
        let (ids, count) = line
            .split_once('\t')
            .ok_or_else(|| lines.err("expected `ids<TAB>count`"))?;
        let gram = ids
            .split(' ')
            .map(str::parse::<u32>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| lines.err(format!("bad id: {e}")))?;
        let count: u64 = count
            .parse()
            .map_err(|e| lines.err(format!("bad count: {e}")))?;
        ngrams.insert(gram, count);
    }
    Ok(LanguageModel::from_ngram_counts(
        order, discount, vocab, ngrams,
    )?)
}

pub fn load_lm(path: &Path) -> Result<LanguageModel> {
    parse_lm(&read_to_string(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use seglab_core::lm::train_lm;
    use seglab_core::segmentation::char_segment;
    use seglab_core::VerseRecord;

    #[test]
    fn round_trip_preserves_scores() {
        let train: Vec<_> = ["the cat sat", "the dog sat down", "a cat ran"]
            .iter()
            .enumerate()
            .map(|(i, t)| char_segment(&VerseRecord::from_text(i.to_string(), t).unwrap()))
            .collect();
        let lm = train_lm(&train, 4, 0.6).unwrap();
        let text = format_lm(&lm);
        let back = parse_lm(&text, Path::new("lm")).unwrap();
        assert_eq!(format_lm(&back), text);
        let probe = char_segment(&VerseRecord::from_text("x", "the cow sat").unwrap());
        assert_eq!(
            back.verse_nll(&probe).to_bits(),
            lm.verse_nll(&probe).to_bits()
        );
        assert!(parse_lm("nope\n", Path::new("lm")).is_err());
    }
}
