//! Open-vocabulary segment n-gram model with interpolated absolute
//! discounting and Kneser–Ney continuation counts, scored per verse.
//!
//! Every verse is an independent sequence: `order − 1` BOS symbols, the
//! units, then one end-of-verse (EOV) event. The top order uses raw
//! counts, lower orders use the number of distinct left extensions, and
//! the unigram level reserves `d·T/(N + d·T)` for the unknown segment.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::segmentation::{Method, SegmentedVerse};

pub const BOS: u32 = 0;
pub const EOV: u32 = 1;
pub const UNK: u32 = 2;
pub const BOS_NAME: &str = "<v>";
pub const EOV_NAME: &str = "</v>";
pub const UNK_SEG: &str = "<unk>";
const RESERVED: usize = 3;

pub const DEFAULT_ORDER: usize = 5;
pub const DEFAULT_DISCOUNT: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LmError {
    #[error("model order must be at least 1")]
    ZeroOrder,
    #[error("discount {0} is outside (0, 1)")]
    BadDiscount(f64),
    #[error("no training verses")]
    EmptyTrain,
    #[error("no test verses")]
    EmptyTest,
    #[error("n-gram of length {found} does not match order {order}")]
    NgramLength { found: usize, order: usize },
    #[error("n-gram refers to unknown id {0}")]
    UnknownId(u32),
    #[error("vocabulary must start with the reserved symbols")]
    BadVocabulary,
}

#[derive(Debug, Clone, PartialEq, Default)]
struct ContextStats {
    total: u64,
    followers: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    order: usize,
    discount: f64,
    vocab: Vec<String>,
    ids: BTreeMap<String, u32>,
    // levels[k - 1] holds order-k statistics keyed by the k−1 context.
    levels: Vec<BTreeMap<Vec<u32>, ContextStats>>,
    ngrams: BTreeMap<Vec<u32>, u64>,
}

fn check_params(order: usize, discount: f64) -> Result<(), LmError> {
    if order == 0 {
        return Err(LmError::ZeroOrder);
    }
    if !(discount > 0.0 && discount < 1.0) {
        return Err(LmError::BadDiscount(discount));
    }
    Ok(())
}

pub fn train_lm(
    train: &[SegmentedVerse],
    order: usize,
    discount: f64,
) -> Result<LanguageModel, LmError> {
    check_params(order, discount)?;
    if train.is_empty() {
        return Err(LmError::EmptyTrain);
    }
    let units: BTreeSet<&str> = train
        .iter()
        .flat_map(|sv| sv.units.iter().map(String::as_str))
        .collect();
    let mut vocab: Vec<String> = [BOS_NAME, EOV_NAME, UNK_SEG]
        .iter()
        .map(|s| s.to_string())
        .collect();
    vocab.extend(units.into_iter().map(String::from));
    let ids = index(&vocab);
    let mut ngrams: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for sv in train {
        let seq = padded(&ids, &sv.units, order);
        for window in seq.windows(order) {
            *ngrams.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    LanguageModel::from_ngram_counts(order, discount, vocab, ngrams)
}

fn index(vocab: &[String]) -> BTreeMap<String, u32> {
    vocab
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect()
}

fn padded(ids: &BTreeMap<String, u32>, units: &[String], order: usize) -> Vec<u32> {
    let mut seq = Vec::with_capacity(units.len() + order);
    seq.resize(order - 1, BOS);
    seq.extend(units.iter().map(|u| ids.get(u).copied().unwrap_or(UNK)));
    seq.push(EOV);
    seq
}

impl LanguageModel {
    /// Rebuilds a model from its vocabulary and raw top-order n-gram
    /// counts. Lower-order continuation counts are derived from the
    /// distinct suffixes of those n-grams.
    pub fn from_ngram_counts(
        order: usize,
        discount: f64,
        vocab: Vec<String>,
        ngrams: BTreeMap<Vec<u32>, u64>,
    ) -> Result<Self, LmError> {
        check_params(order, discount)?;
        if vocab.len() < RESERVED
            || vocab[BOS as usize] != BOS_NAME
            || vocab[EOV as usize] != EOV_NAME
            || vocab[UNK as usize] != UNK_SEG
        {
            return Err(LmError::BadVocabulary);
        }
        for (g, _) in &ngrams {
            if g.len() != order {
                return Err(LmError::NgramLength {
                    found: g.len(),
                    order,
                });
            }
            if let Some(&bad) = g.iter().find(|&&id| id as usize >= vocab.len()) {
                return Err(LmError::UnknownId(bad));
            }
        }
        let mut levels: Vec<BTreeMap<Vec<u32>, ContextStats>> = alloc::vec![BTreeMap::new(); order];
        for (g, &count) in &ngrams {
            let stats = levels[order - 1]
                .entry(g[..order - 1].to_vec())
                .or_default();
            stats.total += count;
            *stats.followers.entry(g[order - 1]).or_insert(0) += count;
        }
        // Distinct (k+1)-grams are the distinct length-(k+1) suffixes of
        // the top-order n-grams; each contributes one continuation count
        // to the k-gram it ends with.
        for k in (1..order).rev() {
            let suffixes: BTreeSet<&[u32]> = ngrams.keys().map(|g| &g[order - k - 1..]).collect();
            for s in suffixes {
                let stats = levels[k - 1].entry(s[1..k].to_vec()).or_default();
                stats.total += 1;
                *stats.followers.entry(s[k]).or_insert(0) += 1;
            }
        }
        Ok(LanguageModel {
            order,
            discount,
            ids: index(&vocab),
            vocab,
            levels,
            ngrams,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Vocabulary indexed by id; the first three entries are BOS, EOV
    /// and the unknown segment.
    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Raw top-order n-gram counts.
    pub fn ngram_counts(&self) -> &BTreeMap<Vec<u32>, u64> {
        &self.ngrams
    }

    pub fn id(&self, unit: &str) -> u32 {
        self.ids.get(unit).copied().unwrap_or(UNK)
    }

    /// Ids that can be predicted: everything except BOS.
    pub fn predictable(&self) -> impl Iterator<Item = u32> {
        1..self.vocab.len() as u32
    }

    /// `p(word | context)`; only the last `order − 1` context ids matter
    /// and shorter contexts are BOS-padded on the left.
    pub fn prob(&self, context: &[u32], word: u32) -> f64 {
        let need = self.order - 1;
        let mut ctx: Vec<u32> = Vec::with_capacity(need);
        if context.len() < need {
            ctx.resize(need - context.len(), BOS);
            ctx.extend_from_slice(context);
        } else {
            ctx.extend_from_slice(&context[context.len() - need..]);
        }
        self.prob_at(self.order, &ctx, word)
    }

    fn prob_at(&self, k: usize, ctx: &[u32], word: u32) -> f64 {
        let d = self.discount;
        if k == 1 {
            let Some(stats) = self.levels[0].get(&[][..]) else {
                return if word == UNK { 1.0 } else { 0.0 };
            };
            let n = stats.total as f64;
            let types = stats.followers.len() as f64;
            let denom = n + d * types;
            if word == UNK {
                return d * types / denom;
            }
            return stats.followers.get(&word).copied().unwrap_or(0) as f64 / denom;
        }
        let lower = self.prob_at(k - 1, &ctx[1..], word);
        match self.levels[k - 1].get(ctx) {
            None => lower,
            Some(stats) => {
                let c = stats.followers.get(&word).copied().unwrap_or(0) as f64;
                let total = stats.total as f64;
                let types = stats.followers.len() as f64;
                ((c - d).max(0.0) + d * types * lower) / total
            }
        }
    }

    /// Surprisal of a verse in bits, including the end-of-verse event.
    pub fn verse_nll(&self, sv: &SegmentedVerse) -> f64 {
        let seq = padded(&self.ids, &sv.units, self.order);
        let need = self.order - 1;
        let mut bits = 0.0;
        for i in need..seq.len() {
            bits -= libm::log2(self.prob_at(self.order, &seq[i - need..i], seq[i]));
        }
        bits
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurprisalReport {
    pub language_code: String,
    pub method: Method,
    pub per_verse: Vec<(String, f64)>,
    /// Mean bits per verse.
    pub mean: f64,
}

/// Neumaier-compensated sum in slice order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn surprisal_per_verse(
    lm: &LanguageModel,
    test: &[SegmentedVerse],
    language_code: &str,
    method: Method,
) -> Result<SurprisalReport, LmError> {
    if test.is_empty() {
        return Err(LmError::EmptyTest);
    }
    let per_verse: Vec<(String, f64)> = test
        .iter()
        .map(|sv| (sv.verse_id.clone(), lm.verse_nll(sv)))
        .collect();
    let mean = compensated_sum(per_verse.iter().map(|(_, b)| *b)) / per_verse.len() as f64;
    Ok(SurprisalReport {
        language_code: language_code.to_string(),
        method,
        per_verse,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sv(units: &[&str]) -> SegmentedVerse {
        SegmentedVerse {
            verse_id: "v".into(),
            units: units.iter().map(|u| u.to_string()).collect(),
            method: Method::Bpe,
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let t = vec![sv(&["a"])];
        assert_eq!(train_lm(&t, 0, 0.5), Err(LmError::ZeroOrder));
        assert_eq!(train_lm(&t, 2, 1.0), Err(LmError::BadDiscount(1.0)));
        assert_eq!(train_lm(&[], 2, 0.5), Err(LmError::EmptyTrain));
    }

    #[test]
    fn unigram_unknown_mass() {
        // Events: a a a EOV → counts {a: 3, EOV: 1}, N = 4, T = 2.
        let lm = train_lm(&[sv(&["a", "a", "a"])], 1, 0.75).unwrap();
        let eps = 0.75 * 2.0 / (4.0 + 0.75 * 2.0);
        let a = lm.id("a");
        assert!((lm.prob(&[], a) - 0.75 * (1.0 - eps)).abs() < 1e-15);
        assert!((lm.prob(&[], UNK) - eps).abs() < 1e-15);
        assert_eq!(lm.id("zzz"), UNK);
    }

    #[test]
    fn one_eov_per_verse() {
        let data = vec![sv(&["a", "b"]), sv(&["b"]), sv(&["c", "a", "a"])];
        let lm = train_lm(&data, 3, 0.5).unwrap();
        let eov: u64 = lm
            .ngram_counts()
            .iter()
            .filter(|(g, _)| *g.last().unwrap() == EOV)
            .map(|(_, c)| *c)
            .sum();
        assert_eq!(eov, 3);
    }

    #[test]
    fn equal_unigram_counts_give_closed_form() {
        // Counts {a: 2, b: 2, EOV: 2}: every seen unit has p = 2/(6 + 3d).
        let d = 0.5;
        let lm = train_lm(&[sv(&["a", "b"]), sv(&["b", "a"])], 1, d).unwrap();
        let p = 2.0 / (6.0 + 3.0 * d);
        let k = 3.0;
        let nll = lm.verse_nll(&sv(&["a", "b", "a"]));
        assert!((nll - (k + 1.0) * -libm::log2(p)).abs() < 1e-12);
    }

    #[test]
    fn repeated_verse_matches_hand_computation() {
        // Verse [a, b] repeated r times, order 3. Unigram continuation
        // counts are 1 each for a, b, EOV → p1 = 1/(3 + 3d). Every
        // context at orders 2 and 3 has exactly one follower.
        let r = 20u64;
        let d = 0.75;
        let data: Vec<SegmentedVerse> = (0..r).map(|_| sv(&["a", "b"])).collect();
        let lm = train_lm(&data, 3, d).unwrap();
        let p1 = 1.0 / (3.0 + 3.0 * d);
        let p2 = (1.0 - d) + d * p1;
        let p3 = (r as f64 - d) / r as f64 + d / r as f64 * p2;
        let expected = -3.0 * libm::log2(p3);
        let got = lm.verse_nll(&sv(&["a", "b"]));
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!(got > 0.0 && got < 0.1);
    }

    #[test]
    fn normalised_over_vocabulary() {
        let data = vec![
            sv(&["a", "b", "c"]),
            sv(&["b", "c", "a", "a"]),
            sv(&["c"]),
            sv(&["a", "c", "b"]),
        ];
        for order in 1..=4 {
            let lm = train_lm(&data, order, 0.6).unwrap();
            let contexts: [&[u32]; 4] = [&[], &[3], &[4, 5], &[BOS, 5, 3]];
            for ctx in contexts {
                let total: f64 = lm.predictable().map(|w| lm.prob(ctx, w)).sum();
                assert!(
                    (total - 1.0).abs() < 1e-9,
                    "order {order} ctx {ctx:?}: {total}"
                );
            }
        }
    }

    #[test]
    fn report_mean() {
        let lm = train_lm(&[sv(&["a", "b"])], 2, 0.5).unwrap();
        let one = surprisal_per_verse(&lm, &[sv(&["a"])], "xxx", Method::Bpe).unwrap();
        assert_eq!(one.mean, one.per_verse[0].1);
        assert!(surprisal_per_verse(&lm, &[], "xxx", Method::Bpe).is_err());
    }
}
