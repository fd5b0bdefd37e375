//! Frequency-driven byte-pair merges over characters.
//!
//! Words start as character sequences whose last symbol carries the
//! [`END_OF_WORD`] sentinel, so merges never cross word boundaries and a
//! word-final chunk is a different symbol from the same chunk mid-word.
//! The sentinel is stripped from emitted units.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::{segment_with, Method, SegmentError, SegmentedVerse, WordSegmenter};
use crate::corpus::VerseRecord;

pub const END_OF_WORD: &str = "</w>";

/// `round(fraction × types)` with halves rounded up.
pub fn merge_count_for(types: usize, fraction: f64) -> usize {
    libm::floor(types as f64 * fraction + 0.5) as usize
}

#[derive(Debug, Clone, Default)]
pub struct MergeTable {
    merges: Vec<(String, String)>,
    vocab: BTreeSet<String>,
    ids: BTreeMap<String, u32>,
    names: Vec<String>,
    // (left, right) -> (rank, merged symbol)
    ranks: BTreeMap<(u32, u32), (u32, u32)>,
}

impl PartialEq for MergeTable {
    fn eq(&self, other: &Self) -> bool {
        self.merges == other.merges && self.vocab == other.vocab
    }
}

impl MergeTable {
    /// Builds a table from an ordered merge list. The vocabulary is every
    /// symbol the merges consume or produce.
    pub fn from_merges(merges: Vec<(String, String)>) -> Self {
        Self::with_alphabet(merges, BTreeSet::new())
    }

    fn with_alphabet(merges: Vec<(String, String)>, alphabet: BTreeSet<String>) -> Self {
        let mut table = MergeTable {
            vocab: alphabet,
            ..Default::default()
        };
        for (rank, (left, right)) in merges.iter().enumerate() {
            let l = table.intern(left);
            let r = table.intern(right);
            let mut joined = left.clone();
            joined.push_str(right);
            let m = table.intern(&joined);
            table.vocab.insert(left.clone());
            table.vocab.insert(right.clone());
            table.vocab.insert(joined);
            // A repeated pair keeps its first rank.
            table.ranks.entry((l, r)).or_insert((rank as u32, m));
        }
        table.merges = merges;
        table
    }

    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(s.to_string());
        self.ids.insert(s.to_string(), id);
        id
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    /// Table restricted to its first `k` merges.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.merges.len());
        Self::from_merges(self.merges[..k].to_vec())
    }

    /// Splits one word into units (no continuation markers).
    pub fn segment(&self, word: &str) -> Vec<String> {
        let n = word.chars().count();
        let mut syms: Vec<(Option<u32>, String)> = Vec::with_capacity(n);
        for (i, c) in word.chars().enumerate() {
            let mut s = c.to_string();
            if i + 1 == n {
                s.push_str(END_OF_WORD);
            }
            syms.push((self.ids.get(&s).copied(), s));
        }
        loop {
            let mut best: Option<(u32, u32, u32, u32)> = None;
            for w in syms.windows(2) {
                if let (Some(l), Some(r)) = (w[0].0, w[1].0) {
                    if let Some(&(rank, merged)) = self.ranks.get(&(l, r)) {
                        if best.is_none_or(|b| rank < b.0) {
                            best = Some((rank, l, r, merged));
                        }
                    }
                }
            }
            let Some((_, l, r, merged)) = best else { break };
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i].0 == Some(l) && syms[i + 1].0 == Some(r) {
                    out.push((Some(merged), self.names[merged as usize].clone()));
                    i += 2;
                } else {
                    out.push(core::mem::take(&mut syms[i]));
                    i += 1;
                }
            }
            syms = out;
        }
        let mut units: Vec<String> = syms.into_iter().map(|(_, s)| s).collect();
        if let Some(last) = units.last_mut() {
            let keep = last.len() - END_OF_WORD.len();
            last.truncate(keep);
        }
        units
    }
}

impl WordSegmenter for MergeTable {
    fn segment_word(&self, word: &str) -> Result<Vec<String>, SegmentError> {
        if word.is_empty() {
            return Err(SegmentError::EmptyInput);
        }
        Ok(self.segment(word))
    }
}

pub fn bpe_apply(table: &MergeTable, verse: &VerseRecord) -> SegmentedVerse {
    segment_with(table, verse, Method::Bpe).expect("verse tokens are non-empty")
}

fn word_symbols(word: &str) -> Vec<String> {
    let n = word.chars().count();
    word.chars()
        .enumerate()
        .map(|(i, c)| {
            let mut s = c.to_string();
            if i + 1 == n {
                s.push_str(END_OF_WORD);
            }
            s
        })
        .collect()
}

struct Trainer {
    names: Vec<String>,
    ids: BTreeMap<String, u32>,
    words: Vec<(Vec<u32>, i64)>,
    pair_counts: BTreeMap<(u32, u32), i64>,
    pair_words: BTreeMap<(u32, u32), BTreeSet<usize>>,
    heap: BinaryHeap<(i64, Reverse<(String, String)>, u32, u32)>,
}

impl Trainer {
    fn intern(&mut self, s: String) -> u32 {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(s.clone(), id);
        self.names.push(s);
        id
    }

    fn push(&mut self, pair: (u32, u32)) {
        let count = self.pair_counts.get(&pair).copied().unwrap_or(0);
        if count > 0 {
            let key = (
                self.names[pair.0 as usize].clone(),
                self.names[pair.1 as usize].clone(),
            );
            self.heap.push((count, Reverse(key), pair.0, pair.1));
        }
    }

    fn add_word_pairs(&mut self, idx: usize, sign: i64, touched: &mut BTreeSet<(u32, u32)>) {
        let (ref syms, freq) = self.words[idx];
        for w in syms.windows(2) {
            let pair = (w[0], w[1]);
            *self.pair_counts.entry(pair).or_insert(0) += sign * freq;
            if sign > 0 {
                self.pair_words.entry(pair).or_default().insert(idx);
            }
            touched.insert(pair);
        }
    }
}

/// Learns up to `merge_count` merges from the training verses.
///
/// Each step merges the most frequent adjacent pair; equal frequencies go
/// to the lexicographically smallest `(left, right)`. Training stops early
/// once no pair occurs at least twice.
pub fn bpe_train(train: &[VerseRecord], merge_count: usize) -> MergeTable {
    let mut word_freq: BTreeMap<&str, i64> = BTreeMap::new();
    for v in train {
        for t in &v.tokens {
            *word_freq.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let mut tr = Trainer {
        names: Vec::new(),
        ids: BTreeMap::new(),
        words: Vec::with_capacity(word_freq.len()),
        pair_counts: BTreeMap::new(),
        pair_words: BTreeMap::new(),
        heap: BinaryHeap::new(),
    };
    let mut alphabet = BTreeSet::new();
    for (word, &freq) in &word_freq {
        let syms = word_symbols(word)
            .into_iter()
            .map(|s| {
                alphabet.insert(s.clone());
                tr.intern(s)
            })
            .collect();
        tr.words.push((syms, freq));
    }
    let mut touched = BTreeSet::new();
    for idx in 0..tr.words.len() {
        tr.add_word_pairs(idx, 1, &mut touched);
    }
    for pair in core::mem::take(&mut touched) {
        tr.push(pair);
    }

    let mut merges = Vec::with_capacity(merge_count);
    while merges.len() < merge_count {
        let Some((count, Reverse((left, right)), l, r)) = tr.heap.pop() else {
            break;
        };
        if tr.pair_counts.get(&(l, r)).copied() != Some(count) {
            continue;
        }
        if count < 2 {
            break;
        }
        let mut joined = left.clone();
        joined.push_str(&right);
        let merged = tr.intern(joined);
        merges.push((left, right));

        let affected: Vec<usize> = tr
            .pair_words
            .get(&(l, r))
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for idx in affected {
            let contains = tr.words[idx].0.windows(2).any(|w| w[0] == l && w[1] == r);
            if !contains {
                continue;
            }
            tr.add_word_pairs(idx, -1, &mut touched);
            let syms = &tr.words[idx].0;
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == l && syms[i + 1] == r {
                    out.push(merged);
                    i += 2;
                } else {
                    out.push(syms[i]);
                    i += 1;
                }
            }
            tr.words[idx].0 = out;
            tr.add_word_pairs(idx, 1, &mut touched);
        }
        for pair in core::mem::take(&mut touched) {
            tr.push(pair);
        }
    }
    MergeTable::with_alphabet(merges, alphabet)
}
