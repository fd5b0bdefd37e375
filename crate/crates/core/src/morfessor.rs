//! Unsupervised morph lexicon learned by minimum description length.
//!
//! The total cost of a lexicon is the corpus coding cost
//! `−Σ count(m)·log₂(count(m)/total)` plus the lexicon cost, which spells
//! out every distinct morph character by character (each character costs
//! `−log₂` of its training frequency) followed by an end-of-morph symbol.
//!
//! Training starts with every word type as its own morph and repeatedly
//! re-analyses word types in a seeded random order. A word is analysed by
//! recursive binary splitting: keep the string whole, or split it at the
//! point that gives the lowest total cost and recurse into both halves.
//! A new analysis replaces the old one only if the total cost does not go
//! up.
//!
//! Each epoch then tries affix moves: for a string shared as a proper
//! suffix (or prefix) by at least two morphs, split it off all of them at
//! once. Single-word moves cannot make the first split of a paradigm,
//! because both halves are new morphs until another word reuses them; an
//! affix move pays the new lexicon entries once for the whole group. Affix
//! moves are kept only when they lower the total cost.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::VerseRecord;
use crate::segmentation::{SegmentError, WordSegmenter};

/// How often a word contributes to morph counts during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Each distinct word type counts once.
    Types,
    /// Each running token counts once.
    Tokens,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorfessorConfig {
    pub count_mode: CountMode,
    pub seed: u64,
    /// Stop once an epoch improves the cost by less than this fraction.
    pub convergence: f64,
    pub max_epochs: usize,
    /// Bits per character for substrings outside the lexicon. `None`
    /// means `log₂(alphabet_size + 1)`.
    pub oov_penalty: Option<f64>,
}

impl Default for MorfessorConfig {
    fn default() -> Self {
        Self {
            count_mode: CountMode::Types,
            seed: 42,
            convergence: 0.005,
            max_epochs: 50,
            oov_penalty: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphLexicon {
    morphs: BTreeMap<String, u64>,
    total: u64,
    constructions: BTreeMap<String, Vec<String>>,
    char_counts: BTreeMap<char, u64>,
    char_total: u64,
    oov_penalty: f64,
    cost_history: Vec<f64>,
}

fn xlog2x(n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        let x = n as f64;
        x * libm::log2(x)
    }
}

fn char_cost_table(char_counts: &BTreeMap<char, u64>) -> BTreeMap<char, f64> {
    let total: u64 = char_counts.values().sum();
    char_counts
        .iter()
        .map(|(&c, &n)| (c, -libm::log2(n as f64 / total as f64)))
        .collect()
}

fn default_penalty(alphabet: usize) -> f64 {
    libm::log2(alphabet as f64 + 1.0)
}

impl MorphLexicon {
    /// Rebuilds a lexicon from morph counts alone (as stored on disk).
    /// Character statistics are recovered from the counts because every
    /// training word is covered by its morphs.
    pub fn from_counts(morphs: BTreeMap<String, u64>, oov_penalty: Option<f64>) -> Self {
        let morphs: BTreeMap<String, u64> = morphs.into_iter().filter(|(_, c)| *c > 0).collect();
        let mut char_counts = BTreeMap::new();
        for (m, &c) in &morphs {
            for ch in m.chars() {
                *char_counts.entry(ch).or_insert(0) += c;
            }
        }
        let char_total = char_counts.values().sum();
        let penalty = oov_penalty.unwrap_or_else(|| default_penalty(char_counts.len()));
        MorphLexicon {
            total: morphs.values().sum(),
            morphs,
            constructions: BTreeMap::new(),
            char_counts,
            char_total,
            oov_penalty: penalty,
            cost_history: Vec::new(),
        }
    }

    pub fn morphs(&self) -> &BTreeMap<String, u64> {
        &self.morphs
    }

    pub fn total_count(&self) -> u64 {
        self.total
    }

    /// Training analysis of every word type (empty for loaded lexicons).
    pub fn constructions(&self) -> &BTreeMap<String, Vec<String>> {
        &self.constructions
    }

    /// Total cost after initialisation and after every epoch.
    pub fn cost_history(&self) -> &[f64] {
        &self.cost_history
    }

    pub fn oov_penalty(&self) -> f64 {
        self.oov_penalty
    }

    pub fn alphabet_size(&self) -> usize {
        self.char_counts.len()
    }

    /// Bits to spell `c` in the lexicon.
    pub fn char_cost(&self, c: char) -> f64 {
        match self.char_counts.get(&c) {
            Some(&n) => -libm::log2(n as f64 / self.char_total as f64),
            None => self.oov_penalty,
        }
    }

    /// Bits for the end-of-morph symbol.
    pub fn end_of_morph_cost(&self) -> f64 {
        default_penalty(self.char_counts.len())
    }

    pub fn corpus_cost(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let s: f64 = self.morphs.values().map(|&c| xlog2x(c)).sum();
        xlog2x(self.total) - s
    }

    pub fn lexicon_cost(&self) -> f64 {
        let eom = self.end_of_morph_cost();
        self.morphs
            .keys()
            .map(|m| m.chars().map(|c| self.char_cost(c)).sum::<f64>() + eom)
            .sum()
    }

    pub fn total_cost(&self) -> f64 {
        self.corpus_cost() + self.lexicon_cost()
    }

    /// Lowest-cost split of `word`, scoring morphs by `−log₂ p(m)` and
    /// substrings outside the lexicon at the per-character penalty.
    /// Adjacent out-of-lexicon characters come back as one piece.
    pub fn segment(&self, word: &str) -> Result<Vec<String>, SegmentError> {
        let chars: Vec<char> = word.chars().collect();
        let n = chars.len();
        if n == 0 {
            return Err(SegmentError::EmptyInput);
        }
        let offsets: Vec<usize> = word
            .char_indices()
            .map(|(i, _)| i)
            .chain(core::iter::once(word.len()))
            .collect();
        let log_total = libm::log2(self.total.max(1) as f64);
        // best[j] = (cost, start of last piece, last piece is oov)
        let mut best: Vec<(f64, usize, bool)> = Vec::with_capacity(n + 1);
        best.push((0.0, 0, false));
        for j in 1..=n {
            let mut cell = (best[j - 1].0 + self.oov_penalty, j - 1, true);
            for i in 0..j {
                let piece = &word[offsets[i]..offsets[j]];
                if let Some(&count) = self.morphs.get(piece) {
                    let cost = best[i].0 + log_total - libm::log2(count as f64);
                    if cost < cell.0 {
                        cell = (cost, i, false);
                    }
                }
            }
            best.push(cell);
        }
        let mut pieces: Vec<(usize, usize, bool)> = Vec::new();
        let mut j = n;
        while j > 0 {
            let (_, i, oov) = best[j];
            pieces.push((i, j, oov));
            j = i;
        }
        pieces.reverse();
        let mut out: Vec<String> = Vec::with_capacity(pieces.len());
        let mut prev_oov = false;
        for (i, j, oov) in pieces {
            let piece = &word[offsets[i]..offsets[j]];
            if oov && prev_oov {
                out.last_mut().expect("previous piece").push_str(piece);
            } else {
                out.push(String::from(piece));
            }
            prev_oov = oov;
        }
        Ok(out)
    }
}

impl WordSegmenter for MorphLexicon {
    fn segment_word(&self, word: &str) -> Result<Vec<String>, SegmentError> {
        self.segment(word)
    }
}

/// Incrementally maintained cost state used during training.
struct Model {
    counts: BTreeMap<String, u64>,
    total: u64,
    sum_xlogx: f64,
    lexicon: f64,
    char_costs: BTreeMap<char, f64>,
    eom: f64,
    oov: f64,
}

impl Model {
    fn morph_spelling(&self, m: &str) -> f64 {
        m.chars()
            .map(|c| self.char_costs.get(&c).copied().unwrap_or(self.oov))
            .sum::<f64>()
            + self.eom
    }

    fn add(&mut self, m: &str, delta: i64) {
        let old = self.counts.get(m).copied().unwrap_or(0);
        let new = (old as i64 + delta) as u64;
        debug_assert!(old as i64 + delta >= 0);
        self.sum_xlogx += xlog2x(new) - xlog2x(old);
        self.total = (self.total as i64 + delta) as u64;
        if old == 0 && new > 0 {
            self.lexicon += self.morph_spelling(m);
        } else if old > 0 && new == 0 {
            self.lexicon -= self.morph_spelling(m);
        }
        if new == 0 {
            self.counts.remove(m);
        } else if let Some(slot) = self.counts.get_mut(m) {
            *slot = new;
        } else {
            self.counts.insert(String::from(m), new);
        }
    }

    fn cost(&self) -> f64 {
        xlog2x(self.total) - self.sum_xlogx + self.lexicon
    }

    /// Recomputes the running sums from scratch to shed rounding drift.
    fn refresh(&mut self) {
        self.sum_xlogx = self.counts.values().map(|&c| xlog2x(c)).sum();
        self.lexicon = self.counts.keys().map(|m| self.morph_spelling(m)).sum();
    }

    fn split(&mut self, s: &str, weight: i64, out: &mut Vec<String>) {
        let bounds: Vec<usize> = s.char_indices().map(|(i, _)| i).skip(1).collect();
        self.add(s, weight);
        let mut best_cost = self.cost();
        self.add(s, -weight);
        let mut best_at = None;
        for &b in &bounds {
            let (pre, suf) = s.split_at(b);
            self.add(pre, weight);
            self.add(suf, weight);
            let c = self.cost();
            self.add(pre, -weight);
            self.add(suf, -weight);
            if c < best_cost - 1e-9 {
                best_cost = c;
                best_at = Some(b);
            }
        }
        match best_at {
            None => {
                self.add(s, weight);
                out.push(String::from(s));
            }
            Some(b) => {
                let (pre, suf) = s.split_at(b);
                self.split(pre, weight, out);
                self.split(suf, weight, out);
            }
        }
    }
}

/// Proper affixes of length `1..len` shared by at least two morphs,
/// most widely shared first, each with the morphs carrying it.
fn affix_candidates(counts: &BTreeMap<String, u64>, suffix: bool) -> Vec<(String, Vec<String>)> {
    let mut by_affix: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for m in counts.keys() {
        let cuts = m.char_indices().map(|(i, _)| i).skip(1);
        for cut in cuts {
            let affix = if suffix { &m[cut..] } else { &m[..cut] };
            by_affix.entry(affix).or_default().push(m);
        }
    }
    let mut out: Vec<(String, Vec<String>)> = by_affix
        .into_iter()
        .filter(|(_, ms)| ms.len() >= 2)
        .map(|(a, ms)| (String::from(a), ms.into_iter().map(String::from).collect()))
        .collect();
    out.sort_by(|a, b| {
        b.1.len()
            .cmp(&a.1.len())
            .then(b.0.len().cmp(&a.0.len()))
            .then(a.0.cmp(&b.0))
    });
    out
}

/// Tries every affix candidate once against the current model, updating
/// `constructions` for the moves that lower the cost.
fn affix_pass(model: &mut Model, constructions: &mut BTreeMap<String, Vec<String>>, suffix: bool) {
    for (affix, carriers) in affix_candidates(&model.counts, suffix) {
        // Earlier moves may have consumed some carriers.
        let moves: Vec<(String, u64, String, String)> = carriers
            .into_iter()
            .filter_map(|m| {
                let c = model.counts.get(&m).copied()?;
                let cut = if suffix {
                    m.len() - affix.len()
                } else {
                    affix.len()
                };
                let (l, r) = m.split_at(cut);
                let (l, r) = (String::from(l), String::from(r));
                Some((m, c, l, r))
            })
            .collect();
        if moves.len() < 2 {
            continue;
        }
        let before = model.cost();
        let apply = |model: &mut Model, sign: i64| {
            for (m, c, l, r) in &moves {
                let c = *c as i64 * sign;
                model.add(m, -c);
                model.add(l, c);
                model.add(r, c);
            }
        };
        apply(model, 1);
        if model.cost() < before - 1e-9 {
            let split: BTreeMap<&str, (&str, &str)> = moves
                .iter()
                .map(|(m, _, l, r)| (m.as_str(), (l.as_str(), r.as_str())))
                .collect();
            for parts in constructions.values_mut() {
                if !parts.iter().any(|p| split.contains_key(p.as_str())) {
                    continue;
                }
                let mut next = Vec::with_capacity(parts.len() + 1);
                for p in parts.drain(..) {
                    match split.get(p.as_str()) {
                        Some((l, r)) => {
                            next.push(String::from(*l));
                            next.push(String::from(*r));
                        }
                        None => next.push(p),
                    }
                }
                *parts = next;
            }
        } else {
            apply(model, -1);
        }
    }
}

pub fn morfessor_train(train: &[VerseRecord], config: &MorfessorConfig) -> MorphLexicon {
    let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
    for v in train {
        for t in &v.tokens {
            *freq.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let words: Vec<(&str, u64)> = freq
        .into_iter()
        .map(|(w, f)| {
            let weight = match config.count_mode {
                CountMode::Types => 1,
                CountMode::Tokens => f,
            };
            (w, weight)
        })
        .collect();

    let mut char_counts = BTreeMap::new();
    for &(w, weight) in &words {
        for c in w.chars() {
            *char_counts.entry(c).or_insert(0u64) += weight;
        }
    }
    let alphabet = char_counts.len();
    let oov = config
        .oov_penalty
        .unwrap_or_else(|| default_penalty(alphabet));
    let mut model = Model {
        counts: BTreeMap::new(),
        total: 0,
        sum_xlogx: 0.0,
        lexicon: 0.0,
        char_costs: char_cost_table(&char_counts),
        eom: default_penalty(alphabet),
        oov,
    };
    let mut constructions: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for &(w, weight) in &words {
        model.add(w, weight as i64);
        constructions.insert(String::from(w), alloc::vec![String::from(w)]);
    }
    model.refresh();
    let mut history = alloc::vec![model.cost()];

    let mut order: Vec<usize> = (0..words.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.max_epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let (w, weight) = words[idx];
            let weight = weight as i64;
            let before = model.cost();
            let old = constructions.get(w).cloned().expect("word initialised");
            for m in &old {
                model.add(m, -weight);
            }
            let mut new = Vec::new();
            model.split(w, weight, &mut new);
            if new != old && model.cost() > before {
                for m in &new {
                    model.add(m, -weight);
                }
                for m in &old {
                    model.add(m, weight);
                }
            } else {
                constructions.insert(String::from(w), new);
            }
        }
        affix_pass(&mut model, &mut constructions, true);
        affix_pass(&mut model, &mut constructions, false);
        model.refresh();
        let prev = *history.last().expect("history starts non-empty");
        let cur = model.cost();
        history.push(cur);
        if prev <= 0.0 || (prev - cur) / prev < config.convergence {
            break;
        }
    }

    let char_total = char_counts.values().sum();
    MorphLexicon {
        total: model.total,
        morphs: model.counts,
        constructions,
        char_counts,
        char_total,
        oov_penalty: oov,
        cost_history: history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;

    fn lexicon(entries: &[(&str, u64)]) -> MorphLexicon {
        MorphLexicon::from_counts(
            entries.iter().map(|(m, c)| (m.to_string(), *c)).collect(),
            None,
        )
    }

    #[test]
    fn single_word_stays_whole() {
        let train = vec![VerseRecord::from_text("1", "unbelievable").unwrap()];
        let lex = morfessor_train(&train, &MorfessorConfig::default());
        assert_eq!(lex.constructions()["unbelievable"], vec!["unbelievable"]);
        assert_eq!(lex.segment("unbelievable").unwrap(), vec!["unbelievable"]);
    }

    #[test]
    fn single_morph_has_zero_corpus_cost() {
        assert_eq!(lexicon(&[("abc", 17)]).corpus_cost(), 0.0);
    }

    #[test]
    fn uniform_alphabet_costs_k_bits_per_char() {
        // 8 characters, equally frequent.
        let lex = lexicon(&[("abcdefgh", 3)]);
        for c in "abcdefgh".chars() {
            assert!((lex.char_cost(c) - 3.0).abs() < 1e-12);
        }
        let eom = lex.end_of_morph_cost();
        assert!((lex.lexicon_cost() - (24.0 + eom)).abs() < 1e-9);
    }

    #[test]
    fn doubling_counts_keeps_per_token_cost() {
        let a = lexicon(&[("x", 3), ("y", 5)]);
        let b = lexicon(&[("x", 6), ("y", 10)]);
        let per_a = a.corpus_cost() / a.total_count() as f64;
        let per_b = b.corpus_cost() / b.total_count() as f64;
        assert!((per_a - per_b).abs() < 1e-12);
    }

    #[test]
    fn unseen_pair_of_known_morphs_splits() {
        // walk:10 and ing:10 cost log₂(21/10) ≈ 1.07 bits each; covering
        // "walking" character by character costs 7·log₂(A+1) bits.
        let lex = lexicon(&[("walk", 10), ("ing", 10), ("x", 1)]);
        assert_eq!(lex.segment("walking").unwrap(), vec!["walk", "ing"]);
    }

    #[test]
    fn frequent_whole_form_wins() {
        let lex = lexicon(&[("walking", 50), ("walk", 1), ("ing", 1)]);
        assert_eq!(lex.segment("walking").unwrap(), vec!["walking"]);
    }

    #[test]
    fn unknown_characters_group_together() {
        let lex = lexicon(&[("ab", 4)]);
        assert_eq!(lex.segment("abxyz").unwrap(), vec!["ab", "xyz"]);
        assert_eq!(lex.segment("qq").unwrap(), vec!["qq"]);
        assert!(lex.segment("").is_err());
    }

    #[test]
    fn walks_splits_when_cheaper() {
        let mut text = String::new();
        for _ in 0..50 {
            text.push_str("walk walks walked walking ");
        }
        let train = vec![VerseRecord::from_text("1", text.trim_end()).unwrap()];
        let lex = morfessor_train(&train, &MorfessorConfig::default());
        assert_eq!(lex.segment("walks").unwrap(), vec!["walk", "s"]);
        let hist = lex.cost_history();
        assert!(hist.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{hist:?}");
        assert!(hist.last().unwrap() < &hist[0], "{}", format!("{hist:?}"));
    }

    fn paradigm(stems: &[&str], suffixes: &[&str]) -> Vec<VerseRecord> {
        let mut verses = Vec::new();
        for s in stems {
            for x in suffixes {
                let id = format!("{s}{x}");
                verses.push(VerseRecord::new(id.clone(), vec![id]).unwrap());
            }
        }
        verses
    }

    #[test]
    fn affix_move_splits_a_paradigm() {
        let train = paradigm(&["kitap", "masa", "kalem"], &["lar", "dan", "ta"]);
        let lex = morfessor_train(&train, &MorfessorConfig::default());
        assert_eq!(lex.morphs().len(), 6);
        assert_eq!(lex.constructions()["masadan"], ["masa", "dan"]);
        let h = lex.cost_history();
        assert!(h.windows(2).all(|w| w[1] <= w[0]));
        assert!((lex.total_cost() - h[h.len() - 1]).abs() < 1e-6);
    }

    #[test]
    fn constructions_cover_words_and_counts() {
        let train = paradigm(&["ab", "abc", "ba", "cab"], &["a", "ba", "cab", "b"]);
        let lex = morfessor_train(&train, &MorfessorConfig::default());
        let mut recount: BTreeMap<String, u64> = BTreeMap::new();
        for (w, parts) in lex.constructions() {
            assert_eq!(&parts.concat(), w);
            for p in parts {
                *recount.entry(p.clone()).or_insert(0) += 1;
            }
        }
        assert_eq!(&recount, lex.morphs());
    }

    #[test]
    fn training_is_deterministic() {
        let train = vec![
            VerseRecord::from_text("1", "talked talks walking walked jumps").unwrap(),
            VerseRecord::from_text("2", "jumped jumping talking walks").unwrap(),
        ];
        let a = morfessor_train(&train, &MorfessorConfig::default());
        let b = morfessor_train(&train, &MorfessorConfig::default());
        assert_eq!(a, b);
    }
}
