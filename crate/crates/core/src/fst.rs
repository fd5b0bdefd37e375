//! String-to-string transducer runtime and the adapter that turns an
//! analyzer emitting morpheme boundaries into a word segmenter.
//!
//! Symbol id 0 is epsilon in both tables. Input symbols are single
//! characters. The output table may contain [`BOUNDARY`], which separates
//! morphs in a segmentation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::corpus::VerseRecord;
use crate::segmentation::{segment_with, Method, SegmentError, SegmentedVerse, WordSegmenter};

pub const EPSILON: u32 = 0;
pub const EPSILON_NAME: &str = "<eps>";
/// Names accepted for symbol id 0 in symbol-table files.
pub const EPSILON_ALIASES: [&str; 5] =
    ["<eps>", "<epsilon>", "@0@", "@_EPSILON_SYMBOL_@", "\u{3b5}"];
/// Morph boundary marker on the output tape.
pub const BOUNDARY: &str = "<B>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FstError {
    #[error("symbol id {0} is defined twice")]
    DuplicateId(u32),
    #[error("symbol `{0}` is defined twice")]
    DuplicateSymbol(String),
    #[error("symbol id 0 must be epsilon, found `{0}`")]
    EpsilonMismatch(String),
    #[error("input symbol `{0}` is not a single character")]
    MultiCharInput(String),
    #[error("state {state} is out of range ({num_states} states)")]
    StateOutOfRange { state: u32, num_states: u32 },
    #[error("label {0} is not in the symbol table")]
    UnknownLabel(u32),
    #[error("transducer has no states")]
    NoStates,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolTable {
    names: BTreeMap<u32, String>,
    ids: BTreeMap<String, u32>,
}

impl SymbolTable {
    /// Builds a table from `(symbol, id)` entries. Id 0 is added as
    /// epsilon when missing.
    pub fn new<I, S>(entries: I) -> Result<Self, FstError>
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let mut table = SymbolTable::default();
        for (sym, id) in entries {
            table.insert(sym.into(), id)?;
        }
        match table.names.get(&EPSILON) {
            None => table.insert(EPSILON_NAME.to_string(), EPSILON)?,
            Some(name) if !EPSILON_ALIASES.contains(&name.as_str()) => {
                return Err(FstError::EpsilonMismatch(name.clone()))
            }
            Some(_) => {}
        }
        Ok(table)
    }

    fn insert(&mut self, sym: String, id: u32) -> Result<(), FstError> {
        if self.names.contains_key(&id) {
            return Err(FstError::DuplicateId(id));
        }
        if self.ids.contains_key(&sym) {
            return Err(FstError::DuplicateSymbol(sym));
        }
        self.ids.insert(sym.clone(), id);
        self.names.insert(id, sym);
        Ok(())
    }

    /// Table with epsilon plus `symbols` numbered from 1.
    pub fn from_symbols<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = SymbolTable::default();
        table
            .insert(EPSILON_NAME.to_string(), EPSILON)
            .expect("fresh table");
        for s in symbols {
            let s = s.into();
            if !table.ids.contains_key(&s) {
                let id = table.names.len() as u32;
                table.insert(s, id).expect("unused id");
            }
        }
        table
    }

    pub fn id(&self, sym: &str) -> Option<u32> {
        self.ids.get(sym).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(&id).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.names.iter().map(|(&id, s)| (id, s.as_str()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arc {
    pub ilabel: u32,
    pub olabel: u32,
    pub next: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fst {
    start: u32,
    arcs: Vec<Vec<Arc>>,
    finals: Vec<bool>,
    isyms: SymbolTable,
    osyms: SymbolTable,
    input_chars: BTreeMap<char, u32>,
    boundary: Option<u32>,
}

impl Fst {
    /// Validates and assembles a transducer. Arcs of every state are kept
    /// in lexicographic order of (input symbol, output symbol, target).
    pub fn new(
        num_states: u32,
        start: u32,
        arcs: Vec<(u32, Arc)>,
        finals: impl IntoIterator<Item = u32>,
        isyms: SymbolTable,
        osyms: SymbolTable,
    ) -> Result<Self, FstError> {
        if num_states == 0 {
            return Err(FstError::NoStates);
        }
        let check = |state: u32| {
            if state < num_states {
                Ok(())
            } else {
                Err(FstError::StateOutOfRange { state, num_states })
            }
        };
        check(start)?;
        let mut input_chars = BTreeMap::new();
        for (id, sym) in isyms.iter() {
            if id == EPSILON {
                continue;
            }
            let mut cs = sym.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => {
                    input_chars.insert(c, id);
                }
                _ => return Err(FstError::MultiCharInput(sym.to_string())),
            }
        }
        let mut per_state = alloc::vec![Vec::new(); num_states as usize];
        for (src, arc) in arcs {
            check(src)?;
            check(arc.next)?;
            if isyms.name(arc.ilabel).is_none() {
                return Err(FstError::UnknownLabel(arc.ilabel));
            }
            if osyms.name(arc.olabel).is_none() {
                return Err(FstError::UnknownLabel(arc.olabel));
            }
            per_state[src as usize].push(arc);
        }
        let sort_name = |table: &SymbolTable, id: u32| -> String {
            if id == EPSILON {
                String::new()
            } else {
                table.name(id).unwrap_or_default().to_string()
            }
        };
        for list in &mut per_state {
            list.sort_by_cached_key(|a: &Arc| {
                (
                    sort_name(&isyms, a.ilabel),
                    sort_name(&osyms, a.olabel),
                    a.next,
                )
            });
            list.dedup();
        }
        let mut final_flags = alloc::vec![false; num_states as usize];
        for f in finals {
            check(f)?;
            final_flags[f as usize] = true;
        }
        let boundary = osyms.id(BOUNDARY);
        Ok(Fst {
            start,
            arcs: per_state,
            finals: final_flags,
            isyms,
            osyms,
            input_chars,
            boundary,
        })
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn num_states(&self) -> u32 {
        self.arcs.len() as u32
    }

    pub fn arcs(&self, state: u32) -> &[Arc] {
        &self.arcs[state as usize]
    }

    pub fn is_final(&self, state: u32) -> bool {
        self.finals[state as usize]
    }

    pub fn input_symbols(&self) -> &SymbolTable {
        &self.isyms
    }

    pub fn output_symbols(&self) -> &SymbolTable {
        &self.osyms
    }

    /// True when no final state is reachable from the start state.
    pub fn accepts_nothing(&self) -> bool {
        let mut seen = alloc::vec![false; self.arcs.len()];
        let mut stack = alloc::vec![self.start];
        seen[self.start as usize] = true;
        while let Some(s) = stack.pop() {
            if self.finals[s as usize] {
                return false;
            }
            for a in &self.arcs[s as usize] {
                if !seen[a.next as usize] {
                    seen[a.next as usize] = true;
                    stack.push(a.next);
                }
            }
        }
        true
    }

    /// Output label sequences (epsilons dropped) of accepting paths that
    /// consume exactly `surface`, in depth-first lexicographic order,
    /// stopping after `max_outputs` distinct sequences. A path never
    /// revisits a (state, input position) pair, which cuts epsilon cycles.
    pub fn output_sequences(&self, surface: &str, max_outputs: usize) -> Vec<Vec<u32>> {
        let mut input = Vec::new();
        for c in surface.chars() {
            match self.input_chars.get(&c) {
                Some(&id) => input.push(id),
                None => return Vec::new(),
            }
        }
        let mut search = Search {
            fst: self,
            input: &input,
            on_path: BTreeSet::new(),
            output: Vec::new(),
            found: Vec::new(),
            seen: BTreeSet::new(),
            max: max_outputs.max(1),
        };
        search.visit(self.start, 0);
        search.found
    }

    fn render(&self, labels: &[u32]) -> String {
        labels
            .iter()
            .map(|&l| self.osyms.name(l).unwrap_or_default())
            .collect()
    }

    /// All output strings for `surface` (at most `max_outputs`).
    pub fn apply(&self, surface: &str, max_outputs: usize) -> BTreeSet<String> {
        self.output_sequences(surface, max_outputs)
            .iter()
            .map(|seq| self.render(seq))
            .collect()
    }

    /// Surface segmentations proposed for `word`: outputs split at
    /// boundary symbols, keeping only those that spell `word` exactly.
    pub fn candidate_segmentations(&self, word: &str, max_outputs: usize) -> BTreeSet<Vec<String>> {
        let mut out = BTreeSet::new();
        for seq in self.output_sequences(word, max_outputs) {
            let mut parts = Vec::new();
            let mut cur = String::new();
            for &l in &seq {
                if Some(l) == self.boundary {
                    if !cur.is_empty() {
                        parts.push(core::mem::take(&mut cur));
                    }
                } else {
                    cur.push_str(self.osyms.name(l).unwrap_or_default());
                }
            }
            if !cur.is_empty() {
                parts.push(cur);
            }
            if !parts.is_empty() && parts.concat() == word {
                out.insert(parts);
            }
        }
        out
    }

    /// The segmentation of `word` chosen by `policy`: fewest segments,
    /// ties broken lexicographically, optionally ignoring the unsegmented
    /// word when anything else is available.
    pub fn segment_word(&self, policy: &SegmenterPolicy, word: &str) -> Option<Vec<String>> {
        let mut candidates = self.candidate_segmentations(word, policy.max_outputs);
        if policy.exclude_identity && candidates.len() > 1 {
            candidates.retain(|c| !(c.len() == 1 && c[0] == word));
        }
        candidates
            .into_iter()
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
    }
}

struct Search<'a> {
    fst: &'a Fst,
    input: &'a [u32],
    on_path: BTreeSet<(u32, usize)>,
    output: Vec<u32>,
    found: Vec<Vec<u32>>,
    seen: BTreeSet<Vec<u32>>,
    max: usize,
}

impl Search<'_> {
    fn visit(&mut self, state: u32, pos: usize) {
        if self.found.len() >= self.max || !self.on_path.insert((state, pos)) {
            return;
        }
        if pos == self.input.len()
            && self.fst.is_final(state)
            && self.seen.insert(self.output.clone())
        {
            self.found.push(self.output.clone());
        }
        for arc in self.fst.arcs(state) {
            if self.found.len() >= self.max {
                break;
            }
            let next_pos = if arc.ilabel == EPSILON {
                pos
            } else if pos < self.input.len() && self.input[pos] == arc.ilabel {
                pos + 1
            } else {
                continue;
            };
            let pushed = arc.olabel != EPSILON;
            if pushed {
                self.output.push(arc.olabel);
            }
            self.visit(arc.next, next_pos);
            if pushed {
                self.output.pop();
            }
        }
        self.on_path.remove(&(state, pos));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmenterPolicy {
    pub exclude_identity: bool,
    pub max_outputs: usize,
}

impl Default for SegmenterPolicy {
    fn default() -> Self {
        Self {
            exclude_identity: false,
            max_outputs: 64,
        }
    }
}

/// FST segmentation with a statistical segmenter for words the FST
/// cannot analyse.
#[derive(Debug, Clone, Copy)]
pub struct BackoffSegmenter<'a, F: ?Sized> {
    pub fst: &'a Fst,
    pub policy: SegmenterPolicy,
    pub fallback: &'a F,
}

impl<F: WordSegmenter + ?Sized> WordSegmenter for BackoffSegmenter<'_, F> {
    fn segment_word(&self, word: &str) -> Result<Vec<String>, SegmentError> {
        if word.is_empty() {
            return Err(SegmentError::EmptyInput);
        }
        match self.fst.segment_word(&self.policy, word) {
            Some(parts) => Ok(parts),
            None => self.fallback.segment_word(word),
        }
    }
}

/// Segments `verse` with the FST, backing off to `fallback` per token.
/// `method` is the tag to record (`FstBpe` or `FstMorfessor`).
pub fn fst_backoff_segment<F: WordSegmenter + ?Sized>(
    fst: &Fst,
    policy: &SegmenterPolicy,
    fallback: &F,
    verse: &VerseRecord,
    method: Method,
) -> Result<SegmentedVerse, SegmentError> {
    let seg = BackoffSegmenter {
        fst,
        policy: *policy,
        fallback,
    };
    segment_with(&seg, verse, method)
}

/// Builds acyclic segmenter transducers from explicit analyses.
///
/// Each analysis is a surface word split into morphs; the transducer
/// copies characters and emits [`BOUNDARY`] on an epsilon-input arc
/// between morphs. Analyses sharing a prefix share states.
#[derive(Debug, Default, Clone)]
pub struct SegmenterBuilder {
    analyses: BTreeSet<Vec<String>>,
}

impl SegmenterBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn analysis<S: AsRef<str>>(mut self, morphs: &[S]) -> Self {
        self.add(morphs);
        self
    }

    pub fn add<S: AsRef<str>>(&mut self, morphs: &[S]) {
        let parts: Vec<String> = morphs
            .iter()
            .map(|m| m.as_ref().to_string())
            .filter(|m| !m.is_empty())
            .collect();
        if !parts.is_empty() {
            self.analyses.insert(parts);
        }
    }

    pub fn build(&self) -> Fst {
        let mut chars = BTreeSet::new();
        for a in &self.analyses {
            for m in a {
                chars.extend(m.chars());
            }
        }
        let char_syms: Vec<String> = chars.iter().map(|c| c.to_string()).collect();
        let isyms = SymbolTable::from_symbols(char_syms.iter().cloned());
        let osyms = SymbolTable::from_symbols(
            char_syms
                .iter()
                .cloned()
                .chain(core::iter::once(BOUNDARY.to_string())),
        );
        let bound = osyms.id(BOUNDARY).expect("boundary symbol added");

        // Trie over (ilabel, olabel) steps.
        let mut trie: Vec<BTreeMap<(u32, u32), u32>> = alloc::vec![BTreeMap::new()];
        let mut finals = BTreeSet::new();
        for a in &self.analyses {
            let mut state = 0u32;
            for (k, m) in a.iter().enumerate() {
                let mut steps: Vec<(u32, u32)> = Vec::new();
                if k > 0 {
                    steps.push((EPSILON, bound));
                }
                for c in m.chars() {
                    let s = c.to_string();
                    let i = isyms.id(&s).expect("char in table");
                    let o = osyms.id(&s).expect("char in table");
                    steps.push((i, o));
                }
                for step in steps {
                    let next = trie.len() as u32;
                    let target = *trie[state as usize].entry(step).or_insert(next);
                    if target == next {
                        trie.push(BTreeMap::new());
                    }
                    state = target;
                }
            }
            finals.insert(state);
        }
        let mut arcs = Vec::new();
        for (src, edges) in trie.iter().enumerate() {
            for (&(ilabel, olabel), &next) in edges {
                arcs.push((
                    src as u32,
                    Arc {
                        ilabel,
                        olabel,
                        next,
                    },
                ));
            }
        }
        Fst::new(trie.len() as u32, 0, arcs, finals, isyms, osyms).expect("builder output is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn copy_fst() -> Fst {
        // 0 -a:a-> 1 (final)
        let isyms = SymbolTable::from_symbols(["a"]);
        let osyms = SymbolTable::from_symbols(["a"]);
        let arcs = vec![(
            0,
            Arc {
                ilabel: 1,
                olabel: 1,
                next: 1,
            },
        )];
        Fst::new(2, 0, arcs, [1], isyms, osyms).unwrap()
    }

    #[test]
    fn two_state_copy() {
        let f = copy_fst();
        assert_eq!(f.apply("a", 8), set(&["a"]));
        assert!(f.apply("aa", 8).is_empty());
        assert!(f.apply("b", 8).is_empty());
    }

    #[test]
    fn identity_loop() {
        let isyms = SymbolTable::from_symbols(["a", "b"]);
        let osyms = isyms.clone();
        let arcs = vec![
            (
                0,
                Arc {
                    ilabel: 1,
                    olabel: 1,
                    next: 0,
                },
            ),
            (
                0,
                Arc {
                    ilabel: 2,
                    olabel: 2,
                    next: 0,
                },
            ),
        ];
        let f = Fst::new(1, 0, arcs, [0], isyms, osyms).unwrap();
        assert_eq!(f.apply("ab", 8), set(&["ab"]));
        assert_eq!(f.apply("", 8), set(&[""]));
    }

    #[test]
    fn epsilon_outputs_shorten() {
        // 0 -a:a-> 1 -b:ε-> 2 -c:c-> 3
        let isyms = SymbolTable::from_symbols(["a", "b", "c"]);
        let osyms = isyms.clone();
        let arcs = vec![
            (
                0,
                Arc {
                    ilabel: 1,
                    olabel: 1,
                    next: 1,
                },
            ),
            (
                1,
                Arc {
                    ilabel: 2,
                    olabel: 0,
                    next: 2,
                },
            ),
            (
                2,
                Arc {
                    ilabel: 3,
                    olabel: 3,
                    next: 3,
                },
            ),
        ];
        let f = Fst::new(4, 0, arcs, [3], isyms, osyms).unwrap();
        assert_eq!(f.apply("abc", 8), set(&["ac"]));
    }

    #[test]
    fn ambiguous_paths_both_returned() {
        // 0 -a:x-> 1 -b:y-> 3 ; 0 -a:z-> 2 -b:w-> 3
        let isyms = SymbolTable::from_symbols(["a", "b"]);
        let osyms = SymbolTable::from_symbols(["x", "y", "z", "w"]);
        let arcs = vec![
            (
                0,
                Arc {
                    ilabel: 1,
                    olabel: 1,
                    next: 1,
                },
            ),
            (
                1,
                Arc {
                    ilabel: 2,
                    olabel: 2,
                    next: 3,
                },
            ),
            (
                0,
                Arc {
                    ilabel: 1,
                    olabel: 3,
                    next: 2,
                },
            ),
            (
                2,
                Arc {
                    ilabel: 2,
                    olabel: 4,
                    next: 3,
                },
            ),
        ];
        let f = Fst::new(4, 0, arcs, [3], isyms, osyms).unwrap();
        assert_eq!(f.apply("ab", 8), set(&["xy", "zw"]));
        assert_eq!(f.apply("ab", 1), set(&["xy"]));
    }

    #[test]
    fn epsilon_cycle_terminates() {
        // ε:x loop on the start state.
        let isyms = SymbolTable::from_symbols(["a"]);
        let osyms = SymbolTable::from_symbols(["a", "x"]);
        let arcs = vec![
            (
                0,
                Arc {
                    ilabel: 0,
                    olabel: 2,
                    next: 0,
                },
            ),
            (
                0,
                Arc {
                    ilabel: 1,
                    olabel: 1,
                    next: 1,
                },
            ),
        ];
        let f = Fst::new(2, 0, arcs, [1], isyms, osyms).unwrap();
        assert_eq!(f.apply("a", 8), set(&["a"]));
    }

    #[test]
    fn invalid_parts_rejected() {
        let isyms = SymbolTable::from_symbols(["a"]);
        let osyms = isyms.clone();
        let bad_state = vec![(
            0,
            Arc {
                ilabel: 1,
                olabel: 1,
                next: 7,
            },
        )];
        assert!(matches!(
            Fst::new(2, 0, bad_state, [1], isyms.clone(), osyms.clone()),
            Err(FstError::StateOutOfRange { state: 7, .. })
        ));
        let bad_label = vec![(
            0,
            Arc {
                ilabel: 9,
                olabel: 1,
                next: 1,
            },
        )];
        assert_eq!(
            Fst::new(2, 0, bad_label, [1], isyms, osyms.clone()),
            Err(FstError::UnknownLabel(9))
        );
        let multi = SymbolTable::from_symbols(["ab"]);
        assert!(matches!(
            Fst::new(1, 0, vec![], [0], multi, osyms),
            Err(FstError::MultiCharInput(_))
        ));
    }

    #[test]
    fn accepts_nothing_flag() {
        let isyms = SymbolTable::from_symbols(["a"]);
        let f = Fst::new(2, 0, vec![], [1], isyms.clone(), isyms).unwrap();
        assert!(f.accepts_nothing());
        assert!(!copy_fst().accepts_nothing());
    }

    #[test]
    fn fewest_segments_chosen() {
        let f = SegmenterBuilder::new()
            .analysis(&["kılıç", "la"])
            .analysis(&["kı", "lıç", "la"])
            .build();
        let p = SegmenterPolicy::default();
        assert_eq!(f.segment_word(&p, "kılıçla").unwrap(), vec!["kılıç", "la"]);
        assert_eq!(f.segment_word(&p, "Yuhannanın"), None);
    }

    #[test]
    fn identity_excluded_when_asked() {
        let f = SegmenterBuilder::new()
            .analysis(&["walks"])
            .analysis(&["walk", "s"])
            .analysis(&["walk"])
            .build();
        let keep = SegmenterPolicy::default();
        let drop = SegmenterPolicy {
            exclude_identity: true,
            ..keep
        };
        assert_eq!(f.segment_word(&keep, "walks").unwrap(), vec!["walks"]);
        assert_eq!(f.segment_word(&drop, "walks").unwrap(), vec!["walk", "s"]);
        // The identity is kept when it is the only analysis.
        assert_eq!(f.segment_word(&drop, "walk").unwrap(), vec!["walk"]);
    }

    #[test]
    fn non_surface_outputs_discarded() {
        // Analyzer emits a canonical morph "go" for surface "went".
        let isyms = SymbolTable::from_symbols(["w", "e", "n", "t"]);
        let osyms = SymbolTable::from_symbols(["g", "o"]);
        let arcs = vec![
            (
                0,
                Arc {
                    ilabel: 1,
                    olabel: 1,
                    next: 1,
                },
            ),
            (
                1,
                Arc {
                    ilabel: 2,
                    olabel: 2,
                    next: 2,
                },
            ),
            (
                2,
                Arc {
                    ilabel: 3,
                    olabel: 0,
                    next: 3,
                },
            ),
            (
                3,
                Arc {
                    ilabel: 4,
                    olabel: 0,
                    next: 4,
                },
            ),
        ];
        let f = Fst::new(5, 0, arcs, [4], isyms, osyms).unwrap();
        assert_eq!(f.apply("went", 8), set(&["go"]));
        assert_eq!(f.segment_word(&SegmenterPolicy::default(), "went"), None);
    }
}
