//! Synthetic verse-aligned languages and toy fixtures.
//!
//! Every language expresses the same sequence of clause meanings. A
//! meaning is a set of noun and verb lexemes plus values for eleven
//! grammatical categories. Language `i` of `n` realises the first
//! `round(i·11/(n−1))` categories as suffixes on the stem and the rest
//! as separate particles, so the word-type count grows with `i` while
//! the content stays fixed. Default category values are unmarked in
//! both realisations.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seglab_core::fst::{Fst, SegmenterBuilder};
use seglab_core::wals::TypologyError;
use seglab_core::{ParallelCorpus, TypologyTable, VerseRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Noun,
    Verb,
}

struct Category {
    pos: Pos,
    name: &'static str,
    values: usize,
}

/// Binding order: language `i` suffixes the first `bound` of these.
const CATEGORIES: [Category; 11] = [
    Category {
        pos: Pos::Noun,
        name: "number",
        values: 2,
    },
    Category {
        pos: Pos::Verb,
        name: "tense",
        values: 3,
    },
    Category {
        pos: Pos::Noun,
        name: "case",
        values: 6,
    },
    Category {
        pos: Pos::Verb,
        name: "person",
        values: 3,
    },
    Category {
        pos: Pos::Verb,
        name: "plural",
        values: 2,
    },
    Category {
        pos: Pos::Noun,
        name: "definiteness",
        values: 2,
    },
    Category {
        pos: Pos::Verb,
        name: "aspect",
        values: 3,
    },
    Category {
        pos: Pos::Noun,
        name: "possessor",
        values: 4,
    },
    Category {
        pos: Pos::Verb,
        name: "mood",
        values: 3,
    },
    Category {
        pos: Pos::Verb,
        name: "polarity",
        values: 2,
    },
    Category {
        pos: Pos::Noun,
        name: "evaluative",
        values: 3,
    },
];

const CONSONANTS: &[char] = &[
    'p', 't', 'k', 'm', 'n', 's', 'l', 'r', 'b', 'd', 'g', 'v', 'z', 'h',
];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub languages: usize,
    pub verses: usize,
    pub nouns: usize,
    pub verbs: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            languages: 12,
            verses: 1800,
            nouns: 300,
            verbs: 150,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthLanguage {
    pub code: String,
    /// Number of categories realised as suffixes.
    pub bound: usize,
    pub corpus: ParallelCorpus,
    /// Gold stem-and-suffix analysis of every word type.
    pub analyses: BTreeMap<String, Vec<String>>,
}

/// One inflectable word in a clause meaning.
#[derive(Debug, Clone)]
struct Word {
    pos: Pos,
    lexeme: usize,
    /// Value per category; only categories of the word's part of speech
    /// are meaningful.
    values: [usize; 11],
}

type Clause = Vec<Word>;

/// `qaa`, `qab`, ...: codes from the range reserved for local use.
pub fn language_code(i: usize) -> String {
    let a = (b'a' + (i / 26) as u8) as char;
    let b = (b'a' + (i % 26) as u8) as char;
    format!("q{a}{b}")
}

fn syllable(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    s.push(*CONSONANTS.choose(rng).expect("non-empty"));
    s.push(*VOWELS.choose(rng).expect("non-empty"));
    s
}

fn fresh(rng: &mut ChaCha8Rng, syllables: usize, used: &mut BTreeSet<String>) -> String {
    loop {
        let w: String = (0..syllables).map(|_| syllable(rng)).collect();
        if used.insert(w.clone()) {
            return w;
        }
    }
}

fn sample_value(rng: &mut ChaCha8Rng, values: usize) -> usize {
    if rng.gen_bool(0.5) {
        0
    } else {
        rng.gen_range(1..values)
    }
}

fn meanings(config: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<Clause>> {
    let zipf = |n: usize| WeightedIndex::new((1..=n).map(|r| 1.0 / r as f64)).expect("n > 0");
    let nouns = zipf(config.nouns);
    let verbs = zipf(config.verbs);
    let word = |pos: Pos, rng: &mut ChaCha8Rng| {
        let lexeme = match pos {
            Pos::Noun => nouns.sample(rng),
            Pos::Verb => verbs.sample(rng),
        };
        let mut values = [0; 11];
        for (v, c) in values.iter_mut().zip(&CATEGORIES) {
            if c.pos == pos {
                *v = sample_value(rng, c.values);
            }
        }
        Word {
            pos,
            lexeme,
            values,
        }
    };
    (0..config.verses)
        .map(|_| {
            let clauses = rng.gen_range(1..=3);
            (0..clauses)
                .map(|_| {
                    let mut clause = vec![word(Pos::Noun, rng), word(Pos::Verb, rng)];
                    if rng.gen_bool(0.7) {
                        clause.push(word(Pos::Noun, rng));
                    }
                    if rng.gen_bool(0.3) {
                        clause.push(word(Pos::Noun, rng));
                    }
                    clause
                })
                .collect()
        })
        .collect()
}

struct Grammar {
    bound: usize,
    verb_final: bool,
    noun_stems: Vec<String>,
    verb_stems: Vec<String>,
    /// Per category, per non-default value: the suffix or particle.
    markers: Vec<Vec<String>>,
    conjunction: String,
}

impl Grammar {
    fn new(config: &SynthConfig, bound: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut used = BTreeSet::new();
        let mut stems = |n: usize, rng: &mut ChaCha8Rng| -> Vec<String> {
            (0..n)
                .map(|_| {
                    let len = rng.gen_range(2..=3);
                    fresh(rng, len, &mut used)
                })
                .collect()
        };
        let noun_stems = stems(config.nouns, rng);
        let verb_stems = stems(config.verbs, rng);
        let mut markers = Vec::new();
        for (k, c) in CATEGORIES.iter().enumerate() {
            let syllables = if k < bound { 1 } else { 2 };
            markers.push(
                (1..c.values)
                    .map(|_| fresh(rng, syllables, &mut used))
                    .collect(),
            );
        }
        let conjunction = fresh(rng, 1, &mut used);
        Grammar {
            bound,
            verb_final: rng.gen_bool(0.5),
            noun_stems,
            verb_stems,
            markers,
            conjunction,
        }
    }

    fn realise(&self, w: &Word, out: &mut Vec<String>, gold: &mut BTreeMap<String, Vec<String>>) {
        let stem = match w.pos {
            Pos::Noun => &self.noun_stems[w.lexeme],
            Pos::Verb => &self.verb_stems[w.lexeme],
        };
        let mut morphs = vec![stem.clone()];
        for (k, c) in CATEGORIES.iter().enumerate() {
            if c.pos != w.pos || w.values[k] == 0 {
                continue;
            }
            let marker = &self.markers[k][w.values[k] - 1];
            if k < self.bound {
                morphs.push(marker.clone());
            } else {
                gold.entry(marker.clone())
                    .or_insert_with(|| vec![marker.clone()]);
                out.push(marker.clone());
            }
        }
        let word = morphs.concat();
        gold.entry(word.clone()).or_insert(morphs);
        out.push(word);
    }

    fn verse(&self, clauses: &[Clause], gold: &mut BTreeMap<String, Vec<String>>) -> Vec<String> {
        let mut tokens = Vec::new();
        for (i, clause) in clauses.iter().enumerate() {
            if i > 0 {
                tokens.push(self.conjunction.clone());
                gold.entry(self.conjunction.clone())
                    .or_insert_with(|| vec![self.conjunction.clone()]);
            }
            let mut order: Vec<&Word> = clause.iter().collect();
            if self.verb_final {
                let verb = order.remove(1);
                order.push(verb);
            }
            for w in order {
                self.realise(w, &mut tokens, gold);
            }
        }
        tokens.push(".".to_string());
        gold.entry(".".to_string())
            .or_insert_with(|| vec![".".to_string()]);
        tokens
    }
}

/// Share of word types each generated language's FST covers.
pub const FST_COVERAGE: f64 = 0.7;

/// Writes corpora, typology, one FST per language and a run config
/// under `dir`. Returns the config path.
pub fn write_workspace(dir: &Path, config: &SynthConfig) -> crate::Result<PathBuf> {
    use crate::formats::{att, corpus, typology as tsv};
    let langs = generate(config);
    let mut ini = String::from("[run]\noutput_dir = out\ntypology = typology.tsv\n\n[corpus]\n");
    for l in &langs {
        let file = format!("corpora/{}.tsv", l.code);
        corpus::write_verses(&dir.join(&file), l.corpus.verses())?;
        ini.push_str(&format!("{} = {file}\n", l.code));
    }
    ini.push_str("\n[fst]\n");
    for l in &langs {
        let sub = format!("fst/{}", l.code);
        att::write_fst_dir(&dir.join(&sub), &language_fst(l, FST_COVERAGE))?;
        ini.push_str(&format!("{} = {sub}\n", l.code));
    }
    tsv::write_typology(&dir.join("typology.tsv"), &typology(&langs)?)?;
    let path = dir.join("seglab.ini");
    crate::error::write_file(&path, ini)?;
    Ok(path)
}

/// Categories bound by language `i` of `n`.
pub fn bound_categories(i: usize, n: usize) -> usize {
    if n <= 1 {
        return 0;
    }
    (i * CATEGORIES.len() + (n - 1) / 2) / (n - 1)
}

pub fn generate(config: &SynthConfig) -> Vec<SynthLanguage> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let meanings = meanings(config, &mut rng);
    (0..config.languages)
        .map(|i| {
            let bound = bound_categories(i, config.languages);
            let mut lrng = ChaCha8Rng::seed_from_u64(config.seed ^ ((i as u64 + 1) << 32));
            let grammar = Grammar::new(config, bound, &mut lrng);
            let mut analyses = BTreeMap::new();
            let verses = meanings
                .iter()
                .enumerate()
                .map(|(v, clauses)| {
                    VerseRecord::new(
                        format!("V{:05}", v + 1),
                        grammar.verse(clauses, &mut analyses),
                    )
                    .expect("generated tokens are well formed")
                })
                .collect();
            let code = language_code(i);
            SynthLanguage {
                corpus: ParallelCorpus::new(code.clone(), verses).expect("verse ids are unique"),
                code,
                bound,
                analyses,
            }
        })
        .collect()
}

/// A segmenter covering roughly `coverage` of the language's word types,
/// chosen by a fixed stride over the sorted type list. Uncovered words
/// exercise the statistical fallback.
pub fn language_fst(language: &SynthLanguage, coverage: f64) -> Fst {
    let mut b = SegmenterBuilder::new();
    let per_ten = (coverage.clamp(0.0, 1.0) * 10.0).round() as usize;
    for (i, morphs) in language.analyses.values().enumerate() {
        if i % 10 < per_ten {
            b.add(morphs);
        }
    }
    b.build()
}

fn binds(bound: usize, name: &str) -> bool {
    CATEGORIES[..bound].iter().any(|c| c.name == name)
}

/// Feature values implied by each language's grammar. A few cells are
/// left out on purpose so that missing values are exercised.
pub fn typology(languages: &[SynthLanguage]) -> Result<TypologyTable, TypologyError> {
    let mut t = TypologyTable::new();
    for (i, l) in languages.iter().enumerate() {
        let b = l.bound;
        let verb_bound = CATEGORIES[..b]
            .iter()
            .filter(|c| c.pos == Pos::Verb)
            .count();
        let case = binds(b, "case");
        let person = binds(b, "person");
        let possessor = binds(b, "possessor");
        let code = l.code.as_str();
        let fusion = match b {
            0 => "Exclusively isolating",
            1..=5 => "Isolating/concatenative",
            _ => "Exclusively concatenative",
        };
        t.insert(code, "20A", fusion)?;
        t.insert(
            code,
            "21A",
            if case {
                "Monoexponential case"
            } else {
                "No case"
            },
        )?;
        t.insert(
            code,
            "21B",
            if binds(b, "tense") {
                "Monoexponential TAM"
            } else {
                "No TAM"
            },
        )?;
        let synthesis = match verb_bound {
            0..=1 => "0-1 category per word",
            2..=3 => "2-3 categories per word",
            4..=5 => "4-5 categories per word",
            _ => "6-7 categories per word",
        };
        t.insert(code, "22A", synthesis)?;
        let clause = match (case, person) {
            (false, false) => "No marking",
            (true, false) => "Dependent marking",
            (false, true) => "Head marking",
            (true, true) => "Double marking",
        };
        t.insert(code, "23A", clause)?;
        let possessive = if possessor {
            "Head marking"
        } else {
            "No marking"
        };
        t.insert(code, "24A", possessive)?;
        t.insert(code, "25A", clause)?;
        let zero = if case || person {
            "Non-zero marking"
        } else {
            "Zero-marking"
        };
        t.insert(code, "25B", zero)?;
        let affixation = if b <= 2 {
            "Little affixation"
        } else {
            "Strongly suffixing"
        };
        t.insert(code, "26A", affixation)?;
        if i % 4 != 3 {
            t.insert(code, "27A", "No productive reduplication")?;
        }
        if i % 3 != 2 {
            let syncretism = if case {
                "Core cases only"
            } else {
                "No case marking"
            };
            t.insert(code, "28A", syncretism)?;
        }
        let verbal = if person {
            "Not syncretic"
        } else {
            "No subject person/number marking"
        };
        t.insert(code, "29A", verbal)?;
    }
    Ok(t)
}

/// English-like suffixing toy segmenter. It also returns each covered
/// word unsegmented, so it is meant to be used with identity exclusion.
pub fn english_toy_fst() -> Fst {
    let mut b = SegmenterBuilder::new();
    for stem in ["walk", "talk", "jump", "play", "call", "kill", "look"] {
        b.add(&[stem]);
        for suffix in ["s", "ed", "ing", "er"] {
            b.add(&[stem, suffix]);
            b.add(&[format!("{stem}{suffix}")]);
        }
    }
    for stem in ["brother", "sword", "king", "house"] {
        b.add(&[stem]);
        b.add(&[stem, "s"]);
        b.add(&[format!("{stem}s")]);
    }
    b.build()
}

/// Turkish-like agglutinative toy segmenter covering the tokens of the
/// sample verse "Yuhannanın kardeşi Yakubu kılıçla öldürdü ." except the
/// first, plus a few inflected forms of the same stems.
pub fn turkish_toy_fst() -> Fst {
    let mut b = SegmenterBuilder::new();
    for a in [
        &["kardeş", "i"][..],
        &["kardeş"],
        &["kardeş", "ler"],
        &["kardeş", "ler", "i"],
        &["Yakub", "u"],
        &["Yakub"],
        &["kılıç", "la"],
        &["kı", "lıç", "la"],
        &["kılıç"],
        &["kılıç", "lar"],
        &["öl", "dür", "dü"],
        &["öl", "dü"],
        &["öl", "dür", "ecek"],
        &["."],
    ] {
        b.add(a);
    }
    b.build()
}
