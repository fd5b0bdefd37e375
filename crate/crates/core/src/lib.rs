//! Subword segmentation laboratory core.
//!
//! Everything in this crate is pure computation over in-memory data and
//! builds without `std` (an allocator is required). File formats, the
//! pipeline driver and the command line live in the `seglab` crate.
//!
//! The modules follow the pipeline order:
//!
//! - [`corpus`]: verse-aligned corpora, the 30-verse block split and
//!   singleton-character UNK replacement.
//! - [`metrics`]: types, TTR, MATTR and mean word length.
//! - [`segmentation`]: character and BPE segmentation and the shared
//!   segmented-verse representation.
//! - [`morfessor`]: MDL-style unsupervised morph lexicon.
//! - [`fst`]: transducer runtime and the analyzer-to-segmenter adapter.
//! - [`lm`]: open-vocabulary n-gram model and surprisal per verse.
//! - [`stats`]: Kruskal–Wallis, Spearman, Benjamini–Hochberg, Dunn, Δ.
//! - [`wals`]: typology feature tables and grouping.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod fst;
pub mod lm;
pub mod metrics;
pub mod morfessor;
pub mod segmentation;
pub mod stats;
pub mod wals;

pub use corpus::{DataSplit, ParallelCorpus, VerseRecord, UNK_CHAR};
pub use fst::{Fst, SegmenterPolicy};
pub use lm::{LanguageModel, SurprisalReport};
pub use metrics::ComplexityProfile;
pub use morfessor::{MorfessorConfig, MorphLexicon};
pub use segmentation::{MergeTable, Method, SegmentedVerse, WordSegmenter};
pub use stats::{StatResult, Status};
pub use wals::TypologyTable;
