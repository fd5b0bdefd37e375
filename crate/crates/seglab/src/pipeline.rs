//! Full pipeline: per-language cells, then the cross-language analysis.
//!
//! Languages run in parallel. Within a language the BPE merge table and
//! the Morfessor lexicon are trained once and shared by the plain and
//! FST-backed methods. A failing cell is recorded and never affects the
//! outputs of other cells. All reports are written after every cell has
//! finished, in configuration order.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seglab_core::corpus::{split_corpus, unk_singleton_chars};
use seglab_core::fst::fst_backoff_segment;
use seglab_core::lm::{surprisal_per_verse, train_lm};
use seglab_core::metrics::complexity_profile;
use seglab_core::morfessor::morfessor_train;
use seglab_core::segmentation::{
    bpe_apply, bpe_train, char_segment, merge_count_for, segment_with,
};
use seglab_core::{
    ComplexityProfile, DataSplit, Fst, MergeTable, Method, MorphLexicon, SegmentedVerse,
    VerseRecord,
};

use crate::analysis::{analyze, Analysis, AnalysisParams};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{att, corpus, lexicon, lm, merges, typology};
use crate::reports::{self, CellOutcome};

pub const SPLIT_NAMES: [&str; 3] = ["train", "dev", "test"];

/// Directory holding one language's artifacts.
pub fn language_dir(out: &Path, language: &str) -> PathBuf {
    out.join("languages").join(language)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageRun {
    pub language: String,
    /// `Err` when the corpus could not be read or profiled.
    pub profile: std::result::Result<ComplexityProfile, String>,
    pub cells: Vec<(Method, CellOutcome)>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub languages: Vec<LanguageRun>,
    pub analysis: Analysis,
}

impl RunOutput {
    pub fn errors(&self) -> usize {
        self.languages
            .iter()
            .flat_map(|l| &l.cells)
            .filter(|(_, c)| matches!(c, CellOutcome::Error(_)))
            .count()
    }
}

pub fn write_split(dir: &Path, split: &DataSplit) -> Result<()> {
    for (name, part) in SPLIT_NAMES
        .iter()
        .zip([&split.train, &split.dev, &split.test])
    {
        corpus::write_verses(&dir.join(format!("{name}.tsv")), part)?;
    }
    Ok(())
}

pub fn read_split(dir: &Path) -> Result<DataSplit> {
    let part = |name: &str| corpus::load_verses(&dir.join(format!("{name}.tsv")));
    Ok(DataSplit {
        train: part("train")?,
        dev: part("dev")?,
        test: part("test")?,
    })
}

/// Trained state shared by the cells of one language.
struct Models<'a> {
    config: &'a RunConfig,
    dir: PathBuf,
    split: DataSplit,
    types: usize,
    bpe: Option<Result<MergeTable, String>>,
    morfessor: Option<Result<MorphLexicon, String>>,
    fst: Option<Result<Option<Fst>, String>>,
}

impl Models<'_> {
    fn bpe(&mut self) -> std::result::Result<&MergeTable, String> {
        if self.bpe.is_none() {
            let table = bpe_train(
                &self.split.train,
                merge_count_for(self.types, self.config.merge_fraction),
            );
            let saved = merges::write_merges(&self.dir.join("bpe.merges"), &table);
            self.bpe = Some(saved.map(|_| table).map_err(|e| e.to_string()));
        }
        self.bpe
            .as_ref()
            .expect("just set")
            .as_ref()
            .map_err(Clone::clone)
    }

    fn morfessor(&mut self) -> std::result::Result<&MorphLexicon, String> {
        if self.morfessor.is_none() {
            let lex = morfessor_train(&self.split.train, &self.config.morfessor);
            let saved = lexicon::write_lexicon(&self.dir.join("morfessor.lexicon"), &lex);
            self.morfessor = Some(saved.map(|_| lex).map_err(|e| e.to_string()));
        }
        self.morfessor
            .as_ref()
            .expect("just set")
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `Ok(None)` when no FST is configured for the language.
    fn fst(&mut self, language: &str) -> std::result::Result<Option<&Fst>, String> {
        if self.fst.is_none() {
            let loaded = match self.config.fst_dir(language) {
                None => Ok(None),
                Some(dir) => att::load_fst_dir(dir).map(Some).map_err(|e| e.to_string()),
            };
            self.fst = Some(loaded);
        }
        match self.fst.as_ref().expect("just set") {
            Ok(f) => Ok(f.as_ref()),
            Err(e) => Err(e.clone()),
        }
    }

    fn segment(
        &mut self,
        method: Method,
        language: &str,
        verses: &[VerseRecord],
    ) -> std::result::Result<Vec<SegmentedVerse>, CellOutcome> {
        let fail = |e: String| CellOutcome::Error(e);
        let seg_err =
            |e: seglab_core::segmentation::SegmentError| CellOutcome::Error(e.to_string());
        let policy = self.config.fst_policy;
        match method {
            Method::Char => Ok(verses.iter().map(char_segment).collect()),
            Method::Bpe => {
                let table = self.bpe().map_err(fail)?;
                Ok(verses.iter().map(|v| bpe_apply(table, v)).collect())
            }
            Method::Morfessor => {
                let lex = self.morfessor().map_err(fail)?;
                verses
                    .iter()
                    .map(|v| segment_with(lex, v, method))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(seg_err)
            }
            Method::FstBpe | Method::FstMorfessor => {
                let Some(fst) = self.fst(language).map_err(fail)?.cloned() else {
                    return Err(CellOutcome::Skipped(format!(
                        "no FST configured for {language}"
                    )));
                };
                let run = |fallback: &dyn seglab_core::WordSegmenter| {
                    verses
                        .iter()
                        .map(|v| fst_backoff_segment(&fst, &policy, fallback, v, method))
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(seg_err)
                };
                if method == Method::FstBpe {
                    run(self.bpe().map_err(fail)?)
                } else {
                    run(self.morfessor().map_err(fail)?)
                }
            }
        }
    }

    fn cell(&mut self, method: Method, language: &str) -> CellOutcome {
        let config = self.config;
        let train = self.split.train.clone();
        let test = self.split.test.clone();
        let result = (|| {
            let seg_train = self.segment(method, language, &train)?;
            let seg_test = self.segment(method, language, &test)?;
            let err = |e: Error| CellOutcome::Error(e.to_string());
            let dir = self.dir.join(method.as_str());
            corpus::write_segmented(&dir.join("train.seg"), &seg_train).map_err(err)?;
            corpus::write_segmented(&dir.join("test.seg"), &seg_test).map_err(err)?;
            let model = train_lm(&seg_train, config.lm_order, config.lm_discount)
                .map_err(|e| err(e.into()))?;
            lm::write_lm(&dir.join("lm.txt"), &model).map_err(err)?;
            surprisal_per_verse(&model, &seg_test, language, method).map_err(|e| err(e.into()))
        })();
        match result {
            Ok(report) => CellOutcome::Ok(report),
            Err(outcome) => outcome,
        }
    }
}

fn prepare(
    config: &RunConfig,
    language: &str,
    path: &Path,
    dir: &Path,
) -> Result<(DataSplit, ComplexityProfile)> {
    let corpus = corpus::load_corpus(path, language)?;
    let split = unk_singleton_chars(&split_corpus(&corpus)?);
    if split.test.is_empty() {
        return Err(Error::Config(format!(
            "{language}: corpus has no complete 30-verse block, so the test set is empty"
        )));
    }
    write_split(dir, &split)?;
    let profile = complexity_profile(&split.train, config.mattr_window)
        .map_err(|e| Error::Config(format!("{language}: {e}")))?;
    Ok((split, profile))
}

pub fn run_language(config: &RunConfig, language: &str, path: &Path) -> LanguageRun {
    let dir = language_dir(&config.output_dir, language);
    let (split, profile) = match prepare(config, language, path, &dir) {
        Ok(x) => x,
        Err(e) => {
            let msg = e.to_string();
            return LanguageRun {
                language: language.to_string(),
                profile: Err(msg.clone()),
                cells: config
                    .methods
                    .iter()
                    .map(|&m| (m, CellOutcome::Error(msg.clone())))
                    .collect(),
            };
        }
    };
    let mut models = Models {
        config,
        dir,
        split,
        types: profile.types,
        bpe: None,
        morfessor: None,
        fst: None,
    };
    let cells = config
        .methods
        .iter()
        .map(|&m| (m, models.cell(m, language)))
        .collect();
    LanguageRun {
        language: language.to_string(),
        profile: Ok(profile),
        cells,
    }
}

pub fn analysis_params(config: &RunConfig) -> AnalysisParams {
    AnalysisParams {
        alpha: config.alpha,
        family: config.family.clone(),
        min_group_size: config.min_group_size,
        p_values: config.p_values,
    }
}

/// Runs every cell, then writes reports, analysis and plots.
pub fn run_pipeline(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let typology = config
        .typology
        .as_deref()
        .map(typology::load_typology)
        .transpose()?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let languages: Vec<LanguageRun> = config
        .corpora
        .par_iter()
        .map(|(lang, path)| run_language(config, lang, path))
        .collect();

    let profiles: Vec<(String, ComplexityProfile)> = languages
        .iter()
        .filter_map(|l| Some((l.language.clone(), l.profile.clone().ok()?)))
        .collect();
    reports::write_complexity(&out.join(reports::COMPLEXITY_CSV), &profiles)?;
    let cells: Vec<(String, Method, CellOutcome)> = languages
        .iter()
        .flat_map(|l| {
            l.cells
                .iter()
                .map(|(m, c)| (l.language.clone(), *m, c.clone()))
        })
        .collect();
    let summary = reports::summary_rows(&cells);
    reports::write_summary(&out.join(reports::SUMMARY_CSV), &summary)?;
    let ok: Vec<_> = cells
        .iter()
        .filter_map(|(_, _, c)| match c {
            CellOutcome::Ok(r) => Some(r),
            _ => None,
        })
        .collect();
    reports::write_verses(&out.join(reports::VERSES_CSV), &ok)?;

    let input = reports::analysis_input(&summary, &profiles);
    let analysis = analyze(&input, typology.as_ref(), &analysis_params(config))?;
    reports::write_analysis(out, &analysis)?;
    crate::plot::emit_plots(&out.join("plots"), &input)?;
    std::fs::write(out.join("config.ini"), config.to_ini()).map_err(|e| Error::io(out, e))?;
    Ok(RunOutput {
        languages,
        analysis,
    })
}
