use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use seglab::analysis::analyze;
use seglab::config::{default_family, RunConfig, OUTPUT_DIR_ENV};
use seglab::formats::{att, corpus, lexicon, lm, merges, typology};
use seglab::pipeline;
use seglab::reports::{self, CellOutcome};
use seglab::synth::{self, SynthConfig};
use seglab_core::corpus::{split_corpus, unk_singleton_chars};
use seglab_core::fst::fst_backoff_segment;
use seglab_core::lm::{surprisal_per_verse, train_lm, DEFAULT_DISCOUNT, DEFAULT_ORDER};
use seglab_core::metrics::{complexity_profile, DEFAULT_MATTR_WINDOW};
use seglab_core::morfessor::{morfessor_train, CountMode};
use seglab_core::segmentation::{
    bpe_apply, bpe_train, char_segment, merge_count_for, segment_with,
};
use seglab_core::stats::{PValueMode, DEFAULT_ALPHA, MIN_GROUP_SIZE};
use seglab_core::{Method, MorfessorConfig, SegmentedVerse, SegmenterPolicy, VerseRecord};

#[derive(Parser)]
#[command(
    name = "seglab",
    version,
    about = "Subword segmentation and surprisal laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a corpus into train/dev/test by 30-verse blocks.
    Split {
        corpus: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Defaults to the file stem.
        #[arg(long)]
        language: Option<String>,
    },
    /// Replace characters seen at most once in train with the UNK symbol.
    Preprocess {
        /// Directory holding train.tsv, dev.tsv and test.tsv.
        split: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Types, TTR, MATTR and MLW of a training file.
    Complexity {
        train: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MATTR_WINDOW)]
        window: usize,
        /// Defaults to the file stem.
        #[arg(long)]
        language: Option<String>,
    },
    /// Train a BPE merge table or a Morfessor lexicon.
    TrainSeg {
        #[arg(long)]
        method: Method,
        train: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        merge_fraction: f64,
        #[command(flatten)]
        morfessor: MorfessorArgs,
    },
    /// Segment a verse file into marked units.
    Segment {
        #[arg(long)]
        method: Method,
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Merge table or lexicon; FST methods use it as the fallback.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Directory with fst.att, isyms.txt and osyms.txt.
        #[arg(long)]
        fst: Option<PathBuf>,
        #[arg(long)]
        exclude_identity: bool,
    },
    /// Train an n-gram model on a segmented file.
    TrainLm {
        train: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_DISCOUNT)]
        discount: f64,
    },
    /// Surprisal per verse of a segmented test file.
    Eval {
        #[arg(long)]
        lm: PathBuf,
        test: PathBuf,
        #[arg(long)]
        method: Method,
        /// Defaults to the file stem.
        #[arg(long)]
        language: Option<String>,
        /// Per-verse CSV; the mean is printed either way.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Cross-language tests over the reports of a run directory.
    Analyze {
        dir: PathBuf,
        #[arg(long)]
        typology: Option<PathBuf>,
        #[command(flatten)]
        stats: StatsArgs,
    },
    /// Run the full pipeline from a config file.
    Run {
        config: PathBuf,
        #[arg(long, env = OUTPUT_DIR_ENV)]
        output_dir: Option<PathBuf>,
    },
    /// Redraw the SVG plots of a run directory.
    Plot { dir: PathBuf },
    /// Write synthetic corpora, typology, FSTs and a config.
    Synth {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = SynthConfig::default().languages)]
        languages: usize,
        #[arg(long, default_value_t = SynthConfig::default().verses)]
        verses: usize,
        #[arg(long, default_value_t = SynthConfig::default().seed)]
        seed: u64,
    },
}

#[derive(Args)]
struct MorfessorArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Count each word type once (`types`) or every token (`tokens`).
    #[arg(long, default_value = "types")]
    count: String,
}

impl MorfessorArgs {
    fn config(&self) -> Result<MorfessorConfig> {
        let count_mode = match self.count.as_str() {
            "types" => CountMode::Types,
            "tokens" => CountMode::Tokens,
            other => bail!("unknown count mode {other:?}"),
        };
        Ok(MorfessorConfig {
            count_mode,
            seed: self.seed,
            ..MorfessorConfig::default()
        })
    }
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Comma-separated feature ids and measure names.
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<String>>,
    #[arg(long, default_value_t = MIN_GROUP_SIZE)]
    min_group_size: usize,
    #[arg(long)]
    asymptotic: bool,
}

fn language_or_stem(language: Option<String>, path: &Path) -> String {
    language.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    })
}

fn load_segmented(path: &Path, method: Method) -> Result<Vec<SegmentedVerse>> {
    Ok(corpus::load_segmented(path, method)?)
}

fn segment_file(
    method: Method,
    verses: &[VerseRecord],
    model: Option<&Path>,
    fst: Option<&Path>,
    exclude_identity: bool,
) -> Result<Vec<SegmentedVerse>> {
    let model = || model.context("--model is required for this method");
    let fst = match (method.uses_fst(), fst) {
        (true, Some(dir)) => Some(att::load_fst_dir(dir)?),
        (true, None) => bail!("--fst is required for {method}"),
        (false, _) => None,
    };
    let policy = SegmenterPolicy {
        exclude_identity,
        ..SegmenterPolicy::default()
    };
    let out = match method {
        Method::Char => verses.iter().map(char_segment).collect(),
        Method::Bpe => {
            let table = merges::load_merges(model()?)?;
            verses.iter().map(|v| bpe_apply(&table, v)).collect()
        }
        Method::Morfessor => {
            let lex = lexicon::load_lexicon(model()?, None)?;
            verses
                .iter()
                .map(|v| segment_with(&lex, v, method))
                .collect::<Result<_, _>>()?
        }
        Method::FstBpe => {
            let table = merges::load_merges(model()?)?;
            let fst = fst.expect("checked above");
            verses
                .iter()
                .map(|v| fst_backoff_segment(&fst, &policy, &table, v, method))
                .collect::<Result<_, _>>()?
        }
        Method::FstMorfessor => {
            let lex = lexicon::load_lexicon(model()?, None)?;
            let fst = fst.expect("checked above");
            verses
                .iter()
                .map(|v| fst_backoff_segment(&fst, &policy, &lex, v, method))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(out)
}

fn print_cells(runs: &[pipeline::LanguageRun]) {
    for run in runs {
        for (method, outcome) in &run.cells {
            let detail = match outcome {
                CellOutcome::Ok(r) => {
                    format!("L = {:.3} bits over {} verses", r.mean, r.per_verse.len())
                }
                CellOutcome::Skipped(why) | CellOutcome::Error(why) => why.clone(),
            };
            println!("{}\t{method}\t{}\t{detail}", run.language, outcome.status());
        }
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Split {
            corpus: path,
            out,
            language,
        } => {
            let c = corpus::load_corpus(&path, &language_or_stem(language, &path))?;
            let split = split_corpus(&c)?;
            pipeline::write_split(&out, &split)?;
            println!(
                "train {} dev {} test {}",
                split.train.len(),
                split.dev.len(),
                split.test.len()
            );
        }
        Command::Preprocess { split, out } => {
            let s = unk_singleton_chars(&pipeline::read_split(&split)?);
            pipeline::write_split(&out, &s)?;
        }
        Command::Complexity {
            train,
            window,
            language,
        } => {
            let verses = corpus::load_verses(&train)?;
            let p = complexity_profile(&verses, window)?;
            let language = language_or_stem(language, &train);
            println!("language_code\ttoken_count\ttypes\tttr\tmattr\tmlw");
            println!(
                "{language}\t{}\t{}\t{}\t{}\t{}",
                p.token_count, p.types, p.ttr, p.mattr, p.mlw
            );
        }
        Command::TrainSeg {
            method,
            train,
            out,
            merge_fraction,
            morfessor,
        } => {
            let verses = corpus::load_verses(&train)?;
            match method {
                Method::Bpe => {
                    if !(merge_fraction > 0.0 && merge_fraction <= 1.0) {
                        bail!("--merge-fraction must be in (0, 1]");
                    }
                    let types = complexity_profile(&verses, 1)?.types;
                    let table = bpe_train(&verses, merge_count_for(types, merge_fraction));
                    merges::write_merges(&out, &table)?;
                    println!("{} merges", table.len());
                }
                Method::Morfessor => {
                    let lex = morfessor_train(&verses, &morfessor.config()?);
                    lexicon::write_lexicon(&out, &lex)?;
                    println!(
                        "{} morphs, cost {:.1} bits",
                        lex.morphs().len(),
                        lex.total_cost()
                    );
                }
                other => bail!("{other} has no trainable segmenter; use bpe or morfessor"),
            }
        }
        Command::Segment {
            method,
            input,
            out,
            model,
            fst,
            exclude_identity,
        } => {
            let verses = corpus::load_verses(&input)?;
            let seg = segment_file(
                method,
                &verses,
                model.as_deref(),
                fst.as_deref(),
                exclude_identity,
            )?;
            corpus::write_segmented(&out, &seg)?;
        }
        Command::TrainLm {
            train,
            method,
            out,
            order,
            discount,
        } => {
            let seg = load_segmented(&train, method)?;
            let model = train_lm(&seg, order, discount)?;
            lm::write_lm(&out, &model)?;
        }
        Command::Eval {
            lm: lm_path,
            test,
            method,
            language,
            out,
        } => {
            let model = lm::load_lm(&lm_path)?;
            let seg = load_segmented(&test, method)?;
            let language = language_or_stem(language, &test);
            let report = surprisal_per_verse(&model, &seg, &language, method)?;
            if let Some(out) = out {
                reports::write_verses(&out, &[&report])?;
            }
            println!("{}", report.mean);
        }
        Command::Analyze {
            dir,
            typology: typ,
            stats,
        } => {
            let summary = reports::read_summary(&dir.join(reports::SUMMARY_CSV))?;
            let profiles = reports::read_complexity(&dir.join(reports::COMPLEXITY_CSV))?;
            let input = reports::analysis_input(&summary, &profiles);
            let table = typ.as_deref().map(typology::load_typology).transpose()?;
            let params = seglab::analysis::AnalysisParams {
                alpha: stats.alpha,
                family: stats.family.unwrap_or_else(default_family),
                min_group_size: stats.min_group_size,
                p_values: if stats.asymptotic {
                    PValueMode::Asymptotic
                } else {
                    PValueMode::Auto
                },
            };
            let analysis = analyze(&input, table.as_ref(), &params)?;
            reports::write_analysis(&dir, &analysis)?;
        }
        Command::Run { config, output_dir } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            let out = pipeline::run_pipeline(&cfg)?;
            print_cells(&out.languages);
            return Ok(out.errors() == 0);
        }
        Command::Plot { dir } => {
            let summary = reports::read_summary(&dir.join(reports::SUMMARY_CSV))?;
            let profiles = reports::read_complexity(&dir.join(reports::COMPLEXITY_CSV))?;
            let input = reports::analysis_input(&summary, &profiles);
            for p in seglab::plot::emit_plots(&dir.join("plots"), &input)? {
                println!("{}", p.display());
            }
        }
        Command::Synth {
            out,
            languages,
            verses,
            seed,
        } => {
            let config = SynthConfig {
                languages,
                verses,
                seed,
                ..SynthConfig::default()
            };
            let path = synth::write_workspace(&out, &config)?;
            println!("{}", path.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
