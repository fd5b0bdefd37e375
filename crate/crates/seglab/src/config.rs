//! Run configuration in an INI-like key-value format.
//!
//! ```text
//! [run]
//! output_dir = out
//! methods = char, bpe, morfessor, fst_bpe, fst_morfessor
//! typology = typology.tsv
//!
//! [corpus]
//! tur = corpora/tur.tsv
//!
//! [fst]
//! tur = fst/tur
//! ```
//!
//! Relative paths resolve against the directory of the config file.
//! Every key in `[run]` is optional.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use seglab_core::metrics::DEFAULT_MATTR_WINDOW;
use seglab_core::morfessor::CountMode;
use seglab_core::stats::{PValueMode, DEFAULT_ALPHA, MIN_GROUP_SIZE};
use seglab_core::wals::feature_ids;
use seglab_core::{Method, MorfessorConfig, SegmenterPolicy};

use crate::error::{read_to_string, Error, Result};

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "SEGLAB_OUTPUT_DIR";

/// Complexity measures that can be correlated with surprisal.
pub const MEASURES: [&str; 4] = ["types", "ttr", "mattr", "mlw"];

pub const DEFAULT_MERGE_FRACTION: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `(language, corpus path)` in run order.
    pub corpora: Vec<(String, PathBuf)>,
    pub methods: Vec<Method>,
    pub merge_fraction: f64,
    pub lm_order: usize,
    pub lm_discount: f64,
    pub mattr_window: usize,
    pub alpha: f64,
    /// Feature ids and measure names sharing one FDR family per method.
    pub family: Vec<String>,
    pub min_group_size: usize,
    pub p_values: PValueMode,
    pub morfessor: MorfessorConfig,
    pub fst_policy: SegmenterPolicy,
    /// `(language, AT&T directory)`.
    pub fst_dirs: Vec<(String, PathBuf)>,
    pub typology: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpora: Vec::new(),
            methods: Method::ALL.to_vec(),
            merge_fraction: DEFAULT_MERGE_FRACTION,
            lm_order: seglab_core::lm::DEFAULT_ORDER,
            lm_discount: seglab_core::lm::DEFAULT_DISCOUNT,
            mattr_window: DEFAULT_MATTR_WINDOW,
            alpha: DEFAULT_ALPHA,
            family: default_family(),
            min_group_size: MIN_GROUP_SIZE,
            p_values: PValueMode::Auto,
            morfessor: MorfessorConfig::default(),
            fst_policy: SegmenterPolicy::default(),
            fst_dirs: Vec::new(),
            typology: None,
            output_dir: PathBuf::from("seglab-out"),
        }
    }
}

/// The twelve features followed by the four measures.
pub fn default_family() -> Vec<String> {
    feature_ids().chain(MEASURES).map(String::from).collect()
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key} = {value:?}: {why}"))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| bad(key, value, e))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut config = Self::parse(&text, base)?;
        config.apply_env();
        Ok(config)
    }

    /// Parses config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut c = RunConfig::default();
        let resolve = |p: &str| base.join(p.trim());
        for (section, props) in ini.iter() {
            match section {
                None if props.is_empty() => {}
                None => return Err(Error::Config("keys outside a section".into())),
                Some("corpus") => {
                    for (lang, p) in props.iter() {
                        c.corpora.push((lang.to_string(), resolve(p)));
                    }
                }
                Some("fst") => {
                    for (lang, p) in props.iter() {
                        c.fst_dirs.push((lang.to_string(), resolve(p)));
                    }
                }
                Some("run") => {
                    for (key, value) in props.iter() {
                        c.set(key, value, &resolve)?;
                    }
                }
                Some(other) => return Err(Error::Config(format!("unknown section [{other}]"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, value: &str, resolve: &impl Fn(&str) -> PathBuf) -> Result<()> {
        match key {
            "output_dir" => self.output_dir = resolve(value),
            "typology" => self.typology = Some(resolve(value)),
            "methods" => {
                self.methods = list(value)
                    .map(|m| m.parse().map_err(|e| bad(key, value, e)))
                    .collect::<Result<_>>()?;
            }
            "merge_fraction" => self.merge_fraction = parse(key, value)?,
            "lm_order" => self.lm_order = parse(key, value)?,
            "lm_discount" => self.lm_discount = parse(key, value)?,
            "mattr_window" => self.mattr_window = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "family" => self.family = list(value).map(String::from).collect(),
            "min_group_size" => self.min_group_size = parse(key, value)?,
            "p_values" => {
                self.p_values = match value.trim() {
                    "auto" => PValueMode::Auto,
                    "asymptotic" => PValueMode::Asymptotic,
                    _ => return Err(bad(key, value, "expected auto or asymptotic")),
                }
            }
            "morfessor_seed" => self.morfessor.seed = parse(key, value)?,
            "morfessor_count" => {
                self.morfessor.count_mode = match value.trim() {
                    "types" => CountMode::Types,
                    "tokens" => CountMode::Tokens,
                    _ => return Err(bad(key, value, "expected types or tokens")),
                }
            }
            "exclude_identity" => self.fst_policy.exclude_identity = parse_bool(key, value)?,
            "fst_max_outputs" => self.fst_policy.max_outputs = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?} in [run]"))),
        }
        Ok(())
    }

    pub fn apply_env(&mut self) {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.output_dir = PathBuf::from(dir);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.corpora.is_empty() {
            return fail("no languages in [corpus]");
        }
        if self.methods.is_empty() {
            return fail("no methods");
        }
        if !(self.merge_fraction > 0.0 && self.merge_fraction <= 1.0) {
            return fail("merge_fraction must be in (0, 1]");
        }
        if self.mattr_window == 0 {
            return fail("mattr_window must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("alpha must be in (0, 1)");
        }
        if self.lm_order == 0 {
            return fail("lm_order must be at least 1");
        }
        if !(self.lm_discount > 0.0 && self.lm_discount < 1.0) {
            return fail("lm_discount must be in (0, 1)");
        }
        let mut langs: Vec<&str> = self.corpora.iter().map(|(l, _)| l.as_str()).collect();
        langs.sort_unstable();
        if langs.windows(2).any(|w| w[0] == w[1]) {
            return fail("language listed twice in [corpus]");
        }
        for name in &self.family {
            if !MEASURES.contains(&name.as_str()) && !feature_ids().any(|f| f == name) {
                return Err(Error::Config(format!(
                    "family member {name:?} is neither a feature nor a measure"
                )));
            }
        }
        Ok(())
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.corpora.iter().map(|(l, _)| l.as_str())
    }

    pub fn fst_dir(&self, language: &str) -> Option<&Path> {
        self.fst_dirs
            .iter()
            .find(|(l, _)| l == language)
            .map(|(_, p)| p.as_path())
    }

    /// Renders the config back to text; `parse` of the result with an
    /// empty base reproduces `self`.
    pub fn to_ini(&self) -> String {
        let mut s = String::from("[run]\n");
        let kv = |s: &mut String, k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv(&mut s, "output_dir", self.output_dir.display().to_string());
        if let Some(t) = &self.typology {
            kv(&mut s, "typology", t.display().to_string());
        }
        let methods: Vec<&str> = self.methods.iter().map(|m| m.as_str()).collect();
        kv(&mut s, "methods", methods.join(", "));
        kv(&mut s, "merge_fraction", self.merge_fraction.to_string());
        kv(&mut s, "lm_order", self.lm_order.to_string());
        kv(&mut s, "lm_discount", self.lm_discount.to_string());
        kv(&mut s, "mattr_window", self.mattr_window.to_string());
        kv(&mut s, "alpha", self.alpha.to_string());
        kv(&mut s, "family", self.family.join(", "));
        kv(&mut s, "min_group_size", self.min_group_size.to_string());
        let pv = match self.p_values {
            PValueMode::Auto => "auto",
            PValueMode::Asymptotic => "asymptotic",
        };
        kv(&mut s, "p_values", pv.into());
        kv(&mut s, "morfessor_seed", self.morfessor.seed.to_string());
        let count = match self.morfessor.count_mode {
            CountMode::Types => "types",
            CountMode::Tokens => "tokens",
        };
        kv(&mut s, "morfessor_count", count.into());
        kv(
            &mut s,
            "exclude_identity",
            self.fst_policy.exclude_identity.to_string(),
        );
        kv(
            &mut s,
            "fst_max_outputs",
            self.fst_policy.max_outputs.to_string(),
        );
        s.push_str("\n[corpus]\n");
        for (l, p) in &self.corpora {
            kv(&mut s, l, p.display().to_string());
        }
        if !self.fst_dirs.is_empty() {
            s.push_str("\n[fst]\n");
            for (l, p) in &self.fst_dirs {
                kv(&mut s, l, p.display().to_string());
            }
        }
        s
    }
}
