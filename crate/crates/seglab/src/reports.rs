//! CSV reports. Floats use the shortest representation that round-trips
//! (exponent form outside 1e-5..1e16), so rereading a report reproduces
//! the values bit for bit.

use std::collections::BTreeMap;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Writer};
use seglab_core::{ComplexityProfile, Method, SurprisalReport};

use crate::analysis::{Analysis, AnalysisInput};
use crate::error::{write_file, Error, Result};

pub const COMPLEXITY_CSV: &str = "complexity.csv";
pub const SUMMARY_CSV: &str = "surprisal_summary.csv";
pub const VERSES_CSV: &str = "surprisal_verses.csv";
pub const ANALYSIS_CSV: &str = "analysis.csv";
pub const DELTAS_CSV: &str = "deltas.csv";

/// Outcome of one (language, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Ok(SurprisalReport),
    Skipped(String),
    Error(String),
}

impl CellOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            CellOutcome::Ok(_) => "OK",
            CellOutcome::Skipped(_) => "SKIPPED",
            CellOutcome::Error(_) => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub language: String,
    pub method: Method,
    pub status: String,
    pub l_bits: Option<f64>,
    pub n_verses: Option<usize>,
    pub note: String,
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn to_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = Writer::from_writer(Vec::new());
    let wrap = |e| Error::csv(path, e);
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r.into_iter().collect::<Vec<_>>())
            .map_err(wrap)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::csv(path, e.into_error().into()))?;
    write_file(path, bytes)
}

/// Rows of `path` as header-keyed maps, with 1-based line numbers.
fn from_csv(path: &Path, required: &[&str]) -> Result<Vec<(usize, BTreeMap<String, String>)>> {
    let mut r = ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;
    let header: StringRecord = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    for col in required {
        if !header.iter().any(|h| h == *col) {
            return Err(Error::parse(path, 1, format!("missing column {col:?}")));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let map = header
            .iter()
            .zip(rec.iter())
            .map(|(h, v)| (h.to_string(), v.to_string()))
            .collect();
        rows.push((i + 2, map));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    row: &BTreeMap<String, String>,
    col: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = row.get(col).map(String::as_str).unwrap_or("");
    raw.parse()
        .map_err(|e| Error::parse(path, line, format!("{col} = {raw:?}: {e}")))
}

const COMPLEXITY_HEADER: [&str; 6] = [
    "language_code",
    "token_count",
    "types",
    "ttr",
    "mattr",
    "mlw",
];

pub fn write_complexity(path: &Path, profiles: &[(String, ComplexityProfile)]) -> Result<()> {
    to_csv(
        path,
        &COMPLEXITY_HEADER,
        profiles.iter().map(|(lang, p)| {
            [
                lang.clone(),
                p.token_count.to_string(),
                p.types.to_string(),
                num(p.ttr),
                num(p.mattr),
                num(p.mlw),
            ]
        }),
    )
}

pub fn read_complexity(path: &Path) -> Result<Vec<(String, ComplexityProfile)>> {
    from_csv(path, &COMPLEXITY_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            let profile = ComplexityProfile {
                token_count: field(path, line, &row, "token_count")?,
                types: field(path, line, &row, "types")?,
                ttr: field(path, line, &row, "ttr")?,
                mattr: field(path, line, &row, "mattr")?,
                mlw: field(path, line, &row, "mlw")?,
            };
            Ok((row["language_code"].clone(), profile))
        })
        .collect()
}

const SUMMARY_HEADER: [&str; 6] = [
    "language_code",
    "method",
    "status",
    "L_bits",
    "n_verses",
    "note",
];

pub fn summary_rows(cells: &[(String, Method, CellOutcome)]) -> Vec<SummaryRow> {
    cells
        .iter()
        .map(|(lang, method, out)| {
            let (l_bits, n_verses, note) = match out {
                CellOutcome::Ok(r) => (Some(r.mean), Some(r.per_verse.len()), String::new()),
                CellOutcome::Skipped(why) | CellOutcome::Error(why) => (None, None, why.clone()),
            };
            SummaryRow {
                language: lang.clone(),
                method: *method,
                status: out.status().to_string(),
                l_bits,
                n_verses,
                note,
            }
        })
        .collect()
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    to_csv(
        path,
        &SUMMARY_HEADER,
        rows.iter().map(|r| {
            [
                r.language.clone(),
                r.method.to_string(),
                r.status.clone(),
                opt(r.l_bits.map(num)),
                opt(r.n_verses),
                r.note.clone(),
            ]
        }),
    )
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    from_csv(path, &SUMMARY_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            let l_bits = match row["L_bits"].as_str() {
                "" => None,
                _ => Some(field(path, line, &row, "L_bits")?),
            };
            let n_verses = match row["n_verses"].as_str() {
                "" => None,
                _ => Some(field(path, line, &row, "n_verses")?),
            };
            Ok(SummaryRow {
                language: row["language_code"].clone(),
                method: field(path, line, &row, "method")?,
                status: row["status"].clone(),
                l_bits,
                n_verses,
                note: row["note"].clone(),
            })
        })
        .collect()
}

pub fn write_verses(path: &Path, reports: &[&SurprisalReport]) -> Result<()> {
    to_csv(
        path,
        &["language_code", "method", "verse_id", "nll_bits"],
        reports.iter().flat_map(|r| {
            r.per_verse.iter().map(move |(id, bits)| {
                [
                    r.language_code.clone(),
                    r.method.to_string(),
                    id.clone(),
                    num(*bits),
                ]
            })
        }),
    )
}

/// Joins summary and complexity reports into analysis input. Methods keep
/// the order of first appearance; only OK cells contribute surprisal.
pub fn analysis_input(
    summary: &[SummaryRow],
    profiles: &[(String, ComplexityProfile)],
) -> AnalysisInput {
    let mut languages: Vec<String> = Vec::new();
    let mut surprisal: Vec<(Method, BTreeMap<String, f64>)> = Vec::new();
    for row in summary {
        if !languages.contains(&row.language) {
            languages.push(row.language.clone());
        }
        let slot = match surprisal.iter().position(|(m, _)| *m == row.method) {
            Some(i) => i,
            None => {
                surprisal.push((row.method, BTreeMap::new()));
                surprisal.len() - 1
            }
        };
        if let (Some(l), "OK") = (row.l_bits, row.status.as_str()) {
            surprisal[slot].1.insert(row.language.clone(), l);
        }
    }
    for (lang, _) in profiles {
        if !languages.contains(lang) {
            languages.push(lang.clone());
        }
    }
    AnalysisInput {
        languages,
        profiles: profiles.iter().cloned().collect(),
        surprisal,
    }
}

pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<()> {
    let header = [
        "method",
        "subject",
        "test",
        "statistic",
        "p_value",
        "p_method",
        "effect_size",
        "effect",
        "bh_significant",
        "sizes",
        "included",
        "missing_feature",
        "missing_surprisal",
        "status",
        "note",
    ];
    to_csv(
        &dir.join(ANALYSIS_CSV),
        &header,
        analysis.rows.iter().map(|r| {
            let s = &r.result;
            let sizes: Vec<String> = s.sizes.iter().map(usize::to_string).collect();
            let acc = r.accounting;
            vec![
                r.method.clone(),
                r.subject.clone(),
                s.test.to_string(),
                num(s.statistic),
                opt(s.p_value.map(num)),
                opt(s.p_method.map(|m| m.as_str())),
                opt(s.effect_size.map(num)),
                opt(r.effect()),
                opt(r.bh_significant),
                sizes.join(";"),
                opt(acc.map(|a| a.included)),
                opt(acc.map(|a| a.missing_feature)),
                opt(acc.map(|a| a.missing_surprisal)),
                if s.status.is_ok() { "OK" } else { "SKIPPED" }.to_string(),
                r.note().to_string(),
            ]
        }),
    )?;
    to_csv(
        &dir.join(DELTAS_CSV),
        &["language_code", "first", "second", "delta"],
        analysis.deltas.iter().map(|d| {
            [
                d.language.clone(),
                d.first.to_string(),
                d.second.to_string(),
                num(d.delta),
            ]
        }),
    )
}
