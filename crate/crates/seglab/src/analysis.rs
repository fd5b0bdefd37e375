//! Cross-language analysis over per-language surprisal and complexity.
//!
//! For each method: Kruskal–Wallis per typology feature (with Dunn
//! post-hoc comparisons for features that survive FDR control) and
//! Spearman correlation of L against each complexity measure. For each
//! method pair: Δ per language and Spearman of Δ against each measure.
//! Pairs put the later method of the configured order first, so with the
//! default order Δ(bpe, char) > 0 means characters modelled the language
//! better.
//! Benjamini–Hochberg runs once per method (and once per pair) over the
//! p-values of the configured family members.

use std::collections::BTreeMap;

use seglab_core::stats::{
    benjamini_hochberg, delta, dunn_posthoc, effect_label, filter_small_groups,
    kruskal_wallis_with, spearman_with, PValueMode,
};
use seglab_core::wals::{feature_ids, group_by_feature};
use seglab_core::{ComplexityProfile, Method, StatResult, Status, TypologyTable};

use crate::config::MEASURES;
use crate::error::Result;

pub fn measure(profile: &ComplexityProfile, name: &str) -> Option<f64> {
    match name {
        "types" => Some(profile.types as f64),
        "ttr" => Some(profile.ttr),
        "mattr" => Some(profile.mattr),
        "mlw" => Some(profile.mlw),
        _ => None,
    }
}

/// Everything the analysis needs from the per-language stage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalysisInput {
    pub languages: Vec<String>,
    pub profiles: BTreeMap<String, ComplexityProfile>,
    /// Mean bits per verse for each method, by language. Only successful
    /// cells appear.
    pub surprisal: Vec<(Method, BTreeMap<String, f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    pub alpha: f64,
    pub family: Vec<String>,
    pub min_group_size: usize,
    pub p_values: PValueMode,
}

/// How many languages fed a grouped test, and why the rest did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accounting {
    pub included: usize,
    pub missing_feature: usize,
    pub missing_surprisal: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRow {
    /// Method name, or `first/second` for Δ rows.
    pub method: String,
    /// Feature id, measure name, or `feature: a vs b` for post-hoc pairs.
    pub subject: String,
    pub result: StatResult,
    /// `None` when the row is outside the FDR family.
    pub bh_significant: Option<bool>,
    pub accounting: Option<Accounting>,
}

impl AnalysisRow {
    pub fn effect(&self) -> Option<&'static str> {
        self.result.effect_size.map(effect_label)
    }

    pub fn note(&self) -> &str {
        match &self.result.status {
            Status::Ok => "",
            Status::Skipped(why) => why,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaValue {
    pub language: String,
    pub first: Method,
    pub second: Method,
    pub delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analysis {
    pub rows: Vec<AnalysisRow>,
    pub deltas: Vec<DeltaValue>,
}

pub fn pair_label(first: Method, second: Method) -> String {
    format!("{first}/{second}")
}

fn correlate(
    method: &str,
    values: &BTreeMap<String, f64>,
    profiles: &BTreeMap<String, ComplexityProfile>,
    mode: PValueMode,
) -> Vec<AnalysisRow> {
    MEASURES
        .iter()
        .map(|&name| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = values
                .iter()
                .filter_map(|(lang, &v)| Some((v, measure(profiles.get(lang)?, name)?)))
                .unzip();
            AnalysisRow {
                method: method.to_string(),
                subject: name.to_string(),
                result: spearman_with(&xs, &ys, mode),
                bh_significant: None,
                accounting: None,
            }
        })
        .collect()
}

/// Flags the OK rows whose subject is in the family.
fn apply_bh(rows: &mut [AnalysisRow], family: &[String], alpha: f64) -> Result<()> {
    let idx: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.result.status.is_ok() && family.contains(&r.subject))
        .map(|(i, _)| i)
        .collect();
    if idx.is_empty() {
        return Ok(());
    }
    let pvals: Vec<f64> = idx
        .iter()
        .map(|&i| rows[i].result.p_value.expect("OK rows carry a p-value"))
        .collect();
    let out = benjamini_hochberg(&pvals, alpha)?;
    for (&i, flag) in idx.iter().zip(out.significant) {
        rows[i].bh_significant = Some(flag);
    }
    Ok(())
}

fn grouped_tests(
    method: &str,
    values: &BTreeMap<String, f64>,
    languages: &[String],
    typology: &TypologyTable,
    params: &AnalysisParams,
) -> Result<Vec<AnalysisRow>> {
    let mut rows = Vec::new();
    for feature in feature_ids() {
        let (gs, ex) = group_by_feature(
            typology,
            feature,
            values,
            languages.iter().map(String::as_str),
        )?;
        let kept = filter_small_groups(&gs, params.min_group_size);
        rows.push(AnalysisRow {
            method: method.to_string(),
            subject: feature.to_string(),
            result: kruskal_wallis_with(&kept, params.p_values),
            bh_significant: None,
            accounting: Some(Accounting {
                included: ex.included.len(),
                missing_feature: ex.missing_feature.len(),
                missing_surprisal: ex.missing_surprisal.len(),
            }),
        });
    }
    Ok(rows)
}

fn posthoc(
    rows: &[AnalysisRow],
    method: &str,
    values: &BTreeMap<String, f64>,
    languages: &[String],
    typology: &TypologyTable,
    params: &AnalysisParams,
) -> Result<Vec<AnalysisRow>> {
    let mut out = Vec::new();
    for row in rows {
        if row.result.test != "kruskal_wallis" || row.bh_significant != Some(true) {
            continue;
        }
        let (gs, _) = group_by_feature(
            typology,
            &row.subject,
            values,
            languages.iter().map(String::as_str),
        )?;
        let kept = filter_small_groups(&gs, params.min_group_size);
        for pair in dunn_posthoc(&kept) {
            let significant = pair.p_value.map(|p| p <= params.alpha);
            out.push(AnalysisRow {
                method: method.to_string(),
                subject: format!("{}: {}", row.subject, pair.label),
                result: pair,
                bh_significant: significant,
                accounting: None,
            });
        }
    }
    Ok(out)
}

pub fn analyze(
    input: &AnalysisInput,
    typology: Option<&TypologyTable>,
    params: &AnalysisParams,
) -> Result<Analysis> {
    let mut analysis = Analysis::default();
    for (method, values) in &input.surprisal {
        let name = method.as_str();
        let mut rows = match typology {
            Some(t) => grouped_tests(name, values, &input.languages, t, params)?,
            None => Vec::new(),
        };
        rows.extend(correlate(name, values, &input.profiles, params.p_values));
        apply_bh(&mut rows, &params.family, params.alpha)?;
        if let Some(t) = typology {
            let extra = posthoc(&rows, name, values, &input.languages, t, params)?;
            rows.extend(extra);
        }
        analysis.rows.extend(rows);
    }

    for (i, (m2, v2)) in input.surprisal.iter().enumerate() {
        for (m1, v1) in &input.surprisal[i + 1..] {
            let mut d = BTreeMap::new();
            for (lang, &l1) in v1 {
                if let Some(&l2) = v2.get(lang) {
                    let value = delta(l1, l2)?;
                    d.insert(lang.clone(), value);
                    analysis.deltas.push(DeltaValue {
                        language: lang.clone(),
                        first: *m1,
                        second: *m2,
                        delta: value,
                    });
                }
            }
            let mut rows = correlate(&pair_label(*m1, *m2), &d, &input.profiles, params.p_values);
            for r in &mut rows {
                r.result.test = "delta_spearman";
            }
            apply_bh(&mut rows, &params.family, params.alpha)?;
            analysis.rows.extend(rows);
        }
    }
    Ok(analysis)
}
