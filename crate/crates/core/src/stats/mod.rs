//! Rank-based tests, multiple-testing control and the surprisal
//! difference between two segmentation methods.
//!
//! Tests whose preconditions fail return a result with
//! [`Status::Skipped`] instead of an error, so a report can still list
//! them.

mod kruskal;
mod rank;
mod spearman;
pub mod special;

pub use kruskal::{dunn_posthoc, kruskal_wallis, kruskal_wallis_with, EXACT_STATE_LIMIT};
pub use rank::{midranks, tie_sum};
pub use spearman::{spearman, spearman_with, EXACT_SPEARMAN_MAX_N};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// Smallest group kept for grouped tests.
pub const MIN_GROUP_SIZE: usize = 5;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// η² at or above this is a large effect.
pub const LARGE_EFFECT: f64 = 0.14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("p-value {0} is outside [0, 1]")]
    PValueRange(f64),
    #[error("no p-values given")]
    NoPValues,
    #[error("η² needs more observations than groups (n = {n}, k = {k})")]
    TooFewObservations { n: usize, k: usize },
    #[error("surprisal values must be positive, got {0} and {1}")]
    NonPositive(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ok,
    Skipped(String),
}

impl Status {
    pub fn is_ok(&self) -> bool {
        matches!(self, Status::Ok)
    }
}

/// How a p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    /// Chi-square, Student t or normal approximation.
    Asymptotic,
    /// Full permutation distribution of the statistic.
    Exact,
}

impl PValueMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PValueMethod::Asymptotic => "asymptotic",
            PValueMethod::Exact => "exact",
        }
    }
}

/// Which p-value to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValueMode {
    /// Exact permutation p-value for small samples, asymptotic otherwise.
    #[default]
    Auto,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatResult {
    pub test: &'static str,
    /// H for Kruskal–Wallis, ρ for Spearman, z for Dunn pairs.
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub p_method: Option<PValueMethod>,
    /// η² for Kruskal–Wallis.
    pub effect_size: Option<f64>,
    /// Group sizes, or `[n]` for paired tests.
    pub sizes: Vec<usize>,
    /// Pair label for post-hoc comparisons.
    pub label: String,
    pub status: Status,
}

impl StatResult {
    pub(crate) fn skipped(
        test: &'static str,
        sizes: Vec<usize>,
        reason: impl Into<String>,
    ) -> Self {
        StatResult {
            test,
            statistic: f64::NAN,
            p_value: None,
            p_method: None,
            effect_size: None,
            sizes,
            label: String::new(),
            status: Status::Skipped(reason.into()),
        }
    }
}

/// Surprisal values of languages grouped by one categorical feature.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupedSample {
    pub feature: String,
    pub groups: BTreeMap<String, Vec<f64>>,
}

impl GroupedSample {
    pub fn sizes(&self) -> Vec<usize> {
        self.groups.values().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }
}

pub fn filter_small_groups(gs: &GroupedSample, min_size: usize) -> GroupedSample {
    GroupedSample {
        feature: gs.feature.clone(),
        groups: gs
            .groups
            .iter()
            .filter(|(_, v)| v.len() >= min_size)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
    }
}

/// `η² = (H − k + 1) / (n − k)`.
pub fn eta_squared(h: f64, k: usize, n: usize) -> Result<f64, StatsError> {
    if n <= k {
        return Err(StatsError::TooFewObservations { n, k });
    }
    Ok((h - k as f64 + 1.0) / (n - k) as f64)
}

pub fn effect_label(eta_sq: f64) -> &'static str {
    if eta_sq >= LARGE_EFFECT {
        "large"
    } else if eta_sq >= 0.06 {
        "medium"
    } else if eta_sq >= 0.01 {
        "small"
    } else {
        "negligible"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BhOutcome {
    /// Significance flag per input p-value, in input order.
    pub significant: Vec<bool>,
    /// `(k/m)·α` for the largest passing rank k, or 0 when none pass.
    pub cutoff: f64,
    pub passed: usize,
}

fn check_pvalues(pvals: &[f64]) -> Result<(), StatsError> {
    if pvals.is_empty() {
        return Err(StatsError::NoPValues);
    }
    if let Some(&bad) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::PValueRange(bad));
    }
    Ok(())
}

/// Benjamini–Hochberg step-up procedure at level `alpha`.
pub fn benjamini_hochberg(pvals: &[f64], alpha: f64) -> Result<BhOutcome, StatsError> {
    check_pvalues(pvals)?;
    let m = pvals.len();
    let mut sorted = pvals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let passed = (1..=m)
        .rev()
        .find(|&k| sorted[k - 1] <= k as f64 / m as f64 * alpha)
        .unwrap_or(0);
    if passed == 0 {
        return Ok(BhOutcome {
            significant: alloc::vec![false; m],
            cutoff: 0.0,
            passed,
        });
    }
    let threshold = sorted[passed - 1];
    Ok(BhOutcome {
        significant: pvals.iter().map(|&p| p <= threshold).collect(),
        cutoff: passed as f64 / m as f64 * alpha,
        passed,
    })
}

/// BH-adjusted p-values, `min_{j ≥ i} (m/j)·p_(j)` capped at 1.
pub fn bh_adjust(pvals: &[f64]) -> Result<Vec<f64>, StatsError> {
    check_pvalues(pvals)?;
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));
    let mut adjusted = alloc::vec![0.0; m];
    let mut running = 1.0f64;
    for rank in (1..=m).rev() {
        let idx = order[rank - 1];
        running = running.min(pvals[idx] * m as f64 / rank as f64);
        adjusted[idx] = running;
    }
    Ok(adjusted)
}

/// Surprisal difference `(L1 − L2) / ((L1 + L2)/2)`. Positive means the
/// second method modelled the language better.
pub fn delta(l1: f64, l2: f64) -> Result<f64, StatsError> {
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(StatsError::NonPositive(l1, l2));
    }
    Ok((l1 - l2) / (0.5 * (l1 + l2)))
}
