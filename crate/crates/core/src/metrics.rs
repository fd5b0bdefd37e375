//! Corpus-based complexity measures computed on word tokens before any
//! segmentation.

use alloc::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::corpus::{token_stream, VerseRecord};

/// Window length for the moving-average type/token ratio.
pub const DEFAULT_MATTR_WINDOW: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("measure is undefined on an empty token sequence")]
    EmptyInput,
    #[error("MATTR window must be at least 1")]
    ZeroWindow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityProfile {
    pub token_count: usize,
    pub types: usize,
    pub ttr: f64,
    pub mattr: f64,
    pub mlw: f64,
}

pub fn count_types<S: AsRef<str>>(tokens: &[S]) -> usize {
    tokens
        .iter()
        .map(AsRef::as_ref)
        .collect::<BTreeSet<_>>()
        .len()
}

pub fn ttr<S: AsRef<str>>(tokens: &[S]) -> Result<f64, MetricsError> {
    if tokens.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(count_types(tokens) as f64 / tokens.len() as f64)
}

/// Mean TTR over every full window of `window` tokens, stride 1. Texts
/// shorter than the window fall back to whole-text TTR.
pub fn mattr<S: AsRef<str>>(tokens: &[S], window: usize) -> Result<f64, MetricsError> {
    if window == 0 {
        return Err(MetricsError::ZeroWindow);
    }
    if tokens.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if tokens.len() < window {
        return ttr(tokens);
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &tokens[..window] {
        *counts.entry(t.as_ref()).or_insert(0) += 1;
    }
    // Sum of distinct-type counts is an integer, so accumulate exactly.
    let mut type_sum = counts.len() as u64;
    for i in window..tokens.len() {
        let out = tokens[i - window].as_ref();
        let slot = counts.get_mut(out).expect("outgoing token is in window");
        *slot -= 1;
        if *slot == 0 {
            counts.remove(out);
        }
        *counts.entry(tokens[i].as_ref()).or_insert(0) += 1;
        type_sum += counts.len() as u64;
    }
    let windows = (tokens.len() - window + 1) as f64;
    Ok(type_sum as f64 / (windows * window as f64))
}

/// Mean number of Unicode scalar values per token.
pub fn mlw<S: AsRef<str>>(tokens: &[S]) -> Result<f64, MetricsError> {
    if tokens.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let chars: usize = tokens.iter().map(|t| t.as_ref().chars().count()).sum();
    Ok(chars as f64 / tokens.len() as f64)
}

pub fn complexity_profile(
    train: &[VerseRecord],
    window: usize,
) -> Result<ComplexityProfile, MetricsError> {
    let tokens = token_stream(train);
    Ok(ComplexityProfile {
        token_count: tokens.len(),
        types: count_types(&tokens),
        ttr: ttr(&tokens)?,
        mattr: mattr(&tokens, window)?,
        mlw: mlw(&tokens)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    const EPS: f64 = 1e-12;

    #[test]
    fn types() {
        assert_eq!(count_types(&["a", "b", "a"]), 2);
        assert_eq!(count_types::<&str>(&[]), 0);
    }

    #[test]
    fn ttr_values() {
        assert_eq!(ttr(&["a", "b", "a", "b"]).unwrap(), 0.5);
        assert_eq!(ttr(&["a", "b", "c"]).unwrap(), 1.0);
        assert_eq!(ttr(&["a", "a", "a", "a"]).unwrap(), 0.25);
        assert_eq!(ttr::<&str>(&[]), Err(MetricsError::EmptyInput));
    }

    #[test]
    fn mattr_values() {
        let m = mattr(&["a", "b", "a", "b"], 3).unwrap();
        assert!((m - 2.0 / 3.0).abs() < EPS);
        assert_eq!(
            mattr(&["a", "b", "a"], 10).unwrap(),
            ttr(&["a", "b", "a"]).unwrap()
        );
        let constant: Vec<&str> = vec!["x"; 40];
        for w in [1, 3, 7, 40] {
            assert!((mattr(&constant, w).unwrap() - 1.0 / w as f64).abs() < EPS);
        }
        assert_eq!(mattr(&["a"], 0), Err(MetricsError::ZeroWindow));
        assert_eq!(mattr::<&str>(&[], 5), Err(MetricsError::EmptyInput));
    }

    #[test]
    fn mattr_is_order_sensitive() {
        let a = mattr(&["a", "a", "b", "b"], 2).unwrap();
        let b = mattr(&["a", "b", "a", "b"], 2).unwrap();
        assert!((a - b).abs() > 0.1);
    }

    #[test]
    fn mlw_values() {
        assert_eq!(mlw(&["ab", "abcd"]).unwrap(), 3.0);
        assert_eq!(mlw(&["a", "b"]).unwrap(), 1.0);
        assert_eq!(mlw(&["kılıçla"]).unwrap(), 7.0);
    }

    #[test]
    fn profile_composes_measures() {
        let train = vec![VerseRecord::from_text("1", "a b a b").unwrap()];
        let p = complexity_profile(&train, 3).unwrap();
        assert_eq!(p.types, 2);
        assert_eq!(p.token_count, 4);
        assert_eq!(p.ttr, 0.5);
        assert!((p.mattr - 2.0 / 3.0).abs() < EPS);
        assert_eq!(p.mlw, 1.0);
    }
}
