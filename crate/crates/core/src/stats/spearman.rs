use alloc::vec::Vec;

use super::rank::midranks;
use super::special::student_t_two_sided;
use super::{PValueMethod, PValueMode, StatResult, Status};

/// Largest n for which [`PValueMode::Auto`] enumerates all permutations.
pub const EXACT_SPEARMAN_MAX_N: usize = 9;

const SPEARMAN: &str = "spearman";

pub fn spearman(x: &[f64], y: &[f64]) -> StatResult {
    spearman_with(x, y, PValueMode::Auto)
}

/// Pearson correlation of midranks.
pub fn spearman_with(x: &[f64], y: &[f64], mode: PValueMode) -> StatResult {
    let n = x.len();
    let sizes = alloc::vec![n];
    if n != y.len() {
        return StatResult::skipped(SPEARMAN, sizes, "vectors differ in length");
    }
    if n < 4 {
        return StatResult::skipped(SPEARMAN, sizes, "fewer than 4 pairs");
    }
    // Doubled, centred ranks are integers: 2r − (n+1).
    let centred = |v: &[f64]| -> Vec<i64> {
        midranks(v)
            .iter()
            .map(|r| libm::round(2.0 * r) as i64 - (n as i64 + 1))
            .collect()
    };
    let rx = centred(x);
    let ry = centred(y);
    let sxx: i64 = rx.iter().map(|a| a * a).sum();
    let syy: i64 = ry.iter().map(|a| a * a).sum();
    if sxx == 0 || syy == 0 {
        return StatResult::skipped(SPEARMAN, sizes, "constant input");
    }
    let sxy: i64 = rx.iter().zip(&ry).map(|(a, b)| a * b).sum();
    let rho = (sxy as f64 / libm::sqrt(sxx as f64 * syy as f64)).clamp(-1.0, 1.0);

    let (p, method) = if mode == PValueMode::Auto && n <= EXACT_SPEARMAN_MAX_N {
        (exact_pvalue(&rx, ry, sxy.abs()), PValueMethod::Exact)
    } else if (rho.abs() - 1.0).abs() < 1e-15 {
        (0.0, PValueMethod::Asymptotic)
    } else {
        let df = (n - 2) as f64;
        let t = rho * libm::sqrt(df / (1.0 - rho * rho));
        (student_t_two_sided(t, df), PValueMethod::Asymptotic)
    };
    StatResult {
        test: SPEARMAN,
        statistic: rho,
        p_value: Some(p.clamp(0.0, 1.0)),
        p_method: Some(method),
        effect_size: None,
        sizes,
        label: Default::default(),
        status: Status::Ok,
    }
}

/// Share of the n! orderings of `ry` whose |Σ rx·ry| reaches `observed`.
fn exact_pvalue(rx: &[i64], mut ry: Vec<i64>, observed: i64) -> f64 {
    let n = ry.len();
    let dot = |ry: &[i64]| rx.iter().zip(ry).map(|(a, b)| a * b).sum::<i64>().abs();
    let mut hits = u64::from(dot(&ry) >= observed);
    let mut total = 1u64;
    // Heap's algorithm
    let mut c = alloc::vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            total += 1;
            hits += u64::from(dot(&ry) >= observed);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}
