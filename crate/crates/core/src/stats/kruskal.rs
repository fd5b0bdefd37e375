use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::rank::{midranks, tie_sum};
use super::special::{chi_square_sf, normal_two_sided};
use super::{bh_adjust, eta_squared, GroupedSample, PValueMethod, PValueMode, StatResult, Status};

/// Largest number of partial states the exact Kruskal–Wallis
/// distribution may hold before falling back to the chi-square tail.
pub const EXACT_STATE_LIMIT: usize = 200_000;

const KW: &str = "kruskal_wallis";
const DUNN: &str = "dunn";

struct Pooled {
    ranks: Vec<f64>,
    sizes: Vec<usize>,
    n: usize,
    /// `1 − Σ(t³−t)/(N³−N)`
    tie_factor: f64,
    tie_sum: f64,
}

fn pool(gs: &GroupedSample) -> Pooled {
    let values: Vec<f64> = gs.groups.values().flatten().copied().collect();
    let n = values.len();
    let ts = tie_sum(&values);
    let nf = n as f64;
    Pooled {
        ranks: midranks(&values),
        sizes: gs.sizes(),
        n,
        tie_factor: 1.0 - ts / (nf * nf * nf - nf),
        tie_sum: ts,
    }
}

fn rank_sums(p: &Pooled) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.sizes.len());
    let mut at = 0;
    for &size in &p.sizes {
        out.push(p.ranks[at..at + size].iter().sum());
        at += size;
    }
    out
}

fn precondition(gs: &GroupedSample) -> Option<&'static str> {
    if gs.groups.len() < 2 {
        Some("fewer than 2 groups")
    } else if gs.groups.values().any(|g| g.len() < 2) {
        Some("a group has fewer than 2 values")
    } else if gs.total() < 5 {
        Some("fewer than 5 observations")
    } else {
        None
    }
}

pub fn kruskal_wallis(gs: &GroupedSample) -> StatResult {
    kruskal_wallis_with(gs, PValueMode::Auto)
}

/// H with midranks and tie correction. In [`PValueMode::Auto`] the
/// p-value comes from the exact permutation distribution when it is
/// small enough to tabulate.
pub fn kruskal_wallis_with(gs: &GroupedSample, mode: PValueMode) -> StatResult {
    let sizes = gs.sizes();
    if let Some(reason) = precondition(gs) {
        return StatResult::skipped(KW, sizes, reason);
    }
    let p = pool(gs);
    if p.tie_factor <= 0.0 {
        return StatResult::skipped(KW, sizes, "all values tied");
    }
    let nf = p.n as f64;
    let sums = rank_sums(&p);
    let s: f64 = sums
        .iter()
        .zip(&p.sizes)
        .map(|(r, &m)| r * r / m as f64)
        .sum();
    let h = ((12.0 / (nf * (nf + 1.0))) * s - 3.0 * (nf + 1.0)) / p.tie_factor;
    let h = h.max(0.0);
    let k = p.sizes.len();

    let exact = match mode {
        PValueMode::Auto => exact_kw_pvalue(&p),
        PValueMode::Asymptotic => None,
    };
    let (p_value, method) = match exact {
        Some(pv) => (pv, PValueMethod::Exact),
        None => (chi_square_sf(h, (k - 1) as f64), PValueMethod::Asymptotic),
    };
    StatResult {
        test: KW,
        statistic: h,
        p_value: Some(p_value.clamp(0.0, 1.0)),
        p_method: Some(method),
        effect_size: eta_squared(h, k, p.n).ok(),
        sizes,
        label: gs.feature.clone(),
        status: Status::Ok,
    }
}

/// `P(Σ R_i²/n_i ≥ observed)` when the pooled midranks are dealt to
/// groups of the observed sizes uniformly at random.
///
/// Tie blocks are processed in rank order. A state records how many
/// items and how much doubled rank each group has received so far; its
/// weight counts the labelled assignments that reach it.
fn exact_kw_pvalue(p: &Pooled) -> Option<f64> {
    let k = p.sizes.len();
    // tie blocks as (doubled rank, multiplicity)
    let mut doubled: Vec<u32> = p
        .ranks
        .iter()
        .map(|r| libm::round(2.0 * r) as u32)
        .collect();
    let observed: Vec<u64> = {
        let mut out = Vec::with_capacity(k);
        let mut at = 0;
        for &size in &p.sizes {
            out.push(doubled[at..at + size].iter().map(|&r| r as u64).sum());
            at += size;
        }
        out
    };
    doubled.sort_unstable();
    let mut blocks: Vec<(u32, usize)> = Vec::new();
    for r in doubled {
        match blocks.last_mut() {
            Some((v, t)) if *v == r => *t += 1,
            _ => blocks.push((r, 1)),
        }
    }

    // key: counts for all k groups, then sums for the first k−1
    let mut states: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    states.insert(alloc::vec![0; 2 * k - 1], 1.0);
    let mut split = alloc::vec![0usize; k];
    for &(value, t) in &blocks {
        let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (key, &w) in &states {
            let room: Vec<usize> = (0..k).map(|g| p.sizes[g] - key[g] as usize).collect();
            distribute(t, &room, &mut split, 0, &mut |split| {
                let mut nk = key.clone();
                let mut ways = factorial(t);
                for g in 0..k {
                    nk[g] += split[g] as u32;
                    ways /= factorial(split[g]);
                    if g + 1 < k {
                        nk[k + g] += value * split[g] as u32;
                    }
                }
                *next.entry(nk).or_insert(0.0) += w * ways;
            });
            if next.len() > EXACT_STATE_LIMIT {
                return None;
            }
        }
        states = next;
    }

    let total_doubled: u64 = observed.iter().sum();
    let score = |sums: &[u64]| -> f64 {
        sums.iter()
            .zip(&p.sizes)
            .map(|(&s, &m)| (s * s) as f64 / m as f64)
            .sum()
    };
    let obs = score(&observed);
    let tol = obs * 1e-12;
    let mut hit = 0.0;
    let mut all = 0.0;
    let mut sums = alloc::vec![0u64; k];
    for (key, &w) in &states {
        for g in 0..k - 1 {
            sums[g] = key[k + g] as u64;
        }
        sums[k - 1] = total_doubled - sums[..k - 1].iter().sum::<u64>();
        all += w;
        if score(&sums) >= obs - tol {
            hit += w;
        }
    }
    Some(hit / all)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Calls `f` with every way of placing `left` items into groups with the
/// given spare capacity.
fn distribute(
    left: usize,
    room: &[usize],
    split: &mut [usize],
    g: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if g + 1 == room.len() {
        if left <= room[g] {
            split[g] = left;
            f(split);
        }
        return;
    }
    for take in 0..=left.min(room[g]) {
        split[g] = take;
        distribute(left - take, room, split, g + 1, f);
    }
}

/// Pairwise Dunn z statistics on mean ranks with tie correction. The
/// reported p-values are Benjamini–Hochberg adjusted across all pairs.
pub fn dunn_posthoc(gs: &GroupedSample) -> Vec<StatResult> {
    let sizes = gs.sizes();
    if gs.groups.len() < 2 {
        return alloc::vec![StatResult::skipped(DUNN, sizes, "fewer than 2 groups")];
    }
    if gs.groups.values().any(Vec::is_empty) {
        return alloc::vec![StatResult::skipped(DUNN, sizes, "empty group")];
    }
    let p = pool(gs);
    let nf = p.n as f64;
    let variance = nf * (nf + 1.0) / 12.0 - p.tie_sum / (12.0 * (nf - 1.0));
    if !(variance > 0.0) {
        return alloc::vec![StatResult::skipped(DUNN, sizes, "all values tied")];
    }
    let names: Vec<&str> = gs.groups.keys().map(|s| s.as_str()).collect();
    let means: Vec<f64> = rank_sums(&p)
        .iter()
        .zip(&p.sizes)
        .map(|(s, &m)| s / m as f64)
        .collect();
    let mut pairs = Vec::new();
    let mut raw = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let se = libm::sqrt(variance * (1.0 / p.sizes[i] as f64 + 1.0 / p.sizes[j] as f64));
            let z = (means[i] - means[j]) / se;
            raw.push(normal_two_sided(z));
            pairs.push((i, j, z));
        }
    }
    let adjusted = bh_adjust(&raw).expect("normal tail p-values lie in [0, 1]");
    pairs
        .into_iter()
        .zip(adjusted)
        .map(|((i, j, z), padj)| StatResult {
            test: DUNN,
            statistic: z,
            p_value: Some(padj),
            p_method: Some(PValueMethod::Asymptotic),
            effect_size: None,
            sizes: alloc::vec![p.sizes[i], p.sizes[j]],
            label: format!("{} vs {}", names[i], names[j]),
            status: Status::Ok,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn sample(groups: &[&[f64]]) -> GroupedSample {
        GroupedSample {
            feature: "f".to_string(),
            groups: groups
                .iter()
                .enumerate()
                .map(|(i, g)| (String::from(char::from(b'a' + i as u8)), g.to_vec()))
                .collect(),
        }
    }

    #[test]
    fn separated_triples() {
        let gs = sample(&[&[1.0, 2.0, 3.0], &[10.0, 11.0, 12.0]]);
        let asym = kruskal_wallis_with(&gs, PValueMode::Asymptotic);
        assert!((asym.statistic - 27.0 / 7.0).abs() < 1e-12);
        assert!((asym.p_value.unwrap() - 0.0495).abs() < 5e-5);
        let exact = kruskal_wallis(&gs);
        assert_eq!(exact.p_method, Some(PValueMethod::Exact));
        // 2 of the C(6,3) = 20 splits are as extreme.
        assert!((exact.p_value.unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn identical_groups() {
        let gs = sample(&[&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]]);
        let r = kruskal_wallis(&gs);
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value.unwrap() - 1.0).abs() < 1e-12);
        let d = dunn_posthoc(&gs);
        assert_eq!(d[0].statistic, 0.0);
        assert!((d[0].p_value.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn skipped_cases() {
        assert!(!kruskal_wallis(&sample(&[&[1.0, 2.0, 3.0]])).status.is_ok());
        assert!(!kruskal_wallis(&sample(&[&[1.0], &[2.0, 3.0, 4.0, 5.0]]))
            .status
            .is_ok());
        assert!(!kruskal_wallis(&sample(&[&[1.0, 2.0], &[3.0, 4.0]]))
            .status
            .is_ok());
        assert!(!kruskal_wallis(&sample(&[&[1.0, 1.0], &[1.0, 1.0, 1.0]]))
            .status
            .is_ok());
    }

    #[test]
    fn ties_use_exact_distribution() {
        let gs = sample(&[&[1.0, 1.0, 2.0], &[2.0, 3.0, 3.0], &[3.0, 4.0]]);
        let r = kruskal_wallis(&gs);
        assert_eq!(r.p_method, Some(PValueMethod::Exact));
        let p = r.p_value.unwrap();
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn large_samples_fall_back() {
        let a: Vec<f64> = (0..80).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..80).map(|i| i as f64 + 0.5).collect();
        let c: Vec<f64> = (0..80).map(|i| i as f64 + 0.25).collect();
        let r = kruskal_wallis(&sample(&[&a, &b, &c]));
        assert_eq!(r.p_method, Some(PValueMethod::Asymptotic));
    }

    #[test]
    fn shifted_group_flagged() {
        let gs = sample(&[
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[1.5, 2.5, 3.5, 4.5, 5.5, 6.5],
            &[100.0, 101.0, 102.0, 103.0, 104.0, 105.0],
        ]);
        let d = dunn_posthoc(&gs);
        let flag: Vec<(String, bool)> = d
            .iter()
            .map(|r| (r.label.clone(), r.p_value.unwrap() <= 0.05))
            .collect();
        assert_eq!(
            flag,
            vec![
                ("a vs b".to_string(), false),
                ("a vs c".to_string(), true),
                ("b vs c".to_string(), true),
            ]
        );
    }

    #[test]
    fn dunn_matches_kw_for_two_groups() {
        let gs = sample(&[
            &[1.0, 3.0, 4.0, 8.0, 9.0],
            &[2.0, 5.0, 6.0, 7.0, 10.0, 11.0],
        ]);
        let kw = kruskal_wallis_with(&gs, PValueMode::Asymptotic)
            .p_value
            .unwrap();
        let dunn = dunn_posthoc(&gs)[0].p_value.unwrap();
        assert!((kw - dunn).abs() / kw < 1e-9);
    }
}
