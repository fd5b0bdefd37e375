//! Brute-force reference implementations used only by tests. They share
//! no code with the library: ranks, statistics and p-values are computed
//! from first principles by enumerating every relabelling.

#![allow(dead_code)]

/// Mean ranks, 1-based, by counting how many values are smaller or equal.
pub fn naive_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let less = values.iter().filter(|&&w| w < v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn h_statistic(ranks: &[f64], labels: &[usize], sizes: &[usize], tie_factor: f64) -> f64 {
    let n = ranks.len() as f64;
    let mut sums = vec![0.0; sizes.len()];
    for (r, &g) in ranks.iter().zip(labels) {
        sums[g] += r;
    }
    let s: f64 = sums.iter().zip(sizes).map(|(r, &m)| r * r / m as f64).sum();
    (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / tie_factor
}

/// Kruskal–Wallis H and its permutation p-value, enumerating every way
/// of assigning the pooled observations to groups of the given sizes.
pub fn kruskal_permutation(groups: &[Vec<f64>]) -> (f64, f64) {
    let values: Vec<f64> = groups.iter().flatten().copied().collect();
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let ranks = naive_ranks(&values);
    let n = values.len() as f64;
    let mut ties = 0.0;
    let mut seen: Vec<f64> = Vec::new();
    for &v in &values {
        if !seen.contains(&v) {
            seen.push(v);
            let t = values.iter().filter(|&&w| w == v).count() as f64;
            ties += t * t * t - t;
        }
    }
    let tie_factor = 1.0 - ties / (n * n * n - n);
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(g, &m)| std::iter::repeat(g).take(m))
        .collect();
    let observed = h_statistic(&ranks, &labels, &sizes, tie_factor);

    let mut remaining = sizes.clone();
    let mut current = vec![0usize; values.len()];
    let (mut hits, mut total) = (0u64, 0u64);
    fn walk(
        i: usize,
        ranks: &[f64],
        sizes: &[usize],
        remaining: &mut [usize],
        current: &mut [usize],
        tie_factor: f64,
        observed: f64,
        hits: &mut u64,
        total: &mut u64,
    ) {
        if i == ranks.len() {
            *total += 1;
            if h_statistic(ranks, current, sizes, tie_factor) >= observed - 1e-9 {
                *hits += 1;
            }
            return;
        }
        for g in 0..sizes.len() {
            if remaining[g] > 0 {
                remaining[g] -= 1;
                current[i] = g;
                walk(
                    i + 1,
                    ranks,
                    sizes,
                    remaining,
                    current,
                    tie_factor,
                    observed,
                    hits,
                    total,
                );
                remaining[g] += 1;
            }
        }
    }
    walk(
        0,
        &ranks,
        &sizes,
        &mut remaining,
        &mut current,
        tie_factor,
        observed,
        &mut hits,
        &mut total,
    );
    (observed, hits as f64 / total as f64)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Spearman ρ and its two-sided permutation p-value over all n! orderings
/// of `y`.
pub fn spearman_permutation(x: &[f64], y: &[f64]) -> (f64, f64) {
    let rx = naive_ranks(x);
    let ry = naive_ranks(y);
    let rho = pearson(&rx, &ry);
    let idx: Vec<usize> = (0..y.len()).collect();
    let perms = permutations(&idx);
    let hits = perms
        .iter()
        .filter(|p| {
            let shuffled: Vec<f64> = p.iter().map(|&i| ry[i]).collect();
            pearson(&rx, &shuffled).abs() >= rho.abs() - 1e-9
        })
        .count();
    (rho, hits as f64 / perms.len() as f64)
}

/// Reference tail values: `(kind, df, x, p)` where kind is "chi2" (upper
/// tail) or "t2" (two-sided Student t).
pub fn tail_reference() -> Vec<(String, f64, f64, f64)> {
    include_str!("../data/tail_reference.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
            )
        })
        .collect()
}
