mod support;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seglab_core::stats::special::{chi_square_sf, student_t_two_sided};
use seglab_core::stats::{
    dunn_posthoc, kruskal_wallis, kruskal_wallis_with, spearman, spearman_with, GroupedSample,
    PValueMethod, PValueMode,
};
use support::oracle;

fn grouped(groups: &[Vec<f64>]) -> GroupedSample {
    GroupedSample {
        feature: "x".into(),
        groups: groups
            .iter()
            .enumerate()
            .map(|(i, g)| (format!("g{i}"), g.clone()))
            .collect::<BTreeMap<_, _>>(),
    }
}

fn random_groups(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let k = rng.gen_range(2..=3);
    (0..k)
        .map(|_| {
            let m = rng.gen_range(2..=6);
            // Small integer range so ties are common.
            (0..m).map(|_| rng.gen_range(0..12) as f64).collect()
        })
        .collect()
}

#[test]
fn kruskal_matches_permutation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 25 {
        let groups = random_groups(&mut rng);
        let total: usize = groups.iter().map(Vec::len).sum();
        let r = kruskal_wallis(&grouped(&groups));
        if total < 5 || !r.status.is_ok() {
            continue;
        }
        let (h, p) = oracle::kruskal_permutation(&groups);
        assert!(
            (r.statistic - h).abs() < 1e-9,
            "{groups:?}: H {} vs {h}",
            r.statistic
        );
        assert_eq!(r.p_method, Some(PValueMethod::Exact));
        let got = r.p_value.unwrap();
        assert!(
            (got - p).abs() <= 1e-9 * p.max(1e-12) + 1e-12,
            "{groups:?}: p {got} vs {p}"
        );
        checked += 1;
    }
}

#[test]
fn spearman_matches_permutation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 4..=7 {
        for _ in 0..10 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..6) as f64).collect();
            let r = spearman(&x, &y);
            if !r.status.is_ok() {
                continue;
            }
            let (rho, p) = oracle::spearman_permutation(&x, &y);
            assert!((r.statistic - rho).abs() < 1e-12, "{x:?} {y:?}");
            assert!(
                (r.p_value.unwrap() - p).abs() < 1e-12,
                "{x:?} {y:?}: {} vs {p}",
                r.p_value.unwrap()
            );
        }
    }
}

#[test]
fn spearman_hand_example_both_modes() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    let y = [2.0, 1.0, 4.0, 3.0, 5.0];
    let (rho, p) = oracle::spearman_permutation(&x, &y);
    assert!((rho - 0.8).abs() < 1e-12);
    assert!((spearman(&x, &y).p_value.unwrap() - p).abs() < 1e-12);
    let asym = spearman_with(&x, &y, PValueMode::Asymptotic);
    assert!((asym.p_value.unwrap() - 0.104).abs() < 5e-4);
}

#[test]
fn tail_functions_match_reference() {
    let rows = oracle::tail_reference();
    assert_eq!(rows.len(), 420);
    for (kind, df, x, want) in rows {
        let got = match kind.as_str() {
            "chi2" => chi_square_sf(x, df),
            "t2" => student_t_two_sided(x, df),
            other => panic!("unknown row kind {other}"),
        };
        assert!(
            (got - want).abs() < 1e-8,
            "{kind} df={df} x={x}: {got} vs {want}"
        );
    }
}

#[test]
fn dunn_two_groups_agrees_with_kruskal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let groups: Vec<Vec<f64>> = (0..2)
            .map(|_| {
                (0..rng.gen_range(5..=12))
                    .map(|_| rng.gen::<f64>())
                    .collect()
            })
            .collect();
        let gs = grouped(&groups);
        let kw = kruskal_wallis_with(&gs, PValueMode::Asymptotic)
            .p_value
            .unwrap();
        let dunn = dunn_posthoc(&gs)[0].p_value.unwrap();
        assert!((kw - dunn).abs() <= 0.05 * kw, "{kw} vs {dunn}");
    }
}
