use std::collections::BTreeSet;

use proptest::prelude::*;
use seglab_core::corpus::{split_corpus, split_part, unk_singleton_chars, SplitPart};
use seglab_core::lm::train_lm;
use seglab_core::metrics::{mattr, ttr};
use seglab_core::morfessor::morfessor_train;
use seglab_core::segmentation::{bpe_apply, bpe_train};
use seglab_core::segmentation::{char_segment, desegment, segment_with};
use seglab_core::stats::{benjamini_hochberg, delta, kruskal_wallis, spearman, GroupedSample};
use seglab_core::{DataSplit, Method, MorfessorConfig, ParallelCorpus, VerseRecord};

fn word() -> impl Strategy<Value = String> {
    prop::string::string_regex("[abcdeé_]{1,7}").unwrap()
}

fn verses(max: usize) -> impl Strategy<Value = Vec<VerseRecord>> {
    prop::collection::vec(prop::collection::vec(word(), 1..6), 1..max).prop_map(|vs| {
        vs.into_iter()
            .enumerate()
            .map(|(i, tokens)| VerseRecord::new(format!("v{i}"), tokens).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_follows_block_formula(n in 1usize..4000) {
        let blocks = n / 30;
        let verses: Vec<VerseRecord> = (0..n)
            .map(|i| VerseRecord::from_text(format!("{i}"), "w").unwrap())
            .collect();
        let split = split_corpus(&ParallelCorpus::new("xx", verses).unwrap()).unwrap();
        prop_assert_eq!(split.dev.len(), 5 * blocks);
        prop_assert_eq!(split.test.len(), 5 * blocks);
        prop_assert_eq!(split.train.len(), n - 10 * blocks);
        let ids: BTreeSet<&str> = split
            .train.iter().chain(&split.dev).chain(&split.test)
            .map(|v| v.verse_id.as_str())
            .collect();
        prop_assert_eq!(ids.len(), n);
        let dev_positions = (0..n).filter(|&i| split_part(i, n) == SplitPart::Dev).count();
        prop_assert_eq!(dev_positions, split.dev.len());
    }

    #[test]
    fn unk_replacement_is_idempotent(train in verses(12), test in verses(5)) {
        let split = DataSplit { train, dev: Vec::new(), test };
        let once = unk_singleton_chars(&split);
        prop_assert_eq!(unk_singleton_chars(&once), once.clone());
        for (a, b) in split.test.iter().zip(&once.test) {
            prop_assert_eq!(a.char_count(), b.char_count());
        }
    }

    #[test]
    fn segmentations_round_trip(train in verses(20), test in verses(8)) {
        let merges = bpe_train(&train, 30);
        let lexicon = morfessor_train(&train, &MorfessorConfig { max_epochs: 3, ..Default::default() });
        for v in train.iter().chain(&test) {
            let svs = [
                char_segment(v),
                bpe_apply(&merges, v),
                segment_with(&lexicon, v, Method::Morfessor).unwrap(),
            ];
            for sv in svs {
                prop_assert!(sv.units.iter().all(|u| !u.is_empty() && u != "@@"));
                prop_assert_eq!(desegment(&sv).unwrap(), v.tokens.clone());
            }
        }
    }

    #[test]
    fn more_merges_never_add_units(train in verses(20), w in word()) {
        let full = bpe_train(&train, 40);
        prop_assert_eq!(&bpe_train(&train, 40), &full);
        let mut prev = usize::MAX;
        for k in 0..=full.len() {
            let units = full.truncated(k).segment(&w);
            prop_assert_eq!(units.concat(), w.clone());
            prop_assert!(units.len() <= prev);
            prev = units.len();
        }
    }

    #[test]
    fn mattr_bounds(tokens in prop::collection::vec("[a-e]{1,2}", 1..80), window in 1usize..100) {
        let m = mattr(&tokens, window).unwrap();
        prop_assert!(m > 0.0 && m <= 1.0);
        if tokens.len() <= window {
            prop_assert_eq!(m, ttr(&tokens).unwrap());
        }
        prop_assert_eq!(mattr(&tokens, 1).unwrap(), 1.0);
    }

    #[test]
    fn lm_distribution_sums_to_one(train in verses(10), ctx in prop::collection::vec(0u32..40, 0..5)) {
        let svs: Vec<_> = train.iter().map(char_segment).collect();
        let lm = train_lm(&svs, 3, 0.75).unwrap();
        let ctx: Vec<u32> = ctx.into_iter().map(|c| c % lm.vocab().len() as u32).collect();
        let total: f64 = lm.predictable().map(|w| lm.prob(&ctx, w)).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{}", total);
    }

    #[test]
    fn delta_symmetries(a in 0.01f64..100.0, b in 0.01f64..100.0, c in 0.01f64..100.0) {
        let d = delta(a, b).unwrap();
        prop_assert!((d + delta(b, a).unwrap()).abs() < 1e-12);
        prop_assert!(d > -2.0 && d < 2.0);
        prop_assert!((delta(c * a, c * b).unwrap() - d).abs() < 1e-9);
    }

    #[test]
    fn bh_lower_alpha_flags_fewer(p in prop::collection::vec(0.0f64..=1.0, 1..30), a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let flo = benjamini_hochberg(&p, lo).unwrap();
        let fhi = benjamini_hochberg(&p, hi).unwrap();
        prop_assert!(flo.passed <= fhi.passed);
        for (x, y) in flo.significant.iter().zip(&fhi.significant) {
            prop_assert!(!x | y);
        }
    }

    #[test]
    fn kruskal_rank_invariant(groups in prop::collection::vec(prop::collection::vec(-50i32..50, 2..8), 2..4)) {
        let as_sample = |f: &dyn Fn(f64) -> f64| GroupedSample {
            feature: "f".into(),
            groups: groups
                .iter()
                .enumerate()
                .map(|(i, g)| (i.to_string(), g.iter().map(|&v| f(v as f64)).collect()))
                .collect(),
        };
        let base = kruskal_wallis(&as_sample(&|v| v));
        let moved = kruskal_wallis(&as_sample(&|v| (v / 10.0).exp() + v * v * v));
        prop_assert_eq!(&base.status, &moved.status);
        if base.status.is_ok() {
            prop_assert!((base.statistic - moved.statistic).abs() < 1e-9);
            prop_assert!((base.p_value.unwrap() - moved.p_value.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn spearman_range_and_antisymmetry(pairs in prop::collection::vec((-100i32..100, -1000i32..1000), 4..12)) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let mut seen = BTreeSet::new();
        let y: Vec<f64> = pairs.iter().map(|p| p.1).filter(|v| seen.insert(*v)).map(f64::from).collect();
        prop_assume!(y.len() == x.len());
        let r = spearman(&x, &y);
        if r.status.is_ok() {
            prop_assert!((-1.0..=1.0).contains(&r.statistic));
            let neg: Vec<f64> = y.iter().map(|v| -v).collect();
            let s = spearman(&x, &neg);
            prop_assert!((r.statistic + s.statistic).abs() < 1e-12);
            let p = r.p_value.unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
