use std::collections::BTreeSet;

use proptest::prelude::*;
use seglab_core::fst::{Arc, Fst, SymbolTable};

const INPUT: [&str; 3] = ["a", "b", "c"];
const OUTPUT: [&str; 3] = ["x", "y", "<B>"];

#[derive(Debug, Clone)]
struct Spec {
    states: u32,
    // (from, to offset, ilabel, olabel); targets are always later states
    arcs: Vec<(u32, u32, u32, u32)>,
    finals: Vec<u32>,
}

fn spec() -> impl Strategy<Value = Spec> {
    (2u32..=8).prop_flat_map(|n| {
        let arc = (0..n - 1, 1..n, 0u32..=3, 0u32..=3);
        (
            Just(n),
            prop::collection::vec(arc, 0..20),
            prop::collection::vec(0..n, 1..4),
        )
            .prop_map(|(states, raw, finals)| Spec {
                states,
                arcs: raw
                    .into_iter()
                    .map(|(from, off, i, o)| {
                        (from, (from + off).min(states - 1).max(from + 1), i, o)
                    })
                    .filter(|a| a.1 < states)
                    .collect(),
                finals,
            })
    })
}

fn build(s: &Spec) -> Fst {
    let arcs = s
        .arcs
        .iter()
        .map(|&(from, to, i, o)| {
            (
                from,
                Arc {
                    ilabel: i,
                    olabel: o,
                    next: to,
                },
            )
        })
        .collect();
    Fst::new(
        s.states,
        0,
        arcs,
        s.finals.iter().copied(),
        SymbolTable::from_symbols(INPUT),
        SymbolTable::from_symbols(OUTPUT),
    )
    .unwrap()
}

/// Every accepting path of an acyclic machine, as (input, output) strings.
fn all_paths(s: &Spec) -> BTreeSet<(String, String)> {
    fn walk(
        s: &Spec,
        state: u32,
        input: String,
        output: String,
        out: &mut BTreeSet<(String, String)>,
    ) {
        if s.finals.contains(&state) {
            out.insert((input.clone(), output.clone()));
        }
        for &(from, to, i, o) in &s.arcs {
            if from == state {
                let mut inp = input.clone();
                if i > 0 {
                    inp.push_str(INPUT[i as usize - 1]);
                }
                let mut outp = output.clone();
                if o > 0 {
                    outp.push_str(OUTPUT[o as usize - 1]);
                }
                walk(s, to, inp, outp, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(s, 0, String::new(), String::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn apply_matches_path_enumeration(s in spec(), surface in "[abc]{0,5}") {
        let fst = build(&s);
        let want: BTreeSet<String> = all_paths(&s)
            .into_iter()
            .filter(|(i, _)| *i == surface)
            .map(|(_, o)| o)
            .collect();
        prop_assert_eq!(fst.apply(&surface, usize::MAX), want);
    }

    #[test]
    fn segmentations_spell_the_word(surface in "[xy]{1,4}") {
        // Identity-style machine: read x/y, write the same, optionally
        // emitting a boundary on epsilon input.
        let mut arcs = Vec::new();
        for st in 0..2u32 {
            arcs.push((st, Arc { ilabel: 1, olabel: 1, next: 0 }));
            arcs.push((st, Arc { ilabel: 2, olabel: 2, next: 0 }));
        }
        arcs.push((0, Arc { ilabel: 0, olabel: 3, next: 1 }));
        let fst = Fst::new(
            2,
            0,
            arcs,
            [0],
            SymbolTable::from_symbols(["x", "y"]),
            SymbolTable::from_symbols(["x", "y", "<B>"]),
        )
        .unwrap();
        let cands = fst.candidate_segmentations(&surface, 1000);
        prop_assert!(!cands.is_empty());
        for c in &cands {
            prop_assert_eq!(c.concat(), surface.clone());
            prop_assert!(c.iter().all(|p| !p.is_empty()));
        }
        let n = surface.chars().count();
        prop_assert_eq!(cands.len(), 1usize << (n - 1));
    }
}
