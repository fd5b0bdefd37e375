//! AT&T text transducers with separate symbol tables.
//!
//! Arc lines are `src dst isym osym [weight]`, final lines `state
//! [weight]`; fields are tab separated (spaces are also accepted).
//! Weights are ignored. The source state of the first line is the start
//! state. Symbol tables hold `symbol id` lines.
//!
//! A state is defined when it appears as an arc source or on a final
//! line; an arc into an undefined state is an error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use seglab_core::fst::{Arc, Fst, SymbolTable, EPSILON, EPSILON_ALIASES};

use crate::error::{read_to_string, write_file, Error, Result};

pub const ARCS_FILE: &str = "fst.att";
pub const ISYMS_FILE: &str = "isyms.txt";
pub const OSYMS_FILE: &str = "osyms.txt";

fn fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').collect()
    } else {
        line.split_whitespace().collect()
    }
}

pub fn parse_symbols(text: &str, path: &Path) -> Result<SymbolTable> {
    let mut entries = Vec::new();
    for (line_no, line) in super::content_lines(text) {
        let f = fields(line);
        let [sym, id] = f[..] else {
            return Err(Error::parse(path, line_no, "expected `symbol<TAB>id`"));
        };
        let id: u32 = id
            .trim()
            .parse()
            .map_err(|e| Error::parse(path, line_no, format!("bad symbol id: {e}")))?;
        entries.push((sym.to_string(), id, line_no));
    }
    let mut table_entries = Vec::with_capacity(entries.len());
    let mut ids = BTreeSet::new();
    let mut syms = BTreeSet::new();
    for (sym, id, line_no) in entries {
        if !ids.insert(id) || !syms.insert(sym.clone()) {
            return Err(Error::parse(
                path,
                line_no,
                format!("duplicate symbol or id `{sym}` {id}"),
            ));
        }
        table_entries.push((sym, id));
    }
    Ok(SymbolTable::new(table_entries)?)
}

fn label(table: &SymbolTable, name: &str, path: &Path, line_no: usize) -> Result<u32> {
    if let Some(id) = table.id(name) {
        return Ok(id);
    }
    if EPSILON_ALIASES.contains(&name) {
        return Ok(EPSILON);
    }
    Err(Error::parse(
        path,
        line_no,
        format!("unknown symbol `{name}`"),
    ))
}

fn state(field: &str, path: &Path, line_no: usize) -> Result<u32> {
    field
        .trim()
        .parse()
        .map_err(|e| Error::parse(path, line_no, format!("bad state `{field}`: {e}")))
}

pub fn parse_fst(text: &str, isyms: SymbolTable, osyms: SymbolTable, path: &Path) -> Result<Fst> {
    let mut arcs = Vec::new();
    let mut finals = Vec::new();
    let mut start = None;
    let mut defined = BTreeSet::new();
    // (target, line) for the dangling-state check
    let mut targets = Vec::new();
    for (line_no, line) in super::content_lines(text) {
        let f = fields(line);
        match f.len() {
            1 | 2 => {
                let s = state(f[0], path, line_no)?;
                if f.len() == 2 {
                    weight(f[1], path, line_no)?;
                }
                start.get_or_insert(s);
                defined.insert(s);
                finals.push(s);
            }
            4 | 5 => {
                let src = state(f[0], path, line_no)?;
                let dst = state(f[1], path, line_no)?;
                if f.len() == 5 {
                    weight(f[4], path, line_no)?;
                }
                let ilabel = label(&isyms, f[2], path, line_no)?;
                let olabel = label(&osyms, f[3], path, line_no)?;
                start.get_or_insert(src);
                defined.insert(src);
                targets.push((dst, line_no));
                arcs.push((
                    src,
                    Arc {
                        ilabel,
                        olabel,
                        next: dst,
                    },
                ));
            }
            n => {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected 1, 2, 4 or 5 fields, found {n}"),
                ))
            }
        }
    }
    for (dst, line_no) in targets {
        if !defined.contains(&dst) {
            return Err(Error::parse(
                path,
                line_no,
                format!("arc into undefined state {dst}"),
            ));
        }
    }
    let start = start.ok_or_else(|| Error::parse(path, 0, "transducer has no states"))?;
    let num_states = defined.iter().next_back().map_or(0, |m| m + 1);
    Ok(Fst::new(num_states, start, arcs, finals, isyms, osyms)?)
}

fn weight(field: &str, path: &Path, line_no: usize) -> Result<()> {
    field
        .trim()
        .parse::<f64>()
        .map(|_| ())
        .map_err(|e| Error::parse(path, line_no, format!("bad weight: {e}")))
}

pub fn load_fst(arcs: &Path, isyms: &Path, osyms: &Path) -> Result<Fst> {
    let i = parse_symbols(&read_to_string(isyms)?, isyms)?;
    let o = parse_symbols(&read_to_string(osyms)?, osyms)?;
    parse_fst(&read_to_string(arcs)?, i, o, arcs)
}

/// Paths of the three files of a transducer directory.
pub fn fst_paths(dir: &Path) -> [PathBuf; 3] {
    [
        dir.join(ARCS_FILE),
        dir.join(ISYMS_FILE),
        dir.join(OSYMS_FILE),
    ]
}

pub fn load_fst_dir(dir: &Path) -> Result<Fst> {
    let [a, i, o] = fst_paths(dir);
    load_fst(&a, &i, &o)
}

pub fn format_symbols(table: &SymbolTable) -> String {
    let mut out = String::new();
    for (id, sym) in table.iter() {
        let _ = writeln!(out, "{sym}\t{id}");
    }
    out
}

/// Arc text with the start state's arcs first. A start state without
/// arcs is announced by its final line, so a transducer whose start
/// state has neither arcs nor finality cannot be written faithfully.
pub fn format_fst(fst: &Fst) -> String {
    let mut out = String::new();
    let name = |t: &SymbolTable, id: u32| t.name(id).unwrap_or_default().to_string();
    let start = fst.start();
    let mut order: Vec<u32> = vec![start];
    order.extend((0..fst.num_states()).filter(|&s| s != start));
    let mut finals: Vec<u32> = order.iter().copied().filter(|&s| fst.is_final(s)).collect();
    if fst.arcs(start).is_empty() && fst.is_final(start) {
        let _ = writeln!(out, "{start}");
        finals.retain(|&s| s != start);
    }
    for &s in &order {
        for a in fst.arcs(s) {
            let _ = writeln!(
                out,
                "{s}\t{}\t{}\t{}",
                a.next,
                name(fst.input_symbols(), a.ilabel),
                name(fst.output_symbols(), a.olabel)
            );
        }
    }
    for s in finals {
        let _ = writeln!(out, "{s}");
    }
    out
}

pub fn write_fst_dir(dir: &Path, fst: &Fst) -> Result<()> {
    let [a, i, o] = fst_paths(dir);
    write_file(&a, format_fst(fst))?;
    write_file(&i, format_symbols(fst.input_symbols()))?;
    write_file(&o, format_symbols(fst.output_symbols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use seglab_core::fst::{SegmenterBuilder, SegmenterPolicy};

    fn syms(names: &[&str]) -> SymbolTable {
        SymbolTable::from_symbols(names.iter().copied())
    }

    #[test]
    fn two_state_identity() {
        let fst = parse_fst(
            "0\t1\ta\ta\n1\n",
            syms(&["a"]),
            syms(&["a"]),
            Path::new("f"),
        )
        .unwrap();
        assert_eq!(fst.apply("a", 8).into_iter().collect::<Vec<_>>(), ["a"]);
        assert!(fst.apply("aa", 8).is_empty());
    }

    #[test]
    fn load_errors() {
        let p = Path::new("f");
        let err = parse_fst("0\t7\ta\ta\n1\n", syms(&["a"]), syms(&["a"]), p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_fst("1\n0\t1\tb\ta\n", syms(&["a"]), syms(&["a"]), p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(parse_symbols("ab\t1\n", p).is_ok());
        assert!(parse_symbols("a\t1\nb\t1\n", p).is_err());
        assert!(parse_symbols("<eps>\t0\nab\t1\n", p).is_ok());
    }

    #[test]
    fn epsilon_output_shortens() {
        // a:a then b:ε then c:c
        let text = "0\t1\ta\ta\n1\t2\tb\t<eps>\n2\t3\tc\tc\n3\n";
        let fst = parse_fst(
            text,
            syms(&["a", "b", "c"]),
            syms(&["a", "c"]),
            Path::new("f"),
        )
        .unwrap();
        assert_eq!(fst.apply("abc", 8).into_iter().collect::<Vec<_>>(), ["ac"]);
    }

    #[test]
    fn write_then_read() {
        let fst = SegmenterBuilder::new()
            .analysis(&["walk", "s"])
            .analysis(&["walks"])
            .analysis(&["walk", "ed"])
            .build();
        let dir = tempfile::tempdir().unwrap();
        write_fst_dir(dir.path(), &fst).unwrap();
        let back = load_fst_dir(dir.path()).unwrap();
        let policy = SegmenterPolicy {
            exclude_identity: true,
            ..Default::default()
        };
        assert_eq!(back.segment_word(&policy, "walks").unwrap(), ["walk", "s"]);
        for w in ["walks", "walked", "walk"] {
            assert_eq!(back.apply(w, 16), fst.apply(w, 16));
        }
    }
}
