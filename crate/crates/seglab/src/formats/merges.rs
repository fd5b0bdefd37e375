//! Merge list: one `left right` pair per line in training order. A
//! leading `#version` line, as written by other subword tools, is
//! ignored.

use std::fmt::Write as _;
use std::path::Path;

use seglab_core::MergeTable;

use crate::error::{read_to_string, write_file, Error, Result};

pub fn parse_merges(text: &str, path: &Path) -> Result<MergeTable> {
    let mut merges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() || (i == 0 && line.starts_with("#version")) {
            continue;
        }
        let mut parts = line.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                merges.push((l.to_string(), r.to_string()));
            }
            _ => return Err(Error::parse(path, i + 1, "expected `left right`")),
        }
    }
    Ok(MergeTable::from_merges(merges))
}

pub fn load_merges(path: &Path) -> Result<MergeTable> {
    parse_merges(&read_to_string(path)?, path)
}

pub fn format_merges(table: &MergeTable) -> String {
    let mut out = String::new();
    for (l, r) in table.merges() {
        let _ = writeln!(out, "{l} {r}");
    }
    out
}

pub fn write_merges(path: &Path, table: &MergeTable) -> Result<()> {
    write_file(path, format_merges(table))
}
