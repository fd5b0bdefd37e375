//! Typology TSV: `language_code<TAB>feature_id<TAB>value`.

use std::fmt::Write as _;
use std::path::Path;

use seglab_core::TypologyTable;

use crate::error::{read_to_string, write_file, Error, Result};

pub fn parse_typology(text: &str, path: &Path) -> Result<TypologyTable> {
    let mut table = TypologyTable::new();
    for (line_no, line) in super::content_lines(text) {
        let f: Vec<&str> = line.split('\t').collect();
        let [lang, feature, value] = f[..] else {
            return Err(Error::parse(
                path,
                line_no,
                "expected `language<TAB>feature<TAB>value`",
            ));
        };
        table
            .insert(lang, feature, value)
            .map_err(|e| Error::parse(path, line_no, e))?;
    }
    Ok(table)
}

pub fn load_typology(path: &Path) -> Result<TypologyTable> {
    parse_typology(&read_to_string(path)?, path)
}

pub fn format_typology(table: &TypologyTable) -> String {
    let mut out = String::new();
    for (l, f, v) in table.entries() {
        let _ = writeln!(out, "{l}\t{f}\t{v}");
    }
    out
}

pub fn write_typology(path: &Path, table: &TypologyTable) -> Result<()> {
    write_file(path, format_typology(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_rejections() {
        let p = Path::new("t.tsv");
        let t = parse_typology("tur\t26A\tStrongly suffixing\n", p).unwrap();
        assert_eq!(t.get("tur", "26A"), Some("Strongly suffixing"));
        assert_eq!(t.get("eng", "26A"), None);
        let err = parse_typology("tur\t26A\tx\ntur\t81A\tSOV\n", p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_typology("tur\t26A\tx\ntur\t26A\ty\n", p).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(parse_typology("tur\t26A\n", p).is_err());
        assert_eq!(format_typology(&t), "tur\t26A\tStrongly suffixing\n");
    }
}
