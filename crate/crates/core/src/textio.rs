//! Line-oriented text formats.
//!
//! `.fst` files hold one transducer:
//!
//! ```text
//! # comment
//! !isym SYMBOL        declared input symbol
//! !osym SYMBOL        declared output symbol
//! SRC DST IN OUT      arc
//! STATE               final state
//! ```
//!
//! Fields are separated by runs of spaces or tabs. The state count is one
//! more than the largest state index mentioned. `.lst` manifests list one
//! `.fst` path per line in application order. Reports are TSV tables with
//! one row per transducer and a `total` row.

use std::fmt::Write as _;

use thiserror::Error;

use crate::fst::{Arc, Fst, FstError, FstStats, StateId};
use crate::reduce::ReductionReport;
use crate::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Symbol { line: usize, source: FstError },
    #[error(transparent)]
    Fst(#[from] FstError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn fields(line: &str) -> Vec<&str> {
    line.split([' ', '\t']).filter(|f| !f.is_empty()).collect()
}

/// Content lines with their 1-based line numbers; blanks and `#` comments skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim_end_matches('\r');
        let trimmed = line.trim_matches([' ', '\t']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

pub fn parse_fst(text: &str) -> Result<Fst, ParseError> {
    let state = |line: usize, field: &str| -> Result<StateId, ParseError> {
        field
            .parse::<StateId>()
            .map_err(|_| syntax(line, format!("expected a state index, found {field:?}")))
    };
    let symbol = |line: usize, field: &str| -> Result<Symbol, ParseError> {
        Symbol::new(field).map_err(|source| ParseError::Symbol { line, source })
    };

    let mut max_state = 0;
    let mut arcs = Vec::new();
    let mut finals = Vec::new();
    let mut declared_in = Vec::new();
    let mut declared_out = Vec::new();

    for (no, line) in content_lines(text) {
        match fields(line).as_slice() {
            [q] => {
                let q = state(no, q)?;
                max_state = max_state.max(q);
                finals.push(q);
            }
            ["!isym", sym] => declared_in.push(symbol(no, sym)?),
            ["!osym", sym] => declared_out.push(symbol(no, sym)?),
            [src, dst, input, output] => {
                let src = state(no, src)?;
                let dst = state(no, dst)?;
                max_state = max_state.max(src).max(dst);
                arcs.push(Arc::new(src, symbol(no, input)?, symbol(no, output)?, dst));
            }
            other => {
                return Err(syntax(
                    no,
                    format!(
                        "expected 1, 2 (!isym/!osym) or 4 fields, found {}",
                        other.len()
                    ),
                ))
            }
        }
    }

    Ok(Fst::new(
        max_state + 1,
        finals,
        arcs,
        declared_in,
        declared_out,
    )?)
}

/// Canonical text of a transducer; `parse_fst` inverts it exactly.
pub fn serialize_fst(fst: &Fst) -> String {
    let mut out = String::new();
    for s in fst.declared_in() {
        writeln!(out, "!isym {s}").unwrap();
    }
    for s in fst.declared_out() {
        writeln!(out, "!osym {s}").unwrap();
    }
    for arc in fst.arcs() {
        writeln!(out, "{arc}").unwrap();
    }
    for q in fst.finals() {
        writeln!(out, "{q}").unwrap();
    }
    out
}

/// Paths of the transducers of a cascade, first-applied first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub paths: Vec<String>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ParseError> {
    let paths: Vec<String> = content_lines(text)
        .map(|(_, line)| line.trim_matches([' ', '\t']).to_string())
        .collect();
    if paths.is_empty() {
        return Err(syntax(0, "manifest lists no transducers"));
    }
    Ok(Manifest { paths })
}

pub fn write_manifest(manifest: &Manifest) -> String {
    let mut out = String::new();
    for p in &manifest.paths {
        out.push_str(p);
        out.push('\n');
    }
    out
}

pub const REPORT_HEADER: &str = "fst\tstates_before\tarcs_before\tinsyms_before\toutsyms_before\tstates_after\tarcs_after\tinsyms_after\toutsyms_after";

/// TSV size table: one row per transducer, numbered from 1 by position in
/// `reports`, followed by a `total` row over the state and arc columns.
pub fn write_report(reports: &[ReductionReport]) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    let cols = |s: &FstStats| {
        format!(
            "{}\t{}\t{}\t{}",
            s.states, s.arcs, s.input_symbols, s.output_symbols
        )
    };
    let mut total_before = (0, 0);
    let mut total_after = (0, 0);
    for (i, r) in reports.iter().enumerate() {
        writeln!(out, "{}\t{}\t{}", i + 1, cols(&r.before), cols(&r.after)).unwrap();
        total_before.0 += r.before.states;
        total_before.1 += r.before.arcs;
        total_after.0 += r.after.states;
        total_after.1 += r.after.arcs;
    }
    writeln!(
        out,
        "total\t{}\t{}\t-\t-\t{}\t{}\t-\t-",
        total_before.0, total_before.1, total_after.0, total_after.1
    )
    .unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Symbol {
        Symbol::new(t).unwrap()
    }

    #[test]
    fn smallest_arc_file() {
        let f = parse_fst("0 1 a x\n1\n").unwrap();
        assert_eq!(f.state_count(), 2);
        assert_eq!(f.arcs(), &[Arc::new(0, s("a"), s("x"), 1)]);
        assert_eq!(f.finals().iter().copied().collect::<Vec<_>>(), [1]);
    }

    #[test]
    fn epsilon_loop_file() {
        let f = parse_fst("0 0 <eps> y\n0\n").unwrap();
        assert_eq!(f.state_count(), 1);
        assert!(f.arcs()[0].input.is_epsilon());
        assert!(f.is_final(0));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_fst("0 1 a\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_fst("# c\n0 x a a\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_fst("!foo a\n"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_fst("0 1 a <unk>\n"),
            Err(ParseError::Fst(FstError::IllegalUnknownOutput { .. }))
        ));
        assert!(matches!(
            parse_fst("0 1 <NP> a\n"),
            Err(ParseError::Symbol { line: 1, .. })
        ));
        assert!(matches!(
            parse_fst("!isym <eps>\n"),
            Err(ParseError::Fst(FstError::ReservedSymbolInAlphabet(_)))
        ));
    }

    #[test]
    fn comments_blanks_tabs_and_crlf() {
        let f = parse_fst("# header\n\n0\t1   a  x\r\n  # indented comment\n1\r\n").unwrap();
        assert_eq!(serialize_fst(&f), "0 1 a x\n1\n");
    }

    #[test]
    fn canonical_identity() {
        let f = Fst::new(2, [1], [Arc::new(0, s("a"), s("a"), 1)], [], []).unwrap();
        assert_eq!(serialize_fst(&f), "0 1 a a\n1\n");
    }

    #[test]
    fn declarations_preserved() {
        let f = Fst::new(
            2,
            [1],
            [Arc::new(0, s("a"), s("x"), 1)],
            [s("b")],
            [s("x"), s("z")],
        )
        .unwrap();
        let text = serialize_fst(&f);
        assert_eq!(text, "!isym b\n!osym z\n0 1 a x\n1\n");
        assert_eq!(parse_fst(&text).unwrap(), f);
    }

    #[test]
    fn empty_fst_round_trip() {
        let f = Fst::new(1, [], [], [], []).unwrap();
        assert_eq!(serialize_fst(&f), "");
        assert_eq!(parse_fst("").unwrap(), f);
    }

    #[test]
    fn manifests() {
        let m = parse_manifest("t1.fst\nt2.fst\n").unwrap();
        assert_eq!(m.paths, ["t1.fst", "t2.fst"]);
        let m = parse_manifest("# cascade\n\n  a.fst \n").unwrap();
        assert_eq!(m.paths, ["a.fst"]);
        assert!(parse_manifest("").is_err());
        assert!(parse_manifest("# only a comment\n").is_err());
        assert_eq!(write_manifest(&m), "a.fst\n");
    }

    fn row(states: usize, arcs: usize, i: usize, o: usize) -> FstStats {
        FstStats {
            states,
            arcs,
            input_symbols: i,
            output_symbols: o,
        }
    }

    #[test]
    fn unreduced_report_has_equal_columns() {
        let st = row(2, 1, 1, 1);
        let r = ReductionReport {
            stage_index: 0,
            before: st,
            after: st,
            classes_merged: 0,
            symbols_eliminated: 0,
        };
        assert_eq!(
            write_report(&[r]),
            format!("{REPORT_HEADER}\n1\t2\t1\t1\t1\t2\t1\t1\t1\ntotal\t2\t1\t-\t-\t2\t1\t-\t-\n")
        );
    }

    #[test]
    fn twelve_row_size_table_totals() {
        // (states, arcs before, in, out, arcs after, in after, out after)
        let table = [
            (10487, 404903, 138, 137, 404903, 138, 137),
            (604, 28569, 136, 135, 28569, 136, 135),
            (27704, 225215, 11, 10, 225215, 11, 10),
            (3613, 61259, 23, 23, 61259, 23, 23),
            (1276, 128222, 146, 142, 124754, 143, 142),
            (3293, 29079, 12, 12, 29079, 12, 12),
            (5544, 166704, 34, 33, 90024, 19, 18),
            (396, 19008, 48, 48, 12276, 31, 31),
            (7009, 370419, 54, 54, 204411, 30, 27),
            (6033, 1156053, 158, 158, 498506, 66, 65),
            (573, 114328, 171, 171, 52801, 78, 45),
            (2, 288, 144, 16, 34, 17, 16),
        ];
        let reports: Vec<ReductionReport> = table
            .iter()
            .enumerate()
            .map(|(i, &(q, a, ni, no, a2, ni2, no2))| ReductionReport {
                stage_index: i,
                before: row(q, a, ni, no),
                after: row(q, a2, ni2, no2),
                classes_merged: 0,
                symbols_eliminated: 0,
            })
            .collect();
        let tsv = write_report(&reports);
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 14);
        assert_eq!(lines[12], "12\t2\t288\t144\t16\t2\t34\t17\t16");
        assert_eq!(
            lines[13],
            "total\t66534\t2704047\t-\t-\t66534\t1731831\t-\t-"
        );
    }
}
