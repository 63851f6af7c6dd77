//! Line-oriented text formats.
//!
//! Five formats share one set of conventions: UTF-8, one record per line,
//! `#` starts a comment line, blank lines and surrounding whitespace are
//! ignored.  Filtrations (`.zzf`) and op scripts (`.zzops`) are read and
//! written; barcodes (`.zzb`), converted listings (`.zzud`) and vine logs
//! (`.zzvine`) are output-only.  Writers are deterministic: the same value
//! always prints byte-identically.

use std::fmt::Write as _;

use crate::cellmodel::{Arrow, ArrowDir, Simplex, VertexId, ZigzagFiltration};
use crate::error::{Error, Result};
use crate::reps::{Barcode, PairSet};
use crate::updates::{UpdateOp, VineRecord};
use crate::updown::{map_pair_to_interval, ArrowRef, UpDownState};

/// `(1-based line number, significant content)` for each non-comment line.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize> {
    token.parse().map_err(|_| parse_err(line, format!("{what} `{token}` is not a number")))
}

fn parse_simplex(line: usize, tokens: &[&str]) -> Result<Simplex> {
    if tokens.is_empty() {
        return Err(parse_err(line, "expected at least one vertex id"));
    }
    let vertices = tokens
        .iter()
        .map(|t| {
            t.parse::<u32>()
                .map(VertexId)
                .map_err(|_| parse_err(line, format!("vertex id `{t}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    Simplex::new(vertices).map_err(|e| parse_err(line, e.to_string()))
}

/// Reads a `.zzf` filtration: a `zzf 1` header line followed by one arrow
/// per line, `a v1 ... vk` for additions and `d v1 ... vk` for deletions.
pub fn parse_filtration(text: &str) -> Result<ZigzagFiltration> {
    let mut lines = significant_lines(text);
    match lines.next() {
        Some((_, "zzf 1")) => {}
        Some((n, other)) => {
            return Err(parse_err(n, format!("expected header `zzf 1`, found `{other}`")))
        }
        None => return Err(parse_err(1, "missing `zzf 1` header")),
    }
    let mut arrows = Vec::new();
    for (n, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let dir = match tokens[0] {
            "a" => ArrowDir::Add,
            "d" => ArrowDir::Del,
            other => return Err(parse_err(n, format!("expected `a` or `d`, found `{other}`"))),
        };
        arrows.push(Arrow { dir, simplex: parse_simplex(n, &tokens[1..])? });
    }
    Ok(ZigzagFiltration::new(arrows))
}

/// Prints a filtration in the `.zzf` format accepted by
/// [`parse_filtration`].
pub fn write_filtration(f: &ZigzagFiltration) -> String {
    let mut out = String::from("zzf 1\n");
    for arrow in f.arrows() {
        out.push(match arrow.dir {
            ArrowDir::Add => 'a',
            ArrowDir::Del => 'd',
        });
        for v in arrow.simplex.vertices() {
            write!(out, " {}", v.0).expect("string write");
        }
        out.push('\n');
    }
    out
}

/// Reads a `.zzops` script: one op per line, as printed by
/// [`UpdateOp`]'s `Display` — `switch J`, `expand-in I v1 ... vk`,
/// `contract-in I`, `expand-out I v1 ... vk`, `contract-out I`.
pub fn parse_ops(text: &str) -> Result<Vec<UpdateOp>> {
    let mut ops = Vec::new();
    for (n, line) in significant_lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let arg = |what| -> Result<usize> {
            let token = tokens
                .get(1)
                .ok_or_else(|| parse_err(n, format!("`{}` needs {what}", tokens[0])))?;
            parse_usize(n, token, what)
        };
        let op = match tokens[0] {
            "switch" => UpdateOp::Switch(arg("an arrow position")?),
            "contract-in" => UpdateOp::ContractIn(arg("an arrow position")?),
            "contract-out" => UpdateOp::ContractOut(arg("an arrow position")?),
            "expand-in" => {
                UpdateOp::ExpandIn(arg("an insertion position")?, parse_simplex(n, &tokens[2..])?)
            }
            "expand-out" => {
                UpdateOp::ExpandOut(arg("an insertion position")?, parse_simplex(n, &tokens[2..])?)
            }
            other => return Err(parse_err(n, format!("unknown op `{other}`"))),
        };
        ops.push(op);
    }
    Ok(ops)
}

/// Prints a script in the `.zzops` format accepted by [`parse_ops`].
pub fn write_ops(ops: &[UpdateOp]) -> String {
    let mut out = String::new();
    for op in ops {
        writeln!(out, "{op}").expect("string write");
    }
    out
}

/// Prints a barcode as sorted `p b d` lines, one per bar (multiplicity by
/// repetition).
pub fn write_barcode(bars: &Barcode) -> String {
    let mut out = String::new();
    for (&(p, b, d), &count) in bars {
        for _ in 0..count {
            writeln!(out, "{p} {b} {d}").expect("string write");
        }
    }
    out
}

/// Prints a barcode as `p b d | <creator> <destroyer> <kind>` lines, one per
/// pair, carrying the maintained pairing alongside each interval.
pub fn write_barcode_with_pairs(st: &UpDownState, pairs: &PairSet) -> Result<String> {
    let mut lines = Vec::with_capacity(pairs.len());
    for (_, pair) in pairs.iter() {
        let (p, iv) = map_pair_to_interval(st, pair.dim(st), pair.creator, pair.destroyer)?;
        lines.push((
            (p, iv.b, iv.d),
            format!("{p} {} {} | {} {} {}", iv.b, iv.d, pair.creator, pair.destroyer, pair.kind()),
        ));
    }
    lines.sort();
    let mut out = String::new();
    for (_, line) in lines {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Prints a converted state as a `.zzud` listing: each ascending arrow as
/// `asc <cellid> dim <p> bnd <ids...> from <F-arrow>`, then each descending
/// arrow as `desc <cellid> from <F-arrow>`.
pub fn write_updown(st: &UpDownState) -> String {
    let mut out = String::new();
    for &c in st.ascending() {
        let cell = st.cell(c);
        write!(out, "asc {c} dim {} bnd", cell.dim).expect("string write");
        for &b in cell.boundary.cells() {
            write!(out, " {b}").expect("string write");
        }
        let from = st.f_index(ArrowRef::add(c));
        match from {
            Some(i) => writeln!(out, " from {i}"),
            None => writeln!(out, " from -"),
        }
        .expect("string write");
    }
    for &c in st.descending() {
        let from = st.f_index(ArrowRef::del(c));
        match from {
            Some(i) => writeln!(out, "desc {c} from {i}"),
            None => writeln!(out, "desc {c} from -"),
        }
        .expect("string write");
    }
    out
}

/// Prints vine records as a `.zzvine` log: for script step `S`, lines
/// `step S pair OLD->NEW` where `NEW` is the new key of a surviving pair,
/// `id` when the key did not change, or `created`/`destroyed` for pairs
/// appearing at / vanishing from this step.
pub fn write_vine_log(records: &[VineRecord]) -> String {
    let mut out = String::new();
    for (s, rec) in records.iter().enumerate() {
        for (old, new) in &rec.survivors {
            if old == new {
                writeln!(out, "step {s} pair {old}->id")
            } else {
                writeln!(out, "step {s} pair {old}->{new}")
            }
            .expect("string write");
        }
        for gone in &rec.destroyed {
            writeln!(out, "step {s} pair {gone}->destroyed").expect("string write");
        }
        for fresh in &rec.created {
            writeln!(out, "step {s} pair {fresh}->created").expect("string write");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fresh_f_barcode;
    use crate::updates::{apply_script, Bundle};

    const EDGE_ZZF: &str = "\
# one edge, grown then torn down
zzf 1
a 0
a 1
a 0 1
d 0 1
d 1
d 0
";

    #[test]
    fn filtration_round_trips() {
        let f = parse_filtration(EDGE_ZZF).unwrap();
        assert_eq!(f.len(), 6);
        let text = write_filtration(&f);
        let again = parse_filtration(&text).unwrap();
        assert_eq!(f.arrows(), again.arrows());
        // Comments are dropped on write, content is canonical.
        assert_eq!(text, write_filtration(&again));
    }

    #[test]
    fn filtration_parse_errors_carry_line_numbers() {
        let cases = [
            ("a 0\n", 1, "header"),
            ("zzf 2\n", 1, "header"),
            ("zzf 1\nx 0\n", 2, "expected `a` or `d`"),
            ("zzf 1\na\n", 2, "at least one vertex"),
            ("zzf 1\na 0\n# fine\na 1 1\n", 4, "repeated"),
            ("zzf 1\nd 0 zebra\n", 2, "not a number"),
        ];
        for (text, want_line, want_msg) in cases {
            match parse_filtration(text) {
                Err(Error::Parse { line, msg }) => {
                    assert_eq!(line, want_line, "wrong line for {text:?}");
                    assert!(msg.contains(want_msg), "msg {msg:?} for {text:?}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn ops_round_trip() {
        let text = "\
# a little bit of everything
switch 0
expand-in 2 0 1
contract-in 2
expand-out 1 5
contract-out 1
";
        let ops = parse_ops(text).unwrap();
        assert_eq!(ops.len(), 5);
        assert_eq!(parse_ops(&write_ops(&ops)).unwrap(), ops);
    }

    #[test]
    fn op_parse_errors_carry_line_numbers() {
        let cases = [
            ("shrink 3\n", 1, "unknown op"),
            ("switch\n", 1, "needs an arrow position"),
            ("switch x\n", 1, "not a number"),
            ("#ok\nexpand-in 2\n", 2, "at least one vertex"),
        ];
        for (text, want_line, want_msg) in cases {
            match parse_ops(text) {
                Err(Error::Parse { line, msg }) => {
                    assert_eq!(line, want_line, "wrong line for {text:?}");
                    assert!(msg.contains(want_msg), "msg {msg:?} for {text:?}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn barcode_listing_is_sorted_and_repeats_multiplicity() {
        let f = parse_filtration(EDGE_ZZF).unwrap();
        let bars = fresh_f_barcode(&f).unwrap();
        assert_eq!(write_barcode(&bars), "0 1 5\n0 2 2\n0 4 4\n");

        let mut two = Barcode::new();
        two.insert((1, 2, 3), 2);
        two.insert((0, 1, 1), 1);
        assert_eq!(write_barcode(&two), "0 1 1\n1 2 3\n1 2 3\n");
    }

    #[test]
    fn barcode_with_pairs_names_arrows_and_kinds() {
        let bundle = Bundle::new(parse_filtration(EDGE_ZZF).unwrap()).unwrap();
        let text = write_barcode_with_pairs(&bundle.state, &bundle.pairs).unwrap();
        assert_eq!(text, "0 1 5 | +0 -0 cc\n0 2 2 | +1 +2 co\n0 4 4 | -2 -1 oc\n");
    }

    #[test]
    fn updown_listing_shows_conversion() {
        let bundle = Bundle::new(parse_filtration(EDGE_ZZF).unwrap()).unwrap();
        let text = write_updown(&bundle.state);
        assert_eq!(
            text,
            "asc 0 dim 0 bnd from 0\n\
             asc 1 dim 0 bnd from 1\n\
             asc 2 dim 1 bnd 0 1 from 2\n\
             desc 2 from 3\n\
             desc 1 from 4\n\
             desc 0 from 5\n"
        );
    }

    #[test]
    fn vine_log_reports_survivors_created_and_destroyed() {
        let mut bundle = Bundle::new(parse_filtration(EDGE_ZZF).unwrap()).unwrap();
        let records =
            apply_script(&mut bundle, &parse_ops("contract-in 2\n").unwrap(), true).unwrap();
        let text = write_vine_log(&records);
        // Removing the edge merges its closed-open and open-closed pairs
        // into one closed-closed pair keyed by the surviving creator.
        assert_eq!(
            text,
            "step 0 pair +0,-0->id\n\
             step 0 pair +1,+2->+1,-1\n\
             step 0 pair -2,-1->destroyed\n"
        );
    }
}
