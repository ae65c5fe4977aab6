//! The `.brat` text format.
//!
//! ```text
//! bratteli v1
//! # the 2^∞ diagram
//! sizes: 1 1
//! unit: 1
//! map 1: 1*2
//! repeat: 1
//! ```
//!
//! Map `i` has one `p*k` token per node of level `i+1`: parent `p` (1-based)
//! at level `i`, multiplicity `k`. `repeat: i` makes maps `i..L-1` repeat
//! forever; `repeat: i as t₁ … t_r` names, for each node of the last level,
//! the node of level `i` it stands for. Without `as` the ranks must close up
//! or level `i` must have a single node.

use std::fmt;

use num_bigint::{BigInt, BigUint};

use crate::diagram::{BratteliSequence, PeriodicTail};
use crate::error::Error;
use crate::simplicial::{IntVector, NonMixingMap};

pub const HEADER: &str = "bratteli v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl ParseError {
    fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Self { line, column, kind: ParseErrorKind::Syntax(msg.into()) }
    }

    fn invalid(line: usize, column: usize, e: Error) -> Self {
        Self { line, column, kind: ParseErrorKind::Invalid(e) }
    }
}

/// A whitespace-separated token with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(s: &str, offset: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(b)) => {
                out.push(Token { text: &s[b..i], column: offset + s[..b].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    out
}

struct Line<'a> {
    number: usize,
    key: &'a str,
    body: Vec<Token<'a>>,
}

#[derive(Default)]
struct Draft<'a> {
    sizes: Option<(usize, Vec<Token<'a>>)>,
    unit: Option<(usize, Vec<Token<'a>>)>,
    maps: Vec<(usize, usize, Vec<Token<'a>>)>,
    repeat: Option<(usize, Vec<Token<'a>>)>,
}

pub fn parse(text: &str) -> Result<BratteliSequence, ParseError> {
    let mut lines = Vec::new();
    let mut header = None;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap();
        if content.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            if content.trim() != HEADER {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(ParseError::syntax(number, col, format!("expected header `{HEADER}`")));
            }
            header = Some(number);
            continue;
        }
        let Some(colon) = content.find(':') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(ParseError::syntax(number, col, "expected `key: values`"));
        };
        let body_column = content[..=colon].chars().count() + 1;
        lines.push(Line {
            number,
            key: content[..colon].trim(),
            body: tokens(&content[colon + 1..], body_column - 1),
        });
    }
    if header.is_none() {
        return Err(ParseError::syntax(1, 1, format!("missing header `{HEADER}`")));
    }

    let mut draft = Draft::default();
    for line in lines {
        let dup = |what: &str| ParseError::syntax(line.number, 1, format!("duplicate `{what}` line"));
        let key_tokens = tokens(line.key, 0);
        match key_tokens.as_slice() {
            [k] if k.text == "sizes" => {
                if draft.sizes.is_some() {
                    return Err(dup("sizes"));
                }
                draft.sizes = Some((line.number, line.body));
            }
            [k] if k.text == "unit" => {
                if draft.unit.is_some() {
                    return Err(dup("unit"));
                }
                draft.unit = Some((line.number, line.body));
            }
            [k] if k.text == "repeat" => {
                if draft.repeat.is_some() {
                    return Err(dup("repeat"));
                }
                draft.repeat = Some((line.number, line.body));
            }
            [k, i] if k.text == "map" => {
                let col = line.key.find(i.text).unwrap() + 1;
                let index = parse_usize(i.text, line.number, col)?;
                draft.maps.push((line.number, index, line.body));
            }
            _ => {
                return Err(ParseError::syntax(line.number, 1, format!("unknown line `{}`", line.key)));
            }
        }
    }
    build(draft, text.lines().count().max(1))
}

fn parse_usize(s: &str, line: usize, column: usize) -> Result<usize, ParseError> {
    s.parse().map_err(|_| ParseError::syntax(line, column, format!("expected a natural number, found `{s}`")))
}

fn parse_biguint(s: &str, line: usize, column: usize) -> Result<BigUint, ParseError> {
    s.parse().map_err(|_| ParseError::syntax(line, column, format!("expected a natural number, found `{s}`")))
}

fn build(draft: Draft<'_>, last_line: usize) -> Result<BratteliSequence, ParseError> {
    let (sizes_line, size_tokens) = draft.sizes.ok_or_else(|| ParseError::syntax(last_line, 1, "missing `sizes` line"))?;
    if size_tokens.is_empty() {
        return Err(ParseError::syntax(sizes_line, 1, "`sizes` needs at least one level"));
    }
    let mut sizes = Vec::new();
    for t in &size_tokens {
        let r = parse_usize(t.text, sizes_line, t.column)?;
        if r == 0 {
            return Err(ParseError::invalid(sizes_line, t.column, Error::EmptyLevel { level: sizes.len() + 1 }));
        }
        sizes.push(r);
    }

    let (unit_line, unit_tokens) = draft.unit.ok_or_else(|| ParseError::syntax(last_line, 1, "missing `unit` line"))?;
    let mut unit = Vec::new();
    for t in &unit_tokens {
        let x: BigInt = t
            .text
            .parse()
            .map_err(|_| ParseError::syntax(unit_line, t.column, format!("expected an integer, found `{}`", t.text)))?;
        if x < BigInt::from(1) {
            return Err(ParseError::invalid(unit_line, t.column, Error::NotOrderUnit));
        }
        unit.push(x);
    }
    if unit.len() != sizes[0] {
        let col = unit_tokens.first().map_or(1, |t| t.column);
        return Err(ParseError::invalid(unit_line, col, Error::RankMismatch { expected: sizes[0], found: unit.len() }));
    }

    let mut slots: Vec<Option<(usize, Vec<Token<'_>>)>> = vec![None; sizes.len() - 1];
    for (line, index, body) in draft.maps {
        if index == 0 || index >= sizes.len() {
            return Err(ParseError::invalid(
                line,
                1,
                Error::LevelOutOfRange { level: index, available: sizes.len().saturating_sub(1) },
            ));
        }
        if slots[index - 1].is_some() {
            return Err(ParseError::syntax(line, 1, format!("duplicate `map {index}` line")));
        }
        slots[index - 1] = Some((line, body));
    }
    let mut maps = Vec::new();
    for (i, slot) in slots.into_iter().enumerate() {
        let (line, body) = slot.ok_or_else(|| ParseError::syntax(last_line, 1, format!("missing `map {}` line", i + 1)))?;
        if body.len() != sizes[i + 1] {
            let col = body.first().map_or(1, |t| t.column);
            return Err(ParseError::invalid(line, col, Error::RankMismatch { expected: sizes[i + 1], found: body.len() }));
        }
        let mut parent = Vec::new();
        let mut mult = Vec::new();
        for (j, t) in body.iter().enumerate() {
            let Some((p, k)) = t.text.split_once('*') else {
                return Err(ParseError::syntax(line, t.column, format!("expected `parent*multiplicity`, found `{}`", t.text)));
            };
            let p = parse_usize(p, line, t.column)?;
            let k_col = t.column + t.text.find('*').unwrap() + 1;
            let k = parse_biguint(k, line, k_col)?;
            if p == 0 || p > sizes[i] {
                return Err(ParseError::invalid(line, t.column, Error::RankMismatch { expected: sizes[i], found: p }));
            }
            if k == BigUint::from(0u32) {
                return Err(ParseError::invalid(line, k_col, Error::NotNonMixing { row: j + 1, nonzero: 0 }));
            }
            parent.push(p - 1);
            mult.push(k);
        }
        let map = NonMixingMap::new(sizes[i], parent, mult).map_err(|e| ParseError::invalid(line, 1, e))?;
        maps.push(map);
    }

    let base_unit = IntVector::new(unit);
    let (tail, tail_line) = match draft.repeat {
        None => (None, unit_line),
        Some((line, body)) => (Some(parse_repeat(line, &body, &sizes)?), line),
    };
    BratteliSequence::new(base_unit, maps, tail).map_err(|e| ParseError::invalid(tail_line, 1, e))
}

fn parse_repeat(line: usize, body: &[Token<'_>], sizes: &[usize]) -> Result<PeriodicTail, ParseError> {
    let Some(first) = body.first() else {
        return Err(ParseError::syntax(line, 1, "`repeat` needs a level"));
    };
    let start = parse_usize(first.text, line, first.column)?;
    let last = sizes.len();
    if start < 1 || start >= last {
        return Err(ParseError::invalid(
            line,
            first.column,
            Error::BadRepeat(format!("repeat level {start} must lie in 1..{}", last.saturating_sub(1))),
        ));
    }
    let types = match body.get(1) {
        None => PeriodicTail::default_types(sizes[start - 1], sizes[last - 1]).ok_or_else(|| {
            ParseError::invalid(
                line,
                first.column,
                Error::BadRepeat(format!(
                    "level {start} has {} nodes and level {last} has {}; list node types with `as`",
                    sizes[start - 1],
                    sizes[last - 1]
                )),
            )
        })?,
        Some(t) if t.text == "as" => {
            let listed = &body[2..];
            if listed.len() != sizes[last - 1] {
                return Err(ParseError::invalid(
                    line,
                    t.column,
                    Error::BadRepeat(format!("{} types given for {} nodes of level {last}", listed.len(), sizes[last - 1])),
                ));
            }
            let mut types = Vec::new();
            for t in listed {
                let x = parse_usize(t.text, line, t.column)?;
                if x == 0 || x > sizes[start - 1] {
                    return Err(ParseError::invalid(
                        line,
                        t.column,
                        Error::BadRepeat(format!("type {x} is not a node of level {start}")),
                    ));
                }
                types.push(x - 1);
            }
            types
        }
        Some(t) => return Err(ParseError::syntax(line, t.column, format!("expected `as`, found `{}`", t.text))),
    };
    Ok(PeriodicTail { start, types })
}

/// Canonical text: header, sizes, unit, maps in order, then the repeat line
/// (with `as` only when the types are not the default ones).
pub fn serialize(seq: &BratteliSequence) -> String {
    Document(seq).to_string()
}

struct Document<'a>(&'a BratteliSequence);

impl fmt::Display for Document<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seq = self.0;
        writeln!(f, "{HEADER}")?;
        writeln!(f, "sizes: {}", join(seq.ranks().iter()))?;
        writeln!(f, "unit: {}", join(seq.base_unit().entries().iter()))?;
        for (i, m) in seq.maps().iter().enumerate() {
            let toks = m.parent().iter().zip(m.mult()).map(|(p, k)| format!("{}*{k}", p + 1));
            writeln!(f, "map {}: {}", i + 1, join(toks))?;
        }
        if let Some(t) = seq.tail() {
            let ranks = seq.ranks();
            let default = PeriodicTail::default_types(ranks[t.start - 1], ranks[ranks.len() - 1]);
            if default.as_ref() == Some(&t.types) {
                writeln!(f, "repeat: {}", t.start)?;
            } else {
                writeln!(f, "repeat: {} as {}", t.start, join(t.types.iter().map(|x| x + 1)))?;
            }
        }
        Ok(())
    }
}

fn join<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_uhf() {
        let s = parse("bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 1*2\nrepeat: 1\n").unwrap();
        assert_eq!(s, BratteliSequence::uhf(2));
        assert_eq!(serialize(&s), "bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 1*2\nrepeat: 1\n");
    }

    #[test]
    fn tree_document() {
        let text = "# two levels of a binary tree\nbratteli v1\nsizes: 1 2 4\nunit: 1\nmap 1: 1*1 1*1\nmap 2: 1*1 1*1 2*1 2*1 # parents\n";
        let s = parse(text).unwrap();
        assert_eq!(s.ranks(), &[1, 2, 4]);
        assert_eq!(s.maps()[1].parent(), &[0, 0, 1, 1]);
        assert_eq!(parse(&serialize(&s)).unwrap(), s);
    }

    #[test]
    fn typed_repeat_round_trips() {
        let text = "bratteli v1\nsizes: 2 3\nunit: 1 2\nmap 1: 1*1 1*2 2*3\nrepeat: 1 as 1 1 2\n";
        let s = parse(text).unwrap();
        assert_eq!(s.tail().unwrap().types, vec![0, 0, 1]);
        assert_eq!(serialize(&s), text);
    }

    #[test]
    fn located_errors() {
        let e = parse("bratteli v1\nsizes: 1 2\nunit: 1\nmap 1: 1*1 3*2\n").unwrap_err();
        assert_eq!((e.line, e.column), (4, 12));
        assert!(matches!(e.kind, ParseErrorKind::Invalid(Error::RankMismatch { .. })));
        let e = parse("bratteli v2\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse("bratteli v1\nsizes: 1 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = parse("bratteli v1\nsizes: 2 3\nunit: 1 1\nmap 1: 1*1 1*1 2*1\nrepeat: 1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(Error::BadRepeat(_))));
        assert_eq!(e.to_string().split(':').next(), Some("5"));
        let e = parse("bratteli v1\nsizes: 1 1\nunit: 0\nmap 1: 1*2\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Invalid(Error::NotOrderUnit));
        let e = parse("bratteli v1\nsizes: 1 1\nunit: 1\nmap 1: 1*0\n").unwrap_err();
        assert_eq!((e.line, e.column), (4, 10));
    }
}
