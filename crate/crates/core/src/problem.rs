//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! worlds: w1 w2 w3          (or  atoms: x y z)
//! certain_true:
//!   SENT
//! certain_false:
//!   SENT
//! order:
//!   SENT REL SENT           REL is one of < <= = >= >
//! ranks:
//!   SENT : INTEGER          every event exactly once
//! cond:
//!   (SENT | SENT) REL (SENT | SENT)
//! ```
//!
//! `order:` and `ranks:` are mutually exclusive; `cond:` needs `ranks:` as
//! its base. Inside a conditional term the first top-level `|` separates
//! the event from the conditioner, so disjunctions there must be written
//! with `or`.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{parse_sentence, Event, Space, SpaceRef};
use crate::error::Error;
use crate::ordering::{shared, CompleteOrdering, ConditionalStructure, PartialOrdering, Relation};

/// An error with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {error}")]
pub struct ProblemError {
    pub line: usize,
    pub column: usize,
    pub error: Error,
}

#[derive(Debug, Clone)]
pub enum Body {
    Complete(CompleteOrdering),
    Partial(PartialOrdering),
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub space: SpaceRef,
    pub certain_true: Vec<Event>,
    pub certain_false: Vec<Event>,
    pub body: Body,
    pub conditional: Option<ConditionalStructure>,
}

impl Problem {
    pub fn complete(&self) -> Option<&CompleteOrdering> {
        match &self.body {
            Body::Complete(o) => Some(o),
            Body::Partial(_) => None,
        }
    }

    pub fn partial(&self) -> Option<&PartialOrdering> {
        match &self.body {
            Body::Complete(_) => None,
            Body::Partial(po) => Some(po),
        }
    }

    /// Judgments stated by the file; a complete ordering contributes its
    /// adjacency chain.
    pub fn judgments(&self) -> PartialOrdering {
        match &self.body {
            Body::Complete(o) => o.to_partial(),
            Body::Partial(po) => po.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    CertainTrue,
    CertainFalse,
    Order,
    Ranks,
    Cond,
}

impl Section {
    fn from_name(name: &str) -> Option<Section> {
        Some(match name {
            "certain_true" => Section::CertainTrue,
            "certain_false" => Section::CertainFalse,
            "order" => Section::Order,
            "ranks" => Section::Ranks,
            "cond" => Section::Cond,
            _ => return None,
        })
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::CertainTrue => "certain_true",
            Section::CertainFalse => "certain_false",
            Section::Order => "order",
            Section::Ranks => "ranks",
            Section::Cond => "cond",
        })
    }
}

/// A trimmed slice of a line that remembers where it started.
#[derive(Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    line: usize,
    /// Byte offset of `text` within the line.
    start: usize,
    full: &'a str,
}

impl<'a> Span<'a> {
    fn sub(&self, from: usize, to: usize) -> Span<'a> {
        let raw = &self.text[from..to];
        let lead = raw.len() - raw.trim_start().len();
        Span {
            text: raw.trim(),
            line: self.line,
            start: self.start + from + lead,
            full: self.full,
        }
    }

    fn error_at(&self, offset: usize, error: Error) -> ProblemError {
        let byte = (self.start + offset).min(self.full.len());
        ProblemError {
            line: self.line,
            column: self.full[..byte].chars().count() + 1,
            error,
        }
    }

    fn column(&self) -> usize {
        self.full[..self.start].chars().count() + 1
    }

    fn error(&self, error: Error) -> ProblemError {
        self.error_at(0, error)
    }

    fn syntax(&self, offset: usize, message: impl Into<String>) -> ProblemError {
        self.error_at(
            offset,
            Error::Syntax {
                offset: self.start + offset,
                message: message.into(),
            },
        )
    }

    fn event(&self, space: &Space) -> Result<Event, ProblemError> {
        if self.text.is_empty() {
            return Err(self.syntax(0, "expected a sentence"));
        }
        let sentence = parse_sentence(self.text).map_err(|e| match e {
            Error::Syntax { offset, message } => self.syntax(offset, message),
            other => self.error(other),
        })?;
        sentence.evaluate(space).map_err(|e| self.error(e))
    }
}

/// Splits `SENT REL SENT` at the single relation symbol.
fn split_relation<'a>(
    span: &Span<'a>,
) -> Result<(Span<'a>, Relation, bool, Span<'a>), ProblemError> {
    let bytes = span.text.as_bytes();
    let mut found = None;
    let mut i = 0;
    while i < bytes.len() {
        if matches!(bytes[i], b'<' | b'>' | b'=') {
            let len = if bytes.get(i + 1) == Some(&b'=') && bytes[i] != b'=' {
                2
            } else {
                1
            };
            if found.is_some() {
                return Err(span.syntax(i, "more than one relation symbol"));
            }
            found = Some((i, len));
            i += len;
        } else {
            i += 1;
        }
    }
    let (at, len) =
        found.ok_or_else(|| span.syntax(span.text.len(), "expected one of < <= = >= >"))?;
    let (rel, swap) = Relation::parse(&span.text[at..at + len])
        .ok_or_else(|| span.syntax(at, "unknown relation"))?;
    Ok((
        span.sub(0, at),
        rel,
        swap,
        span.sub(at + len, span.text.len()),
    ))
}

/// `(SENT | SENT)` → event and conditioner spans.
fn split_conditional<'a>(span: &Span<'a>) -> Result<(Span<'a>, Span<'a>), ProblemError> {
    let text = span.text;
    if !text.starts_with('(') {
        return Err(span.syntax(0, "expected `(` opening a conditional term"));
    }
    let mut depth = 0i32;
    let mut bar = None;
    for (i, b) in text.bytes().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 && i + 1 != text.len() {
                    return Err(span.syntax(i + 1, "unexpected text after conditional term"));
                }
                if depth < 0 {
                    return Err(span.syntax(i, "unbalanced `)`"));
                }
            }
            b'|' if depth == 1 && bar.is_none() => bar = Some(i),
            _ => {}
        }
    }
    if depth != 0 {
        return Err(span.syntax(text.len(), "missing `)`"));
    }
    let bar = bar.ok_or_else(|| span.syntax(1, "expected `|` between event and condition"))?;
    Ok((span.sub(1, bar), span.sub(bar + 1, text.len() - 1)))
}

struct CondComparison {
    lhs: (Event, Event),
    rel: Relation,
    rhs: (Event, Event),
    at: (usize, usize),
}

/// Ranks conditional terms from pairwise comparisons: terms joined by
/// weak comparisons in both directions share a rank, and each strict
/// comparison lifts the greater term at least one rank above the lesser.
fn conditional_ranks(
    comparisons: &[CondComparison],
) -> Result<Vec<((Event, Event), u64)>, (usize, usize, Error)> {
    let mut index: BTreeMap<(Event, Event), usize> = BTreeMap::new();
    for c in comparisons {
        for term in [c.lhs, c.rhs] {
            let next = index.len();
            index.entry(term).or_insert(next);
        }
    }
    let n = index.len();
    // ge[u][v]: u >= v is derivable.
    let mut ge = vec![vec![false; n]; n];
    // (greater, lesser, strict, line/col)
    let mut edges = Vec::new();
    for (u, row) in ge.iter_mut().enumerate() {
        row[u] = true;
    }
    for c in comparisons {
        let (a, b) = (index[&c.lhs], index[&c.rhs]);
        ge[a][b] = true;
        edges.push((a, b, c.rel == Relation::Gt, c.at));
        if c.rel == Relation::Eq {
            ge[b][a] = true;
            edges.push((b, a, false, c.at));
        }
    }
    for k in 0..n {
        for i in 0..n {
            if ge[i][k] {
                for j in 0..n {
                    if ge[k][j] {
                        ge[i][j] = true;
                    }
                }
            }
        }
    }
    for &(a, b, strict, (line, column)) in &edges {
        if strict && ge[b][a] {
            return Err((
                line,
                column,
                Error::InvalidRanks("strict comparison lies on a cycle of comparisons".into()),
            ));
        }
    }
    let mut rank = vec![0u64; n];
    loop {
        let mut changed = false;
        for &(a, b, strict, _) in &edges {
            let need = rank[b] + u64::from(strict);
            if rank[a] < need {
                rank[a] = need;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(index.into_iter().map(|(term, i)| (term, rank[i])).collect())
}

fn line_error(line: usize, column: usize, error: Error) -> ProblemError {
    ProblemError {
        line,
        column,
        error,
    }
}

/// Parses a problem file.
pub fn parse_problem(source: &str) -> Result<Problem, ProblemError> {
    let mut space: Option<SpaceRef> = None;
    let mut section: Option<Section> = None;
    let mut seen: Vec<Section> = Vec::new();
    let mut certain_true = Vec::new();
    let mut certain_false = Vec::new();
    let mut partial: Option<PartialOrdering> = None;
    let mut ranks: BTreeMap<Event, (u64, usize, usize)> = BTreeMap::new();
    let mut rank_end = (0, 0);
    let mut cond = Vec::new();
    let mut last_line = 0;

    for (number, raw) in source.lines().enumerate() {
        let line = number + 1;
        last_line = line;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let lead = content.len() - content.trim_start().len();
        let span = Span {
            text: trimmed,
            line,
            start: lead,
            full: raw,
        };

        // Headers: `name:` alone, or `atoms:`/`worlds:` with names.
        if let Some(colon) = trimmed.find(':') {
            let name = trimmed[..colon].trim();
            let rest = span.sub(colon + 1, trimmed.len());
            if name == "atoms" || name == "worlds" {
                if space.is_some() {
                    return Err(span.syntax(0, "space declared twice"));
                }
                let names: Vec<&str> = rest.text.split_whitespace().collect();
                let built = if name == "atoms" {
                    Space::atoms(&names)
                } else {
                    Space::worlds(&names)
                };
                space = Some(shared(built.map_err(|e| rest.error(e))?));
                section = None;
                continue;
            }
            if let Some(s) = Section::from_name(name) {
                if rest.text.is_empty() {
                    if space.is_none() {
                        return Err(span.syntax(0, "declare `atoms:` or `worlds:` first"));
                    }
                    if seen.contains(&s) {
                        return Err(span.syntax(0, format!("section `{s}` appears twice")));
                    }
                    let clash = match s {
                        Section::Order => seen.contains(&Section::Ranks),
                        Section::Ranks => seen.contains(&Section::Order),
                        _ => false,
                    };
                    if clash {
                        return Err(span.syntax(0, "`order:` and `ranks:` cannot both appear"));
                    }
                    seen.push(s);
                    section = Some(s);
                    continue;
                }
            }
        }

        let sp = match &space {
            Some(sp) => sp.clone(),
            None => return Err(span.syntax(0, "declare `atoms:` or `worlds:` first")),
        };
        match section {
            None => return Err(span.syntax(0, "line outside any section")),
            Some(Section::CertainTrue) => certain_true.push(span.event(&sp)?),
            Some(Section::CertainFalse) => certain_false.push(span.event(&sp)?),
            Some(Section::Order) => {
                let (lhs, rel, swap, rhs) = split_relation(&span)?;
                let (mut a, mut b) = (lhs.event(&sp)?, rhs.event(&sp)?);
                if swap {
                    std::mem::swap(&mut a, &mut b);
                }
                partial
                    .get_or_insert_with(|| PartialOrdering::new(sp.clone()))
                    .push(a, rel, b);
            }
            Some(Section::Ranks) => {
                let colon = span
                    .text
                    .rfind(':')
                    .ok_or_else(|| span.syntax(span.text.len(), "expected `SENT : INTEGER`"))?;
                let event = span.sub(0, colon).event(&sp)?;
                let number = span.sub(colon + 1, span.text.len());
                let rank: u64 = number
                    .text
                    .parse()
                    .map_err(|_| number.syntax(0, "expected a nonnegative integer rank"))?;
                let column = span.column();
                if let Some(&(previous, _, _)) = ranks.get(&event) {
                    if previous != rank {
                        return Err(span.error(Error::InvalidRanks(format!(
                            "`{}` already has rank {previous}",
                            span.sub(0, colon).text
                        ))));
                    }
                }
                ranks.insert(event, (rank, line, column));
                rank_end = (line, column);
            }
            Some(Section::Cond) => {
                let (lhs, rel, swap, rhs) = split_relation(&span)?;
                let (la, lc) = split_conditional(&lhs)?;
                let (ra, rc) = split_conditional(&rhs)?;
                let mut l = (la.event(&sp)?, lc.event(&sp)?);
                let mut r = (ra.event(&sp)?, rc.event(&sp)?);
                if swap {
                    std::mem::swap(&mut l, &mut r);
                }
                let column = span.column();
                cond.push(CondComparison {
                    lhs: l,
                    rel,
                    rhs: r,
                    at: (line, column),
                });
            }
        }
    }

    let space = space.ok_or_else(|| {
        line_error(
            last_line.max(1),
            1,
            Error::Syntax {
                offset: 0,
                message: "missing `atoms:` or `worlds:` declaration".into(),
            },
        )
    })?;

    let body = if seen.contains(&Section::Ranks) {
        let mut table = Vec::with_capacity(space.event_count());
        for e in space.events() {
            match ranks.get(&e) {
                Some(&(r, _, _)) => table.push(r),
                None => {
                    let (line, column) = rank_end;
                    return Err(line_error(
                        line.max(1),
                        column.max(1),
                        Error::InvalidRanks(format!("no rank for `{}`", space.describe(&e))),
                    ));
                }
            }
        }
        Body::Complete(
            CompleteOrdering::from_ranks(space.clone(), &table)
                .map_err(|e| line_error(rank_end.0, rank_end.1, e))?,
        )
    } else {
        Body::Partial(partial.unwrap_or_else(|| PartialOrdering::new(space.clone())))
    };

    let conditional = if cond.is_empty() {
        None
    } else {
        let base = match &body {
            Body::Complete(o) => o.clone(),
            Body::Partial(_) => {
                let (line, column) = cond[0].at;
                return Err(line_error(
                    line,
                    column,
                    Error::InvalidRanks("`cond:` needs a `ranks:` section as its base".into()),
                ));
            }
        };
        for c in &cond {
            for (_, given) in [c.lhs, c.rhs] {
                if !base.is_valid_conditioner(&given) {
                    return Err(line_error(c.at.0, c.at.1, Error::InvalidConditioner));
                }
            }
        }
        let ranked =
            conditional_ranks(&cond).map_err(|(line, column, e)| line_error(line, column, e))?;
        let (line, column) = cond[0].at;
        Some(
            ConditionalStructure::from_entries(
                base,
                ranked.into_iter().map(|((a, c), r)| (a, c, r)),
            )
            .map_err(|e| line_error(line, column, e))?,
        )
    };

    Ok(Problem {
        space,
        certain_true,
        certain_false,
        body,
        conditional,
    })
}
