//! Journal records, one per line:
//!
//! ```text
//! space   <ts> worlds: w1 w2 w3
//! assert  <ts> <jid> <SENT> <REL> <SENT>
//! retract <ts> <jid>
//! ```
//!
//! `ts` is milliseconds since the Unix epoch. Sentences are stored in the
//! space's canonical rendering, so a journal replays identically however
//! the judgment was first typed.

use std::fmt;

use qualprob::Relation;

use crate::error::SessionError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Space {
        ts: u64,
        declaration: String,
    },
    Assert {
        ts: u64,
        jid: String,
        lhs: String,
        rel: Relation,
        rhs: String,
    },
    Retract {
        ts: u64,
        jid: String,
    },
}

impl Record {
    pub fn ts(&self) -> u64 {
        match self {
            Record::Space { ts, .. } | Record::Assert { ts, .. } | Record::Retract { ts, .. } => {
                *ts
            }
        }
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Record::Space { ts, declaration } => write!(f, "space {ts} {declaration}"),
            Record::Assert {
                ts,
                jid,
                lhs,
                rel,
                rhs,
            } => write!(f, "assert {ts} {jid} {lhs} {rel} {rhs}"),
            Record::Retract { ts, jid } => write!(f, "retract {ts} {jid}"),
        }
    }
}

fn corrupt(line: usize, message: impl Into<String>) -> SessionError {
    SessionError::Journal {
        line,
        message: message.into(),
    }
}

/// Splits off the next whitespace-delimited word.
fn word(text: &str) -> Option<(&str, &str)> {
    let text = text.trim_start();
    if text.is_empty() {
        return None;
    }
    let end = text.find(char::is_whitespace).unwrap_or(text.len());
    Some((&text[..end], &text[end..]))
}

/// Splits `SENT REL SENT` at the relation symbol.
fn judgment(text: &str) -> Option<(String, Relation, String)> {
    let at = text.find(['<', '>', '='])?;
    let len = if text[at + 1..].starts_with('=') && !text[at..].starts_with('=') {
        2
    } else {
        1
    };
    let (rel, swap) = Relation::parse(&text[at..at + len])?;
    if swap {
        return None;
    }
    let (lhs, rhs) = (text[..at].trim(), text[at + len..].trim());
    if lhs.is_empty() || rhs.is_empty() || rhs.contains(['<', '>', '=']) {
        return None;
    }
    Some((lhs.to_string(), rel, rhs.to_string()))
}

pub fn parse_record(text: &str, line: usize) -> Result<Record, SessionError> {
    let (kind, rest) = word(text).ok_or_else(|| corrupt(line, "empty record"))?;
    let (ts, rest) = word(rest).ok_or_else(|| corrupt(line, "missing timestamp"))?;
    let ts: u64 = ts
        .parse()
        .map_err(|_| corrupt(line, format!("bad timestamp `{ts}`")))?;
    match kind {
        "space" => Ok(Record::Space {
            ts,
            declaration: rest.trim().to_string(),
        }),
        "assert" => {
            let (jid, rest) = word(rest).ok_or_else(|| corrupt(line, "missing judgment id"))?;
            let (lhs, rel, rhs) =
                judgment(rest).ok_or_else(|| corrupt(line, "malformed judgment"))?;
            Ok(Record::Assert {
                ts,
                jid: jid.to_string(),
                lhs,
                rel,
                rhs,
            })
        }
        "retract" => {
            let (jid, rest) = word(rest).ok_or_else(|| corrupt(line, "missing judgment id"))?;
            if !rest.trim().is_empty() {
                return Err(corrupt(line, "trailing text after judgment id"));
            }
            Ok(Record::Retract {
                ts,
                jid: jid.to_string(),
            })
        }
        other => Err(corrupt(line, format!("unknown record type `{other}`"))),
    }
}

/// Parses a whole journal; blank lines are ignored.
pub fn parse_journal(text: &str) -> Result<Vec<Record>, SessionError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_record(l, i + 1))
        .collect()
}

pub fn render_journal(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let records = vec![
            Record::Space {
                ts: 1,
                declaration: "worlds: w1 w2 w3".into(),
            },
            Record::Assert {
                ts: 2,
                jid: "j1".into(),
                lhs: "w1 or w2".into(),
                rel: Relation::Ge,
                rhs: "not (w1 and w3)".into(),
            },
            Record::Retract {
                ts: 3,
                jid: "j1".into(),
            },
        ];
        let text = render_journal(&records);
        assert_eq!(
            text,
            "space 1 worlds: w1 w2 w3\nassert 2 j1 w1 or w2 >= not (w1 and w3)\nretract 3 j1\n"
        );
        assert_eq!(parse_journal(&text).unwrap(), records);
    }

    #[test]
    fn corrupt_lines() {
        for (text, line) in [
            ("space x worlds: a", 1),
            ("space 1 worlds: a\nassert 2 j1 a >", 2),
            ("space 1 worlds: a\n\nretract 2", 3),
            ("bogus 1", 1),
            ("space 1 worlds: a\nassert 2 j1 a < b", 2),
        ] {
            match parse_journal(text) {
                Err(SessionError::Journal { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
