//! Sentence syntax.
//!
//! ```text
//! sentence := disj
//! disj     := conj (("or" | "|") conj)*
//! conj     := neg  (("and" | "&") neg)*
//! neg      := ("not" | "~") neg | atom
//! atom     := "T" | "F" | IDENT | "(" disj ")"
//! ```
//!
//! Binary operators are left associative. `||` and `&&` are rejected.

use std::fmt;

use super::{Event, Space, SpaceMode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sentence {
    Atom(String),
    Const(bool),
    Not(Box<Sentence>),
    And(Box<Sentence>, Box<Sentence>),
    Or(Box<Sentence>, Box<Sentence>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    LParen,
    RParen,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            b'~' => {
                tokens.push((i, Token::Not));
                i += 1;
            }
            b'&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    return Err(syntax(i, "`&&` is not allowed; use `&` or `and`"));
                }
                tokens.push((i, Token::And));
                i += 1;
            }
            b'|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    return Err(syntax(i, "`||` is not allowed; use `|` or `or`"));
                }
                tokens.push((i, Token::Or));
                i += 1;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let token = match word {
                    "T" => Token::True,
                    "F" => Token::False,
                    "not" => Token::Not,
                    "and" => Token::And,
                    "or" => Token::Or,
                    _ => Token::Ident(word.to_string()),
                };
                tokens.push((start, token));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn disjunction(&mut self) -> Result<Sentence> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let right = self.conjunction()?;
            left = Sentence::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Sentence> {
        let mut left = self.negation()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let right = self.negation()?;
            left = Sentence::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn negation(&mut self) -> Result<Sentence> {
        if self.peek() == Some(&Token::Not) {
            self.pos += 1;
            let inner = self.negation()?;
            return Ok(Sentence::Not(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Sentence> {
        let offset = self.offset();
        let token = match self.tokens.get(self.pos) {
            Some((_, t)) => t.clone(),
            None => return Err(syntax(offset, "unexpected end of sentence")),
        };
        self.pos += 1;
        match token {
            Token::True => Ok(Sentence::Const(true)),
            Token::False => Ok(Sentence::Const(false)),
            Token::Ident(name) => Ok(Sentence::Atom(name)),
            Token::LParen => {
                let inner = self.disjunction()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(syntax(self.offset(), "expected `)`")),
                }
            }
            Token::RParen => Err(syntax(offset, "unexpected `)`")),
            Token::And => Err(syntax(offset, "operator `and` is missing its left operand")),
            Token::Or => Err(syntax(offset, "operator `or` is missing its left operand")),
            Token::Not => unreachable!("handled in negation"),
        }
    }
}

/// Parses a sentence. Errors carry the byte offset of the offending token.
pub fn parse_sentence(text: &str) -> Result<Sentence> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
    };
    let sentence = parser.disjunction()?;
    if parser.pos < tokens.len() {
        let message = match &tokens[parser.pos].1 {
            Token::RParen => "unbalanced `)`".to_string(),
            Token::Ident(name) => format!("unexpected `{name}`; expected an operator"),
            _ => "unexpected token; expected an operator".to_string(),
        };
        return Err(syntax(parser.offset(), message));
    }
    Ok(sentence)
}

impl Sentence {
    pub fn atom(name: &str) -> Sentence {
        Sentence::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Sentence) -> Sentence {
        Sentence::Not(Box::new(inner))
    }

    pub fn and(left: Sentence, right: Sentence) -> Sentence {
        Sentence::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Sentence, right: Sentence) -> Sentence {
        Sentence::Or(Box::new(left), Box::new(right))
    }

    /// The set of worlds at which the sentence is true.
    pub fn evaluate(&self, space: &Space) -> Result<Event> {
        let width = space.world_count();
        Ok(match self {
            Sentence::Const(true) => space.top(),
            Sentence::Const(false) => space.bottom(),
            Sentence::Atom(name) => {
                let index = space
                    .names()
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::UnknownAtom(name.clone()))?;
                match space.mode() {
                    SpaceMode::Worlds => Event::from_bits_unchecked(1 << index, width),
                    SpaceMode::Atoms => {
                        let bits = (0..width as u32)
                            .filter(|w| w >> index & 1 == 1)
                            .fold(0u32, |acc, w| acc | 1 << w);
                        Event::from_bits_unchecked(bits, width)
                    }
                }
            }
            Sentence::Not(inner) => inner.evaluate(space)?.complement(),
            Sentence::And(l, r) => l.evaluate(space)?.intersection(&r.evaluate(space)?)?,
            Sentence::Or(l, r) => l.evaluate(space)?.union(&r.evaluate(space)?)?,
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Sentence::Or(..) => 1,
            Sentence::And(..) => 2,
            Sentence::Not(_) => 3,
            Sentence::Atom(_) | Sentence::Const(_) => 4,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Minimal-parenthesis rendering that parses back to an equal tree.
impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sentence::Atom(name) => write!(f, "{name}"),
            Sentence::Const(true) => write!(f, "T"),
            Sentence::Const(false) => write!(f, "F"),
            Sentence::Not(inner) => {
                write!(f, "~")?;
                inner.write_child(f, 3)
            }
            Sentence::And(l, r) => {
                l.write_child(f, 2)?;
                write!(f, " and ")?;
                r.write_child(f, 3)
            }
            Sentence::Or(l, r) => {
                l.write_child(f, 1)?;
                write!(f, " or ")?;
                r.write_child(f, 2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atom(n: &str) -> Sentence {
        Sentence::atom(n)
    }

    #[test]
    fn constants_and_simple_forms() {
        assert_eq!(parse_sentence("T").unwrap(), Sentence::Const(true));
        assert_eq!(parse_sentence(" F ").unwrap(), Sentence::Const(false));
        assert_eq!(
            parse_sentence("x and ~x").unwrap(),
            Sentence::and(atom("x"), Sentence::not(atom("x")))
        );
    }

    #[test]
    fn precedence_not_and_or() {
        // Hand trace: disj -> conj(neg(~a)) ; sees `or` -> conj(b and c).
        assert_eq!(
            parse_sentence("~a or b and c").unwrap(),
            Sentence::or(
                Sentence::not(atom("a")),
                Sentence::and(atom("b"), atom("c"))
            )
        );
        assert_eq!(
            parse_sentence("a | b & ~c").unwrap(),
            parse_sentence("a or (b and not c)").unwrap()
        );
    }

    #[test]
    fn left_associative() {
        assert_eq!(
            parse_sentence("a or b or c").unwrap(),
            Sentence::or(Sentence::or(atom("a"), atom("b")), atom("c"))
        );
        assert_eq!(
            parse_sentence("a & b & c").unwrap(),
            Sentence::and(Sentence::and(atom("a"), atom("b")), atom("c"))
        );
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let offset = |s: &str| match parse_sentence(s) {
            Err(Error::Syntax { offset, .. }) => offset,
            other => panic!("expected syntax error for {s:?}, got {other:?}"),
        };
        assert_eq!(offset("w1 and"), 6);
        assert_eq!(offset("a || b"), 2);
        assert_eq!(offset("a && b"), 2);
        assert_eq!(offset("(a or b"), 7);
        assert_eq!(offset("a b"), 2);
        assert_eq!(offset("a)"), 1);
        assert_eq!(offset("and a"), 0);
        assert_eq!(offset("a $ b"), 2);
        assert_eq!(offset(""), 0);
        assert_eq!(offset("not"), 3);
    }

    #[test]
    fn evaluation() {
        let xy = Space::atoms(&["x", "y"]).unwrap();
        let e = xy.parse_event("x or y").unwrap();
        assert_eq!(e.len(), 3);
        assert!(!e.contains_world(0));
        let w = Space::numbered(3).unwrap();
        assert_eq!(w.parse_event("w1 or w3").unwrap().bits(), 0b101);
        for space in [&xy, &w] {
            assert!(space.parse_event("T").unwrap().is_top());
            assert!(space.parse_event("F").unwrap().is_bottom());
        }
        assert!(xy.parse_event("x and ~x").unwrap().is_bottom());
        assert!(w.parse_event("w1 and ~w1").unwrap().is_bottom());
        assert_eq!(
            w.parse_event("w4"),
            Err(Error::UnknownAtom("w4".to_string()))
        );
    }

    fn arb_sentence() -> impl Strategy<Value = Sentence> {
        let leaf = prop_oneof![
            Just(Sentence::Const(true)),
            Just(Sentence::Const(false)),
            prop::sample::select(vec!["x", "y", "z"]).prop_map(Sentence::atom),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Sentence::not),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Sentence::and(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| Sentence::or(l, r)),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(s in arb_sentence()) {
            let space = Space::atoms(&["x", "y", "z"]).unwrap();
            let reparsed = parse_sentence(&s.to_string()).unwrap();
            prop_assert_eq!(&reparsed, &s);
            prop_assert_eq!(reparsed.evaluate(&space).unwrap(), s.evaluate(&space).unwrap());
        }

        #[test]
        fn evaluation_is_homomorphic(a in arb_sentence(), b in arb_sentence()) {
            let space = Space::atoms(&["x", "y", "z"]).unwrap();
            let ea = a.evaluate(&space).unwrap();
            let eb = b.evaluate(&space).unwrap();
            prop_assert_eq!(Sentence::not(a.clone()).evaluate(&space).unwrap(), ea.complement());
            prop_assert_eq!(Sentence::and(a.clone(), b.clone()).evaluate(&space).unwrap(), ea & eb);
            prop_assert_eq!(Sentence::or(a, b).evaluate(&space).unwrap(), ea | eb);
        }
    }
}
