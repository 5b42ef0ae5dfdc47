//! Finite world sets, events over them, and the sentence language that
//! denotes events.
//!
//! A [`Space`] is declared either by atomic sentences (every truth
//! assignment is a world, so `n` atoms give `2^n` worlds) or directly by
//! naming mutually exclusive, exhaustive worlds. An [`Event`] is a subset of
//! the worlds, stored as a bitmask; logically equivalent sentences therefore
//! denote the same event.

mod sentence;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sentence::{parse_sentence, Sentence};

/// Upper bound on worlds for any space that stores per-event data.
pub const MAX_WORLDS: usize = 24;

const RESERVED: [&str; 5] = ["T", "F", "not", "and", "or"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceMode {
    Atoms,
    Worlds,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Space {
    mode: SpaceMode,
    names: Vec<String>,
    world_count: usize,
}

pub type SpaceRef = Arc<Space>;

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn validate_names<S: AsRef<str>>(names: &[S]) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::with_capacity(names.len());
    for name in names {
        let name = name.as_ref();
        if !is_identifier(name) {
            return Err(Error::InvalidName {
                name: name.to_string(),
                reason: "names must match [A-Za-z_][A-Za-z0-9_]*",
            });
        }
        if RESERVED.contains(&name) {
            return Err(Error::InvalidName {
                name: name.to_string(),
                reason: "reserved word",
            });
        }
        if out.iter().any(|n| n == name) {
            return Err(Error::InvalidName {
                name: name.to_string(),
                reason: "duplicate name",
            });
        }
        out.push(name.to_string());
    }
    Ok(out)
}

impl Space {
    /// Every truth assignment to `names` is a world. World `w` makes atom
    /// `i` true iff bit `i` of `w` is set.
    pub fn atoms<S: AsRef<str>>(names: &[S]) -> Result<Space> {
        let names = validate_names(names)?;
        if names.len() > MAX_WORLDS.ilog2() as usize {
            return Err(Error::TooManyWorlds(
                1usize.checked_shl(names.len() as u32).unwrap_or(usize::MAX),
                MAX_WORLDS,
            ));
        }
        let world_count = 1 << names.len();
        Ok(Space {
            mode: SpaceMode::Atoms,
            names,
            world_count,
        })
    }

    /// Each name is one world of a mutually exclusive, exhaustive partition.
    pub fn worlds<S: AsRef<str>>(names: &[S]) -> Result<Space> {
        let names = validate_names(names)?;
        if names.is_empty() {
            return Err(Error::EmptySpace);
        }
        if names.len() > MAX_WORLDS {
            return Err(Error::TooManyWorlds(names.len(), MAX_WORLDS));
        }
        Ok(Space {
            mode: SpaceMode::Worlds,
            world_count: names.len(),
            names,
        })
    }

    /// Worlds `w1 .. wn`.
    pub fn numbered(n: usize) -> Result<Space> {
        let names: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
        Space::worlds(&names)
    }

    pub fn mode(&self) -> SpaceMode {
        self.mode
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    /// Number of events, `2^world_count`.
    pub fn event_count(&self) -> usize {
        1 << self.world_count
    }

    pub fn top(&self) -> Event {
        Event::top(self.world_count)
    }

    pub fn bottom(&self) -> Event {
        Event::bottom(self.world_count)
    }

    pub fn world(&self, index: usize) -> Result<Event> {
        if index >= self.world_count {
            return Err(Error::WorldOutOfRange(index));
        }
        Ok(Event::from_bits_unchecked(1 << index, self.world_count))
    }

    pub fn event(&self, bits: u32) -> Result<Event> {
        Event::from_bits(bits, self.world_count)
    }

    pub fn event_from_worlds(&self, worlds: &[usize]) -> Result<Event> {
        let mut bits = 0u32;
        for &w in worlds {
            if w >= self.world_count {
                return Err(Error::WorldOutOfRange(w));
            }
            bits |= 1 << w;
        }
        Ok(Event::from_bits_unchecked(bits, self.world_count))
    }

    /// All events in bitmask order.
    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        let width = self.world_count;
        (0..self.event_count() as u32).map(move |bits| Event::from_bits_unchecked(bits, width))
    }

    pub fn contains(&self, event: &Event) -> bool {
        event.width() == self.world_count
    }

    pub fn check(&self, event: &Event) -> Result<()> {
        if self.contains(event) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Human readable label of a single world.
    pub fn world_label(&self, index: usize) -> String {
        match self.mode {
            SpaceMode::Worlds => self.names[index].clone(),
            SpaceMode::Atoms => {
                if self.names.is_empty() {
                    return "T".to_string();
                }
                self.names
                    .iter()
                    .enumerate()
                    .map(|(i, n)| {
                        if index >> i & 1 == 1 {
                            n.clone()
                        } else {
                            format!("~{n}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" and ")
            }
        }
    }

    /// Renders an event as a sentence that parses back to the same event in
    /// this space.
    pub fn describe(&self, event: &Event) -> String {
        if event.is_bottom() {
            return "F".to_string();
        }
        if event.is_top() {
            return "T".to_string();
        }
        let worlds: Vec<String> = event
            .worlds()
            .map(|w| match self.mode {
                SpaceMode::Worlds => self.world_label(w),
                SpaceMode::Atoms if self.names.len() > 1 => format!("({})", self.world_label(w)),
                SpaceMode::Atoms => self.world_label(w),
            })
            .collect();
        worlds.join(" or ")
    }

    /// The space declaration as it appears in problem files.
    pub fn declaration(&self) -> String {
        let kw = match self.mode {
            SpaceMode::Atoms => "atoms",
            SpaceMode::Worlds => "worlds",
        };
        if self.names.is_empty() {
            format!("{kw}:")
        } else {
            format!("{kw}: {}", self.names.join(" "))
        }
    }

    pub fn parse_event(&self, text: &str) -> Result<Event> {
        parse_sentence(text)?.evaluate(self)
    }
}

/// A set of worlds. Ordering and hashing follow the bitmask, so the
/// smallest event in a collection is the one with the smallest mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    bits: u32,
    width: u8,
}

impl Event {
    fn mask(width: usize) -> u32 {
        if width >= 32 {
            u32::MAX
        } else {
            (1u32 << width) - 1
        }
    }

    pub fn from_bits(bits: u32, width: usize) -> Result<Event> {
        if width > MAX_WORLDS {
            return Err(Error::TooManyWorlds(width, MAX_WORLDS));
        }
        if bits & !Self::mask(width) != 0 {
            return Err(Error::WorldOutOfRange(
                32 - bits.leading_zeros() as usize - 1,
            ));
        }
        Ok(Event::from_bits_unchecked(bits, width))
    }

    pub(crate) fn from_bits_unchecked(bits: u32, width: usize) -> Event {
        debug_assert!(bits & !Self::mask(width) == 0);
        Event {
            bits,
            width: width as u8,
        }
    }

    pub fn top(width: usize) -> Event {
        Event::from_bits_unchecked(Self::mask(width), width)
    }

    pub fn bottom(width: usize) -> Event {
        Event::from_bits_unchecked(0, width)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Index of this event in dense per-event tables.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn is_bottom(&self) -> bool {
        self.bits == 0
    }

    pub fn is_top(&self) -> bool {
        self.bits == Self::mask(self.width())
    }

    pub fn contains_world(&self, world: usize) -> bool {
        world < self.width() && self.bits >> world & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn worlds(&self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.width()).filter(move |w| bits >> w & 1 == 1)
    }

    fn same_space(&self, other: &Event) -> Result<()> {
        if self.width == other.width {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn complement(&self) -> Event {
        Event::from_bits_unchecked(!self.bits & Self::mask(self.width()), self.width())
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.same_space(other)?;
        Ok(Event::from_bits_unchecked(
            self.bits | other.bits,
            self.width(),
        ))
    }

    pub fn intersection(&self, other: &Event) -> Result<Event> {
        self.same_space(other)?;
        Ok(Event::from_bits_unchecked(
            self.bits & other.bits,
            self.width(),
        ))
    }

    pub fn difference(&self, other: &Event) -> Result<Event> {
        self.same_space(other)?;
        Ok(Event::from_bits_unchecked(
            self.bits & !other.bits,
            self.width(),
        ))
    }

    /// `self` implies `other`: every world of `self` is a world of `other`.
    pub fn implies(&self, other: &Event) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    pub fn is_disjoint(&self, other: &Event) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.bits & other.bits == 0)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.worlds().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

// Operator forms panic on mismatched spaces; use the named methods when the
// operands come from untrusted input.
impl std::ops::BitOr for Event {
    type Output = Event;
    fn bitor(self, rhs: Event) -> Event {
        self.union(&rhs).expect("events from different spaces")
    }
}

impl std::ops::BitAnd for Event {
    type Output = Event;
    fn bitand(self, rhs: Event) -> Event {
        self.intersection(&rhs)
            .expect("events from different spaces")
    }
}

impl std::ops::Not for Event {
    type Output = Event;
    fn not(self) -> Event {
        self.complement()
    }
}
