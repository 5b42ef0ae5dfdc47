//! Belief orderings: complete rank tables, asserted partial judgments,
//! probability distributions and conditional rank tables.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Event, Space, SpaceRef};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest space for which a dense conditional table is built.
pub const MAX_CONDITIONAL_WORLDS: usize = 10;

/// A total preorder over all events of a space, stored as a dense rank per
/// event. Ranks always form the contiguous range `0..=max_rank`.
///
/// Nothing beyond totality is enforced: orderings that break the belief
/// axioms are representable and are what [`crate::axioms`] diagnoses.
#[derive(Clone, PartialEq, Eq)]
pub struct CompleteOrdering {
    space: SpaceRef,
    ranks: Vec<u32>,
}

fn dense_ranks<T: Ord>(scores: &[T]) -> Vec<u32> {
    let distinct: BTreeSet<&T> = scores.iter().collect();
    let distinct: Vec<&T> = distinct.into_iter().collect();
    scores
        .iter()
        .map(|s| distinct.binary_search(&s).expect("score present") as u32)
        .collect()
}

impl CompleteOrdering {
    /// Builds an ordering from one rank per event, indexed by event bitmask.
    /// Ranks are compressed to a contiguous range preserving their order.
    pub fn from_ranks(space: SpaceRef, ranks: &[u64]) -> Result<Self> {
        if ranks.len() != space.event_count() {
            return Err(Error::InvalidRanks(format!(
                "expected {} ranks, got {}",
                space.event_count(),
                ranks.len()
            )));
        }
        Ok(CompleteOrdering {
            ranks: dense_ranks(ranks),
            space,
        })
    }

    /// Ranks events by any totally ordered score; equal scores tie.
    pub fn from_scores<T: Ord>(space: SpaceRef, scores: &[T]) -> Result<Self> {
        if scores.len() != space.event_count() {
            return Err(Error::InvalidRanks(format!(
                "expected {} scores, got {}",
                space.event_count(),
                scores.len()
            )));
        }
        Ok(CompleteOrdering {
            ranks: dense_ranks(scores),
            space,
        })
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn rank(&self, event: &Event) -> u32 {
        self.ranks[event.index()]
    }

    pub fn max_rank(&self) -> u32 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    pub fn compare(&self, a: &Event, b: &Event) -> Result<Ordering> {
        self.space.check(a)?;
        self.space.check(b)?;
        Ok(self.rank(a).cmp(&self.rank(b)))
    }

    /// Whether `c` may be conditioned on: it must rank strictly above F.
    pub fn is_valid_conditioner(&self, c: &Event) -> bool {
        self.rank(c) > self.rank(&self.space.bottom())
    }

    /// Compares `a` and `b` given `c`, defined as the comparison of `a ∧ c`
    /// with `b ∧ c`.
    pub fn condition_compare(&self, a: &Event, b: &Event, c: &Event) -> Result<Ordering> {
        self.space.check(a)?;
        self.space.check(b)?;
        self.space.check(c)?;
        if !self.is_valid_conditioner(c) {
            return Err(Error::InvalidConditioner);
        }
        Ok(self.rank(&(*a & *c)).cmp(&self.rank(&(*b & *c))))
    }

    /// Events grouped by rank, lowest class first, each class in bitmask order.
    pub fn classes(&self) -> Vec<Vec<Event>> {
        let mut classes = vec![Vec::new(); self.max_rank() as usize + 1];
        for e in self.space.events() {
            classes[self.rank(&e) as usize].push(e);
        }
        classes
    }

    /// Returns a copy with the ranks of two events exchanged.
    pub fn with_swapped(&self, a: &Event, b: &Event) -> CompleteOrdering {
        let mut ranks = self.ranks.clone();
        ranks.swap(a.index(), b.index());
        let ranks: Vec<u64> = ranks.into_iter().map(u64::from).collect();
        CompleteOrdering {
            ranks: dense_ranks(&ranks),
            space: self.space.clone(),
        }
    }

    /// Asserted judgments that pin this ordering down: one strict
    /// comparison between representatives of adjacent rank classes and an
    /// equality chain inside each class.
    pub fn to_partial(&self) -> PartialOrdering {
        let mut po = PartialOrdering::new(self.space.clone());
        let classes = self.classes();
        for class in &classes {
            for pair in class.windows(2) {
                po.push(pair[1], Relation::Eq, pair[0]);
            }
        }
        for pair in classes.windows(2) {
            po.push(pair[1][0], Relation::Gt, pair[0][0]);
        }
        po
    }
}

impl fmt::Debug for CompleteOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes = self.classes();
        let parts: Vec<String> = classes
            .iter()
            .map(|c| {
                c.iter()
                    .map(|e| format!("{e:?}"))
                    .collect::<Vec<_>>()
                    .join(" = ")
            })
            .collect();
        write!(f, "CompleteOrdering[{}]", parts.join(" < "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    /// Parses any of `<`, `<=`, `=`, `>=`, `>`. The boolean is true when the
    /// operands must be swapped to obtain the returned relation.
    pub fn parse(symbol: &str) -> Option<(Relation, bool)> {
        match symbol {
            ">" => Some((Relation::Gt, false)),
            ">=" => Some((Relation::Ge, false)),
            "=" => Some((Relation::Eq, false)),
            "<=" => Some((Relation::Ge, true)),
            "<" => Some((Relation::Gt, true)),
            _ => None,
        }
    }

    /// Whether `ordering` (the sign of lhs − rhs) satisfies the relation.
    pub fn holds(&self, ordering: Ordering) -> bool {
        match self {
            Relation::Gt => ordering == Ordering::Greater,
            Relation::Ge => ordering != Ordering::Less,
            Relation::Eq => ordering == Ordering::Equal,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub id: String,
    pub lhs: Event,
    pub rel: Relation,
    pub rhs: Event,
}

/// A list of asserted comparisons with stable ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOrdering {
    space: SpaceRef,
    judgments: Vec<Judgment>,
    next_id: usize,
}

impl PartialOrdering {
    pub fn new(space: SpaceRef) -> Self {
        PartialOrdering {
            space,
            judgments: Vec::new(),
            next_id: 1,
        }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn judgments(&self) -> &[Judgment] {
        &self.judgments
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }

    /// Appends a judgment under a fresh id `j<n>` and returns the id.
    ///
    /// Panics if an event is from another space; use [`Self::insert`] for
    /// unchecked input.
    pub fn push(&mut self, lhs: Event, rel: Relation, rhs: Event) -> String {
        loop {
            let id = format!("j{}", self.next_id);
            self.next_id += 1;
            if !self.judgments.iter().any(|j| j.id == id) {
                self.insert(id.clone(), lhs, rel, rhs)
                    .expect("events from the ordering's space");
                return id;
            }
        }
    }

    pub fn insert(&mut self, id: String, lhs: Event, rel: Relation, rhs: Event) -> Result<()> {
        self.space.check(&lhs)?;
        self.space.check(&rhs)?;
        if self.judgments.iter().any(|j| j.id == id) {
            return Err(Error::DuplicateJudgment(id));
        }
        self.judgments.push(Judgment { id, lhs, rel, rhs });
        Ok(())
    }

    pub fn remove(&mut self, id: &str) -> Option<Judgment> {
        let pos = self.judgments.iter().position(|j| j.id == id)?;
        Some(self.judgments.remove(pos))
    }

    pub fn get(&self, id: &str) -> Option<&Judgment> {
        self.judgments.iter().find(|j| j.id == id)
    }

    /// The sub-ordering made of the listed ids, in their original order.
    pub fn restrict(&self, ids: &[String]) -> PartialOrdering {
        PartialOrdering {
            space: self.space.clone(),
            judgments: self
                .judgments
                .iter()
                .filter(|j| ids.contains(&j.id))
                .cloned()
                .collect(),
            next_id: self.next_id,
        }
    }
}

/// A probability mass function over the worlds of a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    space: SpaceRef,
    mass: Vec<Rational>,
}

impl Distribution {
    pub fn new(space: SpaceRef, mass: Vec<Rational>) -> Result<Self> {
        if mass.len() != space.world_count() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} masses, got {}",
                space.world_count(),
                mass.len()
            )));
        }
        if mass.iter().any(|m| m.is_negative()) {
            return Err(Error::InvalidDistribution("negative mass".into()));
        }
        let total: Rational = mass.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(Distribution { space, mass })
    }

    pub fn uniform(space: SpaceRef) -> Self {
        let n = space.world_count() as i64;
        let mass = vec![crate::rational::frac(1, n); space.world_count()];
        Distribution { space, mass }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn prob(&self, event: &Event) -> Rational {
        event.worlds().map(|w| &self.mass[w]).sum()
    }

    /// Probabilities of every event, indexed by bitmask.
    pub fn event_probs(&self) -> Vec<Rational> {
        let n = self.space.world_count();
        let mut probs = vec![Rational::zero(); 1 << n];
        for bits in 1usize..(1 << n) {
            let low = bits.trailing_zeros() as usize;
            probs[bits] = &probs[bits & (bits - 1)] + &self.mass[low];
        }
        probs
    }

    /// Events other than T with probability one, and events other than F
    /// with probability zero.
    pub fn certainty_sets(&self) -> (Vec<Event>, Vec<Event>) {
        let probs = self.event_probs();
        let mut certain_true = Vec::new();
        let mut certain_false = Vec::new();
        for e in self.space.events() {
            let p = &probs[e.index()];
            if p.is_one() && !e.is_top() {
                certain_true.push(e);
            } else if p.is_zero() && !e.is_bottom() {
                certain_false.push(e);
            }
        }
        (certain_true, certain_false)
    }

    /// Whether every judgment holds under exact comparison.
    pub fn satisfies(&self, po: &PartialOrdering) -> bool {
        po.judgments()
            .iter()
            .all(|j| j.rel.holds(self.prob(&j.lhs).cmp(&self.prob(&j.rhs))))
    }
}

/// The complete ordering that `p` agrees with.
pub fn induced_ordering(p: &Distribution) -> CompleteOrdering {
    CompleteOrdering::from_scores(p.space.clone(), &p.event_probs())
        .expect("one probability per event")
}

/// Conditional ranks `r(a | c)` on a scale shared by all conditioners.
///
/// The table is defined on pairs `(a, c)` whose conditioner ranks above F
/// in the base ordering. Explicit tables may cover only part of that
/// domain; every check then quantifies over the supplied pairs.
#[derive(Clone, PartialEq, Eq)]
pub struct ConditionalStructure {
    base: CompleteOrdering,
    table: Vec<Option<u32>>,
}

impl ConditionalStructure {
    /// Builds a structure from explicit `(a, c, rank)` entries. Ranks are
    /// compressed to a contiguous range.
    pub fn from_entries(
        base: CompleteOrdering,
        entries: impl IntoIterator<Item = (Event, Event, u64)>,
    ) -> Result<Self> {
        let space = base.space().clone();
        if space.world_count() > MAX_CONDITIONAL_WORLDS {
            return Err(Error::CapExceeded {
                what: "conditional table worlds",
                size: space.world_count(),
                cap: MAX_CONDITIONAL_WORLDS,
            });
        }
        let n = space.event_count();
        let mut raw: Vec<Option<u64>> = vec![None; n * n];
        for (a, c, rank) in entries {
            space.check(&a)?;
            space.check(&c)?;
            if !base.is_valid_conditioner(&c) {
                return Err(Error::InvalidConditioner);
            }
            let slot = &mut raw[c.index() * n + a.index()];
            if let Some(existing) = slot {
                if *existing != rank {
                    return Err(Error::InvalidRanks(format!(
                        "conflicting conditional ranks for ({a:?} | {c:?})"
                    )));
                }
            }
            *slot = Some(rank);
        }
        let present: Vec<u64> = raw.iter().flatten().copied().collect();
        let dense = dense_ranks(&present);
        let mut it = dense.into_iter();
        let table = raw
            .iter()
            .map(|slot| slot.map(|_| it.next().expect("same length")))
            .collect();
        Ok(ConditionalStructure { base, table })
    }

    pub fn base(&self) -> &CompleteOrdering {
        &self.base
    }

    pub fn space(&self) -> &SpaceRef {
        self.base.space()
    }

    /// Conditional rank of `a` given `c`, if the pair is in the domain.
    pub fn get(&self, a: &Event, c: &Event) -> Option<u32> {
        let n = self.space().event_count();
        self.table[c.index() * n + a.index()]
    }

    /// Domain pairs `(a, c)` in order of conditioner then event bitmask.
    pub fn entries(&self) -> impl Iterator<Item = (Event, Event, u32)> + '_ {
        let space = self.space().clone();
        let n = space.event_count();
        let width = space.world_count();
        self.table.iter().enumerate().filter_map(move |(i, slot)| {
            slot.map(|r| {
                (
                    Event::from_bits_unchecked((i % n) as u32, width),
                    Event::from_bits_unchecked((i / n) as u32, width),
                    r,
                )
            })
        })
    }

    pub fn is_empty(&self) -> bool {
        self.table.iter().all(Option::is_none)
    }

    /// Conditioners that appear in the domain, in bitmask order.
    pub fn conditioners(&self) -> Vec<Event> {
        let n = self.space().event_count();
        self.space()
            .events()
            .filter(|c| {
                self.table[c.index() * n..(c.index() + 1) * n]
                    .iter()
                    .any(Option::is_some)
            })
            .collect()
    }

    /// Returns a copy with the conditional ranks of two domain pairs
    /// exchanged. Both pairs must be in the domain.
    pub fn with_swapped(&self, first: (Event, Event), second: (Event, Event)) -> Option<Self> {
        let n = self.space().event_count();
        let i = first.1.index() * n + first.0.index();
        let j = second.1.index() * n + second.0.index();
        if self.table[i].is_none() || self.table[j].is_none() {
            return None;
        }
        let mut table = self.table.clone();
        table.swap(i, j);
        Some(ConditionalStructure {
            base: self.base.clone(),
            table,
        })
    }
}

impl fmt::Debug for ConditionalStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConditionalStructure")
            .field("base", &self.base)
            .field("entries", &self.entries().count())
            .finish()
    }
}

/// Conditional ranks induced by `p`: pairs are ordered by the exact ratio
/// `p(a ∧ c) / p(c)`, over conditioners with positive probability.
pub fn induced_conditional(p: &Distribution) -> Result<ConditionalStructure> {
    let base = induced_ordering(p);
    let space = p.space().clone();
    if space.world_count() > MAX_CONDITIONAL_WORLDS {
        return Err(Error::CapExceeded {
            what: "conditional table worlds",
            size: space.world_count(),
            cap: MAX_CONDITIONAL_WORLDS,
        });
    }
    let probs = p.event_probs();
    let mut keyed: Vec<(Event, Event, Rational)> = Vec::new();
    for c in space.events() {
        let pc = &probs[c.index()];
        if pc.is_zero() {
            continue;
        }
        for a in space.events() {
            keyed.push((a, c, &probs[(a & c).index()] / pc));
        }
    }
    let ratios: Vec<&Rational> = keyed.iter().map(|(_, _, r)| r).collect();
    let ranks = dense_ranks(&ratios);
    ConditionalStructure::from_entries(
        base,
        keyed
            .iter()
            .zip(ranks)
            .map(|((a, c, _), r)| (*a, *c, u64::from(r))),
    )
}

pub fn shared(space: Space) -> SpaceRef {
    Arc::new(space)
}
