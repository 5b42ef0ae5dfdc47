//! Brute-force generators used as ground truth by the test suites.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::algebra::{Space, SpaceRef};
use crate::axioms::{check_unconditional, Axiom, ScanOptions};
use crate::error::{Error, Result};
use crate::ordering::{shared, CompleteOrdering, Distribution};
use crate::rational::{frac, Rational};
use crate::realize::{realize_complete, Realizability};

pub const ENUMERATION_MAX_WORLDS: usize = 3;
pub const SEARCH_MAX_WORLDS: usize = 5;

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    /// Sorted by rank vector.
    pub orderings: Vec<CompleteOrdering>,
    pub total_count: usize,
    pub all_realizable: bool,
}

/// Every qualitative probability on `space` with no certain events besides
/// T and F: F alone at the bottom, T alone at the top, and the remaining
/// events in any weak order that satisfies additivity of comparisons
/// (`a >= b` iff `a∨c >= b∨c` for `c` disjoint from both).
pub fn enumerate_qualitative_probabilities(space: &SpaceRef) -> Result<EnumerationResult> {
    let n = space.world_count();
    if n > ENUMERATION_MAX_WORLDS {
        return Err(Error::CapExceeded {
            what: "enumeration worlds",
            size: n,
            cap: ENUMERATION_MAX_WORLDS,
        });
    }
    let full = space.top().bits();
    let mut search = Enumerator {
        full,
        classes: Vec::new(),
        rank_of: vec![None; full as usize + 1],
        found: BTreeSet::new(),
    };
    search.extend(1);

    let options = ScanOptions::default();
    let mut orderings = Vec::with_capacity(search.found.len());
    let mut all_realizable = true;
    for ranks in search.found {
        let o = CompleteOrdering::from_ranks(space.clone(), &ranks)?;
        let report = check_unconditional(&o, &[], &[], &options)?;
        if !report.passes(Axiom::QualitativeProbability) {
            return Err(Error::Solver(format!(
                "enumerated ordering fails the axioms: {o:?}"
            )));
        }
        all_realizable &= realize_complete(&o)?.is_realizable();
        orderings.push(o);
    }
    Ok(EnumerationResult {
        total_count: orderings.len(),
        orderings,
        all_realizable,
    })
}

struct Enumerator {
    full: u32,
    /// Middle events grouped into classes, lowest first.
    classes: Vec<Vec<u32>>,
    rank_of: Vec<Option<usize>>,
    found: BTreeSet<Vec<u64>>,
}

impl Enumerator {
    /// Position of an assigned event on a common scale where F is below
    /// and T above every class.
    fn level(&self, bits: u32) -> Option<i64> {
        if bits == 0 {
            Some(-1)
        } else if bits == self.full {
            Some(self.classes.len() as i64)
        } else {
            self.rank_of[bits as usize].map(|r| r as i64)
        }
    }

    fn reindex(&mut self) {
        for (r, class) in self.classes.iter().enumerate() {
            for &e in class {
                self.rank_of[e as usize] = Some(r);
            }
        }
    }

    /// Additivity restricted to already placed events, for instances that
    /// involve `e`.
    fn consistent(&self, e: u32) -> bool {
        let full = self.full;
        for a in 0..=full {
            for b in 0..=full {
                let used = a | b;
                let rest = full & !used;
                let mut c = rest;
                loop {
                    if c != 0 && [a, b, a | c, b | c].contains(&e) {
                        if let (Some(la), Some(lb), Some(lac), Some(lbc)) = (
                            self.level(a),
                            self.level(b),
                            self.level(a | c),
                            self.level(b | c),
                        ) {
                            if la.cmp(&lb) != lac.cmp(&lbc) {
                                return false;
                            }
                        }
                    }
                    if c == 0 {
                        break;
                    }
                    c = (c - 1) & rest;
                }
            }
        }
        true
    }

    fn extend(&mut self, e: u32) {
        if e >= self.full {
            let mut ranks = vec![0u64; self.full as usize + 1];
            ranks[self.full as usize] = self.classes.len() as u64 + 1;
            for (r, class) in self.classes.iter().enumerate() {
                for &x in class {
                    ranks[x as usize] = r as u64 + 1;
                }
            }
            self.found.insert(ranks);
            return;
        }
        let slots = self.classes.len();
        // Join an existing class.
        for r in 0..slots {
            self.classes[r].push(e);
            self.rank_of[e as usize] = Some(r);
            if self.consistent(e) {
                self.extend(e + 1);
            }
            self.classes[r].pop();
        }
        // Open a new class at each gap.
        for r in 0..=slots {
            self.classes.insert(r, vec![e]);
            self.reindex();
            if self.consistent(e) {
                self.extend(e + 1);
            }
            self.classes.remove(r);
            self.rank_of[e as usize] = None;
            self.reindex();
        }
        self.rank_of[e as usize] = None;
    }
}

/// Seeded distribution with masses on a grid of `1/resolution`.
///
/// The stream is `ChaCha8Rng::seed_from_u64(seed)`. Draw `n - 1` cut points
/// as `next_u64() % (resolution + 1)`, sort them, bracket them with `0` and
/// `resolution`, and give world `i` the gap between cut `i` and cut `i + 1`,
/// divided by `resolution`.
pub fn random_rational_distribution(
    space: &SpaceRef,
    seed: u64,
    resolution: u64,
) -> Result<Distribution> {
    if resolution == 0 {
        return Err(Error::InvalidDistribution(
            "resolution must be positive".into(),
        ));
    }
    let n = space.world_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts: Vec<u64> = (0..n.saturating_sub(1))
        .map(|_| rng.next_u64() % (resolution + 1))
        .collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(resolution);
    let mass = cuts
        .windows(2)
        .map(|w| frac((w[1] - w[0]) as i64, resolution as i64))
        .collect();
    Distribution::new(space.clone(), mass)
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(CompleteOrdering),
    NotFound { nodes: usize },
}

/// Random walk over strict qualitative probabilities looking for one with no
/// agreeing distribution.
///
/// The walk starts from the ordering of a generic random distribution. A
/// move picks disjoint nonempty `x`, `y` such that for every `c` disjoint
/// from both, `x∨c` and `y∨c` sit next to each other, and swaps all those
/// pairs at once; such moves keep additivity intact. Each move is one node
/// of `budget`. Any ordering returned has been re-checked against the
/// axioms and found unrealizable.
pub fn search_nonrepresentable(
    world_count: usize,
    budget: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if world_count > SEARCH_MAX_WORLDS {
        return Err(Error::CapExceeded {
            what: "search worlds",
            size: world_count,
            cap: SEARCH_MAX_WORLDS,
        });
    }
    let space = shared(Space::numbered(world_count)?);
    if budget == 0 {
        return Ok(SearchOutcome::NotFound { nodes: 0 });
    }
    let full = space.top().bits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // order[k] is the event at position k, lowest first.
    let mut order = generic_start(&space, &mut rng)?;
    let mut nodes = 0;
    let mut last: Option<(u32, u32)> = None;
    while nodes < budget {
        let mut position = vec![0usize; full as usize + 1];
        for (k, &e) in order.iter().enumerate() {
            position[e as usize] = k;
        }
        let moves = flippable_pairs(full, &position);
        let moves: Vec<_> = moves
            .into_iter()
            .filter(|&(x, y)| Some((y, x)) != last)
            .collect();
        if moves.is_empty() {
            order = generic_start(&space, &mut rng)?;
            last = None;
            continue;
        }
        let (x, y) = moves[(rng.next_u64() % moves.len() as u64) as usize];
        let rest = full & !(x | y);
        let mut c = rest;
        loop {
            order.swap(position[(x | c) as usize], position[(y | c) as usize]);
            if c == 0 {
                break;
            }
            c = (c - 1) & rest;
        }
        last = Some((x, y));
        nodes += 1;

        let mut ranks = vec![0u64; full as usize + 1];
        for (k, &e) in order.iter().enumerate() {
            ranks[e as usize] = k as u64;
        }
        let o = CompleteOrdering::from_ranks(space.clone(), &ranks)?;
        if let Realizability::NonRealizable(_) = realize_complete(&o)? {
            let report = check_unconditional(&o, &[], &[], &ScanOptions::default())?;
            if report.passes(Axiom::QualitativeProbability) {
                return Ok(SearchOutcome::Found(o));
            }
            return Err(Error::Solver("search move broke the axioms".into()));
        }
    }
    Ok(SearchOutcome::NotFound { nodes })
}

/// Events sorted by probability under a random distribution whose event
/// probabilities are pairwise distinct.
fn generic_start(space: &SpaceRef, rng: &mut ChaCha8Rng) -> Result<Vec<u32>> {
    loop {
        let p = random_rational_distribution(space, rng.next_u64(), 1 << 20)?;
        if p.masses().iter().any(Zero::is_zero) {
            continue;
        }
        let probs: Vec<Rational> = p.event_probs();
        let distinct: BTreeSet<&Rational> = probs.iter().collect();
        if distinct.len() != probs.len() {
            continue;
        }
        let mut order: Vec<u32> = (0..probs.len() as u32).collect();
        order.sort_by(|a, b| probs[*a as usize].cmp(&probs[*b as usize]));
        return Ok(order);
    }
}

/// Disjoint pairs `(x, y)` with `x` directly below `y` for every padding
/// `c` — the moves that keep additivity.
fn flippable_pairs(full: u32, position: &[usize]) -> Vec<(u32, u32)> {
    let mut moves = Vec::new();
    for x in 1..=full {
        for y in 1..=full {
            if x & y != 0 {
                continue;
            }
            let rest = full & !(x | y);
            let mut c = rest;
            let ok = loop {
                if position[(x | c) as usize] + 1 != position[(y | c) as usize] {
                    break false;
                }
                if c == 0 {
                    break true;
                }
                c = (c - 1) & rest;
            };
            if ok {
                moves.push((x, y));
            }
        }
    }
    moves
}
