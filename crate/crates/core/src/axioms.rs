//! Checkers for the ordering assumptions and their derived results.
//!
//! Every checker scans tuples of events in increasing bitmask order, so the
//! reported witness is the lexicographically smallest violating tuple.
//! Spaces larger than [`ScanOptions::exhaustive_max_worlds`] are either
//! rejected or, when sampling is enabled, checked on random tuples, in
//! which case the report is marked as sampled.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::algebra::Event;
use crate::error::{Error, Result};
use crate::ordering::{CompleteOrdering, ConditionalStructure, PartialOrdering, Relation};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    A1,
    A2,
    A3,
    A4,
    Theorem,
    H1,
    QualitativeProbability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConditionalAxiom {
    A5Coherence,
    A4Conditional,
    A6,
    H2,
    Corollary,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for ConditionalAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Violating events, in the order named by `detail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub events: Vec<Event>,
    pub detail: String,
    /// Judgment ids involved, for partial orderings.
    pub judgments: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

fn fail(events: Vec<Event>, detail: String) -> Verdict {
    Verdict::Fail(Witness {
        events,
        detail,
        judgments: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub verdicts: BTreeMap<Axiom, Verdict>,
    /// True when some verdict rests on sampled tuples only.
    pub sampled: bool,
    pub notes: Vec<String>,
    /// Fraction of event pairs related by the closure (partial orderings).
    pub coverage: Option<Rational>,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> Option<&Verdict> {
        self.verdicts.get(&axiom)
    }

    pub fn passes(&self, axiom: Axiom) -> bool {
        self.get(axiom).is_some_and(Verdict::is_pass)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(Verdict::is_pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalReport {
    pub verdicts: BTreeMap<ConditionalAxiom, Verdict>,
    pub sampled: bool,
    pub notes: Vec<String>,
}

impl ConditionalReport {
    pub fn passes(&self, axiom: ConditionalAxiom) -> bool {
        self.verdicts.get(&axiom).is_some_and(Verdict::is_pass)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(Verdict::is_pass)
    }
}

/// Limits for tuple scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    /// Largest world count scanned exhaustively.
    pub exhaustive_max_worlds: usize,
    /// Random tuples per check beyond the cap; `None` rejects large spaces.
    pub samples: Option<usize>,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            exhaustive_max_worlds: 5,
            samples: None,
            seed: 0,
        }
    }
}

/// Either every tuple of events in lexicographic order, or random ones.
enum Scan {
    Exhaustive,
    Sampled { rng: ChaCha8Rng, count: usize },
}

impl Scan {
    fn new(world_count: usize, options: &ScanOptions) -> Result<Scan> {
        if world_count <= options.exhaustive_max_worlds {
            return Ok(Scan::Exhaustive);
        }
        match options.samples {
            Some(count) => Ok(Scan::Sampled {
                rng: ChaCha8Rng::seed_from_u64(options.seed),
                count,
            }),
            None => Err(Error::CapExceeded {
                what: "exhaustive scan worlds",
                size: world_count,
                cap: options.exhaustive_max_worlds,
            }),
        }
    }

    fn is_sampled(&self) -> bool {
        matches!(self, Scan::Sampled { .. })
    }

    /// Visits `arity`-tuples of event bitmasks until `visit` returns a
    /// verdict failure.
    fn find<const N: usize>(
        &mut self,
        width: usize,
        mut visit: impl FnMut([u32; N]) -> Option<Verdict>,
    ) -> Verdict {
        let events = 1u64 << width;
        match self {
            Scan::Exhaustive => {
                let total = events.pow(N as u32);
                for mut code in 0..total {
                    let mut tuple = [0u32; N];
                    for slot in tuple.iter_mut().rev() {
                        *slot = (code % events) as u32;
                        code /= events;
                    }
                    if let Some(v) = visit(tuple) {
                        return v;
                    }
                }
                Verdict::Pass
            }
            Scan::Sampled { rng, count } => {
                for _ in 0..*count {
                    let mut tuple = [0u32; N];
                    for slot in tuple.iter_mut() {
                        *slot = (rng.next_u64() % events) as u32;
                    }
                    if let Some(v) = visit(tuple) {
                        return v;
                    }
                }
                Verdict::Pass
            }
        }
    }
}

struct Ranked<'a> {
    o: &'a CompleteOrdering,
    width: usize,
    full: u32,
}

impl Ranked<'_> {
    fn r(&self, bits: u32) -> u32 {
        self.o.ranks()[bits as usize]
    }

    fn ev(&self, bits: u32) -> Event {
        Event::from_bits_unchecked(bits, self.width)
    }
}

/// Checks an ordering against the unconditional assumptions.
///
/// `certain_true` and `certain_false` list the events asserted to be
/// certain; only those (besides T and F) may share a rank with T or F.
pub fn check_unconditional(
    o: &CompleteOrdering,
    certain_true: &[Event],
    certain_false: &[Event],
    options: &ScanOptions,
) -> Result<AxiomReport> {
    let space = o.space();
    for e in certain_true.iter().chain(certain_false) {
        space.check(e)?;
    }
    let width = space.world_count();
    let mut scan = Scan::new(width, options)?;
    let k = Ranked {
        o,
        width,
        full: space.top().bits(),
    };
    let top = k.r(k.full);
    let bottom = k.r(0);
    let mut verdicts = BTreeMap::new();
    let mut notes = vec!["A1 holds by construction for a rank table".to_string()];

    verdicts.insert(Axiom::A1, Verdict::Pass);

    verdicts.insert(
        Axiom::A2,
        if top > bottom {
            Verdict::Pass
        } else {
            fail(
                vec![space.top(), space.bottom()],
                format!("r(T)={top} is not above r(F)={bottom}"),
            )
        },
    );

    let sure: BTreeSet<u32> = certain_true.iter().map(Event::bits).collect();
    let impossible: BTreeSet<u32> = certain_false.iter().map(Event::bits).collect();
    let a3 = scan.find::<1>(width, |[a]| {
        let ra = k.r(a);
        let detail = if ra > top {
            format!("r(a)={ra} is above r(T)={top}")
        } else if ra < bottom {
            format!("r(a)={ra} is below r(F)={bottom}")
        } else if (ra == top) != (a == k.full || sure.contains(&a)) {
            if ra == top {
                format!("r(a)=r(T)={top} but a is not asserted certainly true")
            } else {
                format!("a is asserted certainly true but r(a)={ra} < r(T)={top}")
            }
        } else if (ra == bottom) != (a == 0 || impossible.contains(&a)) {
            if ra == bottom {
                format!("r(a)=r(F)={bottom} but a is not asserted certainly false")
            } else {
                format!("a is asserted certainly false but r(a)={ra} > r(F)={bottom}")
            }
        } else {
            return None;
        };
        Some(fail(vec![k.ev(a)], detail))
    });
    verdicts.insert(Axiom::A3, a3);

    let mut skipped = 0usize;
    let a4 = scan.find::<3>(width, |[a, b, c]| {
        let rc = k.r(c);
        if !(top > rc && rc > bottom) {
            return None;
        }
        let not_c = k.full & !c;
        if k.r(not_c) <= bottom {
            skipped += 1;
            return None;
        }
        let given_c = k.r(a & c).cmp(&k.r(b & c));
        let given_not_c = k.r(a & not_c).cmp(&k.r(b & not_c));
        if given_c.is_lt() || given_not_c.is_lt() {
            return None;
        }
        let strict = given_c.is_gt() || given_not_c.is_gt();
        let (ra, rb) = (k.r(a), k.r(b));
        let holds = if strict { ra > rb } else { ra >= rb };
        if holds {
            return None;
        }
        let rel = if strict { ">" } else { ">=" };
        Some(fail(
            vec![k.ev(a), k.ev(b), k.ev(c)],
            format!(
                "a {rel} b given c and given ~c (r(a&c)={}, r(b&c)={}, r(a&~c)={}, r(b&~c)={}) but r(a)={ra}, r(b)={rb}",
                k.r(a & c),
                k.r(b & c),
                k.r(a & not_c),
                k.r(b & not_c)
            ),
        ))
    });
    if skipped > 0 {
        notes.push(format!(
            "A4 skipped {skipped} triples whose ~c ranks with F"
        ));
    }
    verdicts.insert(Axiom::A4, a4);

    let theorem = scan.find::<3>(width, |[a, b, c]| {
        if a & c != 0 || b & c != 0 {
            return None;
        }
        let with_c = k.r(a | c) >= k.r(b | c);
        let without = k.r(a) >= k.r(b);
        if with_c == without {
            return None;
        }
        Some(fail(
            vec![k.ev(a), k.ev(b), k.ev(c)],
            format!(
                "r(a)={} r(b)={} but r(a|c)={} r(b|c)={} with a, b disjoint from c",
                k.r(a),
                k.r(b),
                k.r(a | c),
                k.r(b | c)
            ),
        ))
    });
    verdicts.insert(Axiom::Theorem, theorem);

    let h1 = scan.find::<2>(width, |[a, b]| {
        let (na, nb) = (k.full & !a, k.full & !b);
        if k.r(a) >= k.r(b) && k.r(na) > k.r(nb) {
            Some(fail(
                vec![k.ev(a), k.ev(b)],
                format!(
                    "r(a)={} >= r(b)={} but r(~a)={} > r(~b)={}",
                    k.r(a),
                    k.r(b),
                    k.r(na),
                    k.r(nb)
                ),
            ))
        } else {
            None
        }
    });
    verdicts.insert(Axiom::H1, h1);

    let components = [Axiom::A1, Axiom::A2, Axiom::A3, Axiom::Theorem];
    let qp = match components.iter().find(|a| !verdicts[a].is_pass()) {
        None => Verdict::Pass,
        Some(first) => {
            let inner = verdicts[first].witness().expect("failed verdict");
            Verdict::Fail(Witness {
                events: inner.events.clone(),
                detail: format!("{first} fails: {}", inner.detail),
                judgments: Vec::new(),
            })
        }
    };
    verdicts.insert(Axiom::QualitativeProbability, qp);

    Ok(AxiomReport {
        verdicts,
        sampled: scan.is_sampled(),
        notes,
        coverage: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Link {
    Ge,
    Gt,
}

/// Transitive closure of asserted judgments over the events they mention.
#[derive(Debug, Clone)]
pub struct Closure {
    pub nodes: Vec<Event>,
    links: Vec<Vec<Option<Link>>>,
}

impl Closure {
    pub fn new(po: &PartialOrdering) -> Closure {
        let nodes: Vec<Event> = po
            .judgments()
            .iter()
            .flat_map(|j| [j.lhs, j.rhs])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index = |e: &Event| nodes.binary_search(e).expect("node present");
        let n = nodes.len();
        let mut links = vec![vec![None; n]; n];
        for (i, row) in links.iter_mut().enumerate() {
            row[i] = Some(Link::Ge);
        }
        let mut add = |i: usize, j: usize, l: Link| {
            if links[i][j].is_none_or(|old| old < l) {
                links[i][j] = Some(l);
            }
        };
        for j in po.judgments() {
            let (l, r) = (index(&j.lhs), index(&j.rhs));
            match j.rel {
                Relation::Gt => add(l, r, Link::Gt),
                Relation::Ge => add(l, r, Link::Ge),
                Relation::Eq => {
                    add(l, r, Link::Ge);
                    add(r, l, Link::Ge);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = links[i][k] else { continue };
                for j in 0..n {
                    let Some(kj) = links[k][j] else { continue };
                    let composed = ik.max(kj);
                    if links[i][j].is_none_or(|old| old < composed) {
                        links[i][j] = Some(composed);
                    }
                }
            }
        }
        Closure { nodes, links }
    }

    fn index(&self, e: &Event) -> Option<usize> {
        self.nodes.binary_search(e).ok()
    }

    /// The strongest derived relation of `a` over `b`, if any.
    pub fn relation(&self, a: &Event, b: &Event) -> Option<Relation> {
        if a == b {
            return Some(Relation::Eq);
        }
        let (i, j) = (self.index(a)?, self.index(b)?);
        match (self.links[i][j], self.links[j][i]) {
            (Some(Link::Gt), _) => Some(Relation::Gt),
            (Some(Link::Ge), Some(_)) => Some(Relation::Eq),
            (Some(Link::Ge), None) => Some(Relation::Ge),
            (None, _) => None,
        }
    }

    fn related_pairs(&self) -> usize {
        let n = self.nodes.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.links[i][j].is_some() || self.links[j][i].is_some())
            .count()
    }
}

/// Shortest chain of judgments leading from `from` down to `to`; empty when
/// the two coincide.
fn judgment_path(po: &PartialOrdering, from: Event, to: Event) -> Vec<String> {
    if from == to {
        return Vec::new();
    }
    let mut edges: BTreeMap<Event, Vec<(Event, &str)>> = BTreeMap::new();
    for j in po.judgments() {
        edges.entry(j.lhs).or_default().push((j.rhs, &j.id));
        if j.rel == Relation::Eq {
            edges.entry(j.rhs).or_default().push((j.lhs, &j.id));
        }
    }
    let mut prev: BTreeMap<Event, (Event, &str)> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(e) = queue.pop_front() {
        for &(next, id) in edges.get(&e).into_iter().flatten() {
            if seen.insert(next) {
                prev.insert(next, (e, id));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let Some(&(p, id)) = prev.get(&cur) else {
            return Vec::new();
        };
        path.push(id.to_string());
        cur = p;
    }
    path.reverse();
    path
}

/// Consistency of raw judgments with a complete transitive ordering: the
/// closure may not derive both `a > b` and `b >= a`.
///
/// The witness is the first strict judgment, in list order, that closes a
/// cycle, followed by the judgments leading back.
pub fn check_partial(po: &PartialOrdering) -> AxiomReport {
    let closure = Closure::new(po);
    let mut a1 = Verdict::Pass;
    for j in po.judgments().iter().filter(|j| j.rel == Relation::Gt) {
        let (l, r) = (
            closure.index(&j.lhs).expect("node present"),
            closure.index(&j.rhs).expect("node present"),
        );
        if closure.links[r][l].is_none() {
            continue;
        }
        let mut judgments = vec![j.id.clone()];
        judgments.extend(judgment_path(po, j.rhs, j.lhs));
        let mut events: Vec<Event> = Vec::new();
        for id in &judgments {
            let k = po.get(id).expect("path uses known ids");
            for e in [k.lhs, k.rhs] {
                if !events.contains(&e) {
                    events.push(e);
                }
            }
        }
        a1 = Verdict::Fail(Witness {
            events,
            detail: if j.lhs == j.rhs {
                "judgment asserts a > a".to_string()
            } else {
                "judgments derive both a > b and b >= a".to_string()
            },
            judgments,
        });
        break;
    }
    let total_events = BigInt::from(1u8) << po.space().world_count();
    let pairs = &total_events * (&total_events - 1u8) / 2u8;
    let coverage = if pairs == BigInt::from(0u8) {
        Rational::from_integer(BigInt::from(1u8))
    } else {
        Rational::new(BigInt::from(closure.related_pairs()), pairs)
    };
    AxiomReport {
        verdicts: BTreeMap::from([(Axiom::A1, a1)]),
        sampled: false,
        notes: Vec::new(),
        coverage: Some(coverage),
    }
}

/// `(held-constant argument, varying argument, output, tuple)` samples of a
/// combination function.
type Samples = Vec<(u32, u32, u32, Vec<Event>)>;

/// Checks that samples define a function that strictly increases in each
/// argument while the other is fixed. Held-constant values in `null` are
/// exempt from strictness: a zero factor annihilates the product.
fn functional_verdict(samples: &Samples, null: &BTreeSet<u32>, names: [&str; 3]) -> Verdict {
    let [f, first, second] = names;
    let mut table: BTreeMap<(u32, u32), (u32, &Vec<Event>)> = BTreeMap::new();
    for (u, v, w, tuple) in samples {
        match table.get(&(*u, *v)) {
            Some((w0, t0)) if w0 != w => {
                let mut events = (*t0).clone();
                events.extend(tuple.iter().copied());
                return fail(
                    events,
                    format!(
                        "{f} is not a function: {first}={u}, {second}={v} map to both {w0} and {w}"
                    ),
                );
            }
            Some(_) => {}
            None => {
                table.insert((*u, *v), (*w, tuple));
            }
        }
    }
    // Fix the first argument, vary the second.
    let mut failures: Vec<(Vec<Event>, String)> = Vec::new();
    let by_first: BTreeMap<u32, Vec<(u32, u32, &Vec<Event>)>> =
        table
            .iter()
            .fold(BTreeMap::new(), |mut acc, ((u, v), (w, t))| {
                acc.entry(*u).or_default().push((*v, *w, *t));
                acc
            });
    for (u, row) in &by_first {
        if null.contains(u) {
            continue;
        }
        for pair in row.windows(2) {
            let ((v1, w1, t1), (v2, w2, t2)) = (pair[0], pair[1]);
            if w1 >= w2 {
                let mut events = t1.clone();
                events.extend(t2.iter().copied());
                failures.push((
                    events,
                    format!(
                        "{f} not strictly increasing in {second} with {first}={u} fixed: {second} {v1}->{v2} gives {w1}->{w2}"
                    ),
                ));
            }
        }
    }
    let mut by_second: BTreeMap<u32, Vec<(u32, u32, &Vec<Event>)>> = BTreeMap::new();
    for ((u, v), (w, t)) in &table {
        by_second.entry(*v).or_default().push((*u, *w, *t));
    }
    for (v, row) in &by_second {
        if null.contains(v) {
            continue;
        }
        for pair in row.windows(2) {
            let ((u1, w1, t1), (u2, w2, t2)) = (pair[0], pair[1]);
            if w1 >= w2 {
                let mut events = t1.clone();
                events.extend(t2.iter().copied());
                failures.push((
                    events,
                    format!(
                        "{f} not strictly increasing in {first} with {second}={v} fixed: {first} {u1}->{u2} gives {w1}->{w2}"
                    ),
                ));
            }
        }
    }
    match failures.into_iter().min_by(|a, b| a.0.cmp(&b.0)) {
        None => Verdict::Pass,
        Some((events, detail)) => fail(events, detail),
    }
}

/// Checks a conditional rank table against conditioning coherence, the
/// chain rule and its consequences.
pub fn check_conditional(
    cs: &ConditionalStructure,
    options: &ScanOptions,
) -> Result<ConditionalReport> {
    if cs.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let space = cs.space().clone();
    let width = space.world_count();
    let full = space.top().bits();
    let base = cs.base();
    let ev = |bits: u32| Event::from_bits_unchecked(bits, width);
    let t = |a: u32, c: u32| cs.get(&ev(a), &ev(c));
    let conditioners: Vec<u32> = cs.conditioners().iter().map(Event::bits).collect();
    let mut verdicts = BTreeMap::new();
    let mut notes = Vec::new();
    let mut sampled = false;

    // Within one conditioner the table must order events as their
    // conjunctions with the conditioner are ordered.
    let mut a5 = Verdict::Pass;
    'a5: for a in 0..=full {
        for b in 0..=full {
            for &c in &conditioners {
                let (Some(ta), Some(tb)) = (t(a, c), t(b, c)) else {
                    continue;
                };
                let table_ge = ta >= tb;
                let (ra, rb) = (
                    base.ranks()[(a & c) as usize],
                    base.ranks()[(b & c) as usize],
                );
                if table_ge != (ra >= rb) {
                    a5 = fail(
                        vec![ev(a), ev(b), ev(c)],
                        format!("r(a|c)={ta}, r(b|c)={tb} but r(a&c)={ra}, r(b&c)={rb}"),
                    );
                    break 'a5;
                }
            }
        }
    }
    verdicts.insert(ConditionalAxiom::A5Coherence, a5);

    let mut corollary = Verdict::Pass;
    'cor: for b in 0..=full {
        for &a in &conditioners {
            if let (Some(x), Some(y)) = (t(b, a), t(b & a, a)) {
                if x != y {
                    corollary = fail(
                        vec![ev(b), ev(a)],
                        format!("r(b|a)={x} differs from r(b&a|a)={y}"),
                    );
                    break 'cor;
                }
            }
        }
    }
    verdicts.insert(ConditionalAxiom::Corollary, corollary);

    let mut scan = Scan::new(width, options)?;
    sampled |= scan.is_sampled();
    let top_rank = base.ranks()[full as usize];
    let bottom_rank = base.ranks()[0];
    let a4 = scan.find::<3>(width, |[a, b, c]| {
        let rc = base.ranks()[c as usize];
        if !(top_rank > rc && rc > bottom_rank) {
            return None;
        }
        let nc = full & !c;
        let (Some(ac), Some(bc), Some(anc), Some(bnc)) = (t(a, c), t(b, c), t(a, nc), t(b, nc))
        else {
            return None;
        };
        if ac < bc || anc < bnc {
            return None;
        }
        let strict = ac > bc || anc > bnc;
        let (ra, rb) = (base.ranks()[a as usize], base.ranks()[b as usize]);
        if (strict && ra > rb) || (!strict && ra >= rb) {
            return None;
        }
        Some(fail(
            vec![ev(a), ev(b), ev(c)],
            format!("r(a|c)={ac} r(b|c)={bc} r(a|~c)={anc} r(b|~c)={bnc} but r(a)={ra} r(b)={rb}"),
        ))
    });
    verdicts.insert(ConditionalAxiom::A4Conditional, a4);

    let null: BTreeSet<u32> = conditioners.iter().filter_map(|&c| t(0, c)).collect();

    // Chain rule: x ⊆ y ⊆ z, r(x|z) as a function of r(x|y) and r(y|z).
    let mut chains: Samples = Vec::new();
    let collect_chain = |x: u32, y: u32, z: u32, out: &mut Samples| {
        if x & !y != 0 || y & !z != 0 {
            return;
        }
        if let (Some(u), Some(v), Some(w)) = (t(x, y), t(y, z), t(x, z)) {
            out.push((u, v, w, vec![ev(x), ev(y), ev(z)]));
        }
    };
    let mut chain_scan = Scan::new(width, options)?;
    match &mut chain_scan {
        Scan::Exhaustive => {
            for z in 0..=full {
                let mut y = z;
                loop {
                    let mut x = y;
                    loop {
                        collect_chain(x, y, z, &mut chains);
                        if x == 0 {
                            break;
                        }
                        x = (x - 1) & y;
                    }
                    if y == 0 {
                        break;
                    }
                    y = (y - 1) & z;
                }
            }
            chains.sort_by(|a, b| a.3.cmp(&b.3));
        }
        Scan::Sampled { rng, count } => {
            for _ in 0..*count {
                let z = (rng.next_u64() as u32) & full;
                let y = (rng.next_u64() as u32) & z;
                let x = (rng.next_u64() as u32) & y;
                collect_chain(x, y, z, &mut chains);
            }
        }
    }
    verdicts.insert(
        ConditionalAxiom::A6,
        functional_verdict(&chains, &null, ["r(x|z)", "r(x|y)", "r(y|z)"]),
    );

    // H2: r(a&b|c) as a function of r(a|b&c) and r(b|c).
    let mut triples: Samples = Vec::new();
    let mut h2_scan = Scan::new(width, options)?;
    h2_scan.find::<3>(width, |[a, b, c]| {
        if let (Some(u), Some(v), Some(w)) = (t(a, b & c), t(b, c), t(a & b, c)) {
            triples.push((u, v, w, vec![ev(a), ev(b), ev(c)]));
        }
        None
    });
    verdicts.insert(
        ConditionalAxiom::H2,
        functional_verdict(&triples, &null, ["r(a&b|c)", "r(a|b&c)", "r(b|c)"]),
    );

    if !null.is_empty() {
        notes.push(
            "strictness is not required where the held argument is a null conditional rank"
                .to_string(),
        );
    }
    Ok(ConditionalReport {
        verdicts,
        sampled,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Space;
    use crate::ordering::{induced_conditional, induced_ordering, shared, Distribution};
    use crate::rational::frac;

    fn three() -> crate::algebra::SpaceRef {
        shared(Space::numbered(3).unwrap())
    }

    fn ev(bits: u32) -> Event {
        Event::from_bits(bits, 3).unwrap()
    }

    fn table(ranks: &[u64]) -> CompleteOrdering {
        CompleteOrdering::from_ranks(three(), ranks).unwrap()
    }

    fn p532() -> Distribution {
        Distribution::new(three(), vec![frac(1, 2), frac(3, 10), frac(1, 5)]).unwrap()
    }

    #[test]
    fn induced_ordering_passes_everything() {
        let report = check_unconditional(
            &induced_ordering(&p532()),
            &[],
            &[],
            &ScanOptions::default(),
        )
        .unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(!report.sampled);
    }

    #[test]
    fn a2_failure() {
        let o = CompleteOrdering::from_ranks(shared(Space::numbered(2).unwrap()), &[0, 0, 0, 0])
            .unwrap();
        let report = check_unconditional(&o, &[], &[], &ScanOptions::default()).unwrap();
        assert!(!report.passes(Axiom::A2));
        assert!(!report.passes(Axiom::QualitativeProbability));
    }

    #[test]
    fn theorem_failure_witness() {
        // Strictly monotone in inclusion, w1 > w2 but w1w3 < w2w3.
        // bits:        F  w1 w2 w1w2 w3 w1w3 w2w3 T
        let o = table(&[0, 3, 2, 6, 1, 4, 5, 7]);
        let report = check_unconditional(&o, &[], &[], &ScanOptions::default()).unwrap();
        let w = report.get(Axiom::Theorem).unwrap().witness().unwrap();
        assert_eq!(w.events, vec![ev(0b001), ev(0b010), ev(0b100)]);
        assert!(!report.passes(Axiom::QualitativeProbability));
        assert!(report.passes(Axiom::A2));
        assert!(report.passes(Axiom::A3));
    }

    #[test]
    fn a4_failure() {
        // F:0 w3:1 w1w3:1 w2:2 w1:3 w2w3:4 w1w2:5 T:6
        let o = table(&[0, 3, 2, 5, 1, 1, 4, 6]);
        let report = check_unconditional(&o, &[], &[], &ScanOptions::default()).unwrap();
        let w = report.get(Axiom::A4).unwrap().witness().unwrap();
        // Smallest violating (a, b, c): a={w1,w2}, b=T, c={w2}; the strict
        // antecedent comes from r(w1)=3 > r(w1w3)=1 given ~c.
        assert_eq!(w.events, vec![ev(0b011), ev(0b111), ev(0b010)]);
        // The hand-checked triple is a violation too.
        let (a, b, c) = (ev(0b101), ev(0b010), ev(0b011));
        assert!(o.condition_compare(&a, &b, &c).unwrap().is_gt());
        assert!(o.condition_compare(&a, &b, &!c).unwrap().is_gt());
        assert!(o.compare(&a, &b).unwrap().is_lt());
    }

    #[test]
    fn a3_respects_certainty_sets() {
        let p = Distribution::new(three(), vec![frac(1, 2), frac(1, 2), frac(0, 1)]).unwrap();
        let o = induced_ordering(&p);
        let without = check_unconditional(&o, &[], &[], &ScanOptions::default()).unwrap();
        let w = without.get(Axiom::A3).unwrap().witness().unwrap();
        assert_eq!(w.events, vec![ev(0b011)]);
        let (t, f) = p.certainty_sets();
        let with = check_unconditional(&o, &t, &f, &ScanOptions::default()).unwrap();
        assert!(with.all_pass(), "{with:?}");
    }

    #[test]
    fn cap_and_sampling() {
        let six = shared(Space::numbered(6).unwrap());
        let o = induced_ordering(&Distribution::uniform(six));
        assert!(matches!(
            check_unconditional(&o, &[], &[], &ScanOptions::default()),
            Err(Error::CapExceeded { .. })
        ));
        let opts = ScanOptions {
            samples: Some(2000),
            seed: 7,
            ..ScanOptions::default()
        };
        let report = check_unconditional(&o, &[], &[], &opts).unwrap();
        assert!(report.sampled);
        assert!(report.all_pass());
    }

    #[test]
    fn witnesses_recheck() {
        let o = table(&[0, 3, 2, 5, 1, 1, 4, 6]);
        let report = check_unconditional(&o, &[], &[], &ScanOptions::default()).unwrap();
        let w = report.get(Axiom::A4).unwrap().witness().unwrap();
        let (a, b, c) = (w.events[0], w.events[1], w.events[2]);
        let gc = o.condition_compare(&a, &b, &c).unwrap();
        let gnc = o.condition_compare(&a, &b, &!c).unwrap();
        assert!(gc.is_ge() && gnc.is_ge());
        let strict = gc.is_gt() || gnc.is_gt();
        let ab = o.compare(&a, &b).unwrap();
        assert!(if strict { !ab.is_gt() } else { ab.is_lt() });
    }

    fn po(judgments: &[(u32, Relation, u32)]) -> PartialOrdering {
        let mut po = PartialOrdering::new(three());
        for &(l, r, rr) in judgments {
            po.push(ev(l), r, ev(rr));
        }
        po
    }

    #[test]
    fn partial_three_cycle() {
        let p = po(&[
            (1, Relation::Gt, 2),
            (2, Relation::Gt, 4),
            (4, Relation::Gt, 1),
        ]);
        let report = check_partial(&p);
        let w = report.get(Axiom::A1).unwrap().witness().unwrap();
        let mut ids = w.judgments.clone();
        ids.sort();
        assert_eq!(ids, vec!["j1", "j2", "j3"]);
    }

    #[test]
    fn partial_antisymmetry_and_composition() {
        let p = po(&[(1, Relation::Ge, 2), (2, Relation::Ge, 1)]);
        assert!(check_partial(&p).passes(Axiom::A1));
        assert_eq!(
            Closure::new(&p).relation(&ev(1), &ev(2)),
            Some(Relation::Eq)
        );

        let p = po(&[(1, Relation::Gt, 2), (2, Relation::Eq, 4)]);
        let report = check_partial(&p);
        assert!(report.passes(Axiom::A1));
        assert_eq!(
            Closure::new(&p).relation(&ev(1), &ev(4)),
            Some(Relation::Gt)
        );
        // 3 related pairs out of 28.
        assert_eq!(report.coverage, Some(frac(3, 28)));
    }

    #[test]
    fn partial_self_strict() {
        let p = po(&[(3, Relation::Gt, 3)]);
        let report = check_partial(&p);
        let w = report.get(Axiom::A1).unwrap().witness().unwrap();
        assert_eq!(w.judgments, vec!["j1"]);
    }

    #[test]
    fn induced_conditional_passes() {
        let cs = induced_conditional(&p532()).unwrap();
        let report = check_conditional(&cs, &ScanOptions::default()).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn swapped_pair_breaks_coherence() {
        let cs = induced_conditional(&p532()).unwrap();
        let c = ev(0b110);
        let swapped = cs.with_swapped((ev(0b010), c), (ev(0b100), c)).unwrap();
        let report = check_conditional(&swapped, &ScanOptions::default()).unwrap();
        let w = report.verdicts[&ConditionalAxiom::A5Coherence]
            .witness()
            .unwrap();
        assert_eq!(w.events[2], c);
        assert!(w.events[..2].contains(&ev(0b010)) || w.events[..2].contains(&ev(0b100)));
    }

    /// Conditional possibility under min-based conditioning:
    /// Π(a|c) = top if Π(a∧c) = Π(c), else Π(a∧c).
    fn min_combination_structure() -> ConditionalStructure {
        let space = three();
        let levels = [3u64, 2, 1];
        let poss = |e: Event| e.worlds().map(|w| levels[w]).max().unwrap_or(0);
        let base = CompleteOrdering::from_scores(
            space.clone(),
            &space.events().map(poss).collect::<Vec<_>>(),
        )
        .unwrap();
        let mut entries = Vec::new();
        for c in space.events().filter(|c| !c.is_bottom()) {
            for a in space.events() {
                let pac = poss(a & c);
                let level = if pac == poss(c) { 3 } else { pac };
                entries.push((a, c, level));
            }
        }
        ConditionalStructure::from_entries(base, entries).unwrap()
    }

    #[test]
    fn min_combination_fails_a6_strictness() {
        let cs = min_combination_structure();
        // Sanity: along every chain the table really is the minimum.
        for z in cs.space().events() {
            for y in cs.space().events().filter(|y| y.implies(&z).unwrap()) {
                for x in cs.space().events().filter(|x| x.implies(&y).unwrap()) {
                    if let (Some(u), Some(v), Some(w)) =
                        (cs.get(&x, &y), cs.get(&y, &z), cs.get(&x, &z))
                    {
                        assert_eq!(w, u.min(v));
                    }
                }
            }
        }
        let report = check_conditional(&cs, &ScanOptions::default()).unwrap();
        let w = report.verdicts[&ConditionalAxiom::A6].witness().unwrap();
        assert!(w.detail.contains("not strictly increasing"), "{}", w.detail);
        assert!(report.passes(ConditionalAxiom::A5Coherence));
    }
}
