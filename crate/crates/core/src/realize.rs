//! Agreeing distributions for orderings.
//!
//! A distribution agrees with an ordering when event probabilities compare
//! exactly as ranks do. Realization solves a linear program over one mass
//! per world plus a shared margin `ε` that every strict comparison must
//! clear, and maximizes `ε`. Orderings with no positive margin are
//! reported with a Farkas certificate naming the comparisons that clash.

use num_traits::{Signed, Zero};

use crate::algebra::{Event, SpaceRef};
use crate::error::{Error, Result};
use crate::ordering::{
    induced_ordering, CompleteOrdering, Distribution, PartialOrdering, Relation,
};
use crate::rational::{int, Rational};
use crate::ratlp::{solve, Cmp, LinearProgram, LpOutcome, Sense};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub distribution: Distribution,
    /// Largest common gap by which strict comparisons can hold; `None` when
    /// no strict comparison was asserted.
    pub margin: Option<Rational>,
}

/// One comparison cited by an infeasibility certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    /// Judgment id for partial orderings.
    pub id: Option<String>,
    pub lhs: Event,
    pub rel: Relation,
    pub rhs: Event,
    pub multiplier: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonRealizable {
    /// Comparisons with nonzero Farkas multiplier; together with the
    /// probability axioms they admit no strictly agreeing distribution.
    pub conflicts: Vec<Conflict>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Realizability {
    Realizable(Realization),
    NonRealizable(NonRealizable),
}

impl Realizability {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Realizability::Realizable(_))
    }

    pub fn realization(&self) -> Option<&Realization> {
        match self {
            Realizability::Realizable(r) => Some(r),
            Realizability::NonRealizable(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&NonRealizable> {
        match self {
            Realizability::Realizable(_) => None,
            Realizability::NonRealizable(n) => Some(n),
        }
    }
}

impl NonRealizable {
    /// The cited comparisons as a standalone judgment list.
    pub fn as_partial(&self, space: SpaceRef) -> PartialOrdering {
        let mut po = PartialOrdering::new(space);
        for c in &self.conflicts {
            match &c.id {
                Some(id) => po
                    .insert(id.clone(), c.lhs, c.rel, c.rhs)
                    .expect("cited judgments are distinct and in space"),
                None => {
                    po.push(c.lhs, c.rel, c.rhs);
                }
            }
        }
        po
    }

    pub fn ids(&self) -> Vec<String> {
        self.conflicts.iter().filter_map(|c| c.id.clone()).collect()
    }
}

/// `p(lhs) - p(rhs)` as coefficients over `width` masses plus `extra`
/// trailing zero columns.
fn difference_row(lhs: &Event, rhs: &Event, width: usize, extra: usize) -> Vec<Rational> {
    let mut row = vec![Rational::zero(); width + extra];
    for w in lhs.worlds() {
        row[w] += int(1);
    }
    for w in rhs.worlds() {
        row[w] -= int(1);
    }
    row
}

struct Comparison {
    id: Option<String>,
    lhs: Event,
    rel: Relation,
    rhs: Event,
}

fn adjacency_comparisons(o: &CompleteOrdering) -> Vec<Comparison> {
    o.to_partial()
        .judgments()
        .iter()
        .map(|j| Comparison {
            id: None,
            lhs: j.lhs,
            rel: j.rel,
            rhs: j.rhs,
        })
        .collect()
}

fn judgment_comparisons(po: &PartialOrdering) -> Vec<Comparison> {
    po.judgments()
        .iter()
        .map(|j| Comparison {
            id: Some(j.id.clone()),
            lhs: j.lhs,
            rel: j.rel,
            rhs: j.rhs,
        })
        .collect()
}

/// Masses `0..n`, then `ε` at index `n` when `with_margin`.
fn margin_program(n: usize, comparisons: &[Comparison], with_margin: bool) -> LinearProgram {
    let extra = usize::from(with_margin);
    let mut lp = LinearProgram::new(n + extra, Sense::Maximize);
    for w in 0..n {
        let mut row = vec![Rational::zero(); n + extra];
        row[w] = int(1);
        lp.add(row, Cmp::Ge, Rational::zero());
    }
    let mut total = vec![int(1); n];
    total.resize(n + extra, Rational::zero());
    lp.add(total, Cmp::Eq, int(1));
    for c in comparisons {
        let mut row = difference_row(&c.lhs, &c.rhs, n, extra);
        let rel = match c.rel {
            Relation::Gt if with_margin => {
                row[n] = int(-1);
                Cmp::Ge
            }
            Relation::Gt | Relation::Ge => Cmp::Ge,
            Relation::Eq => Cmp::Eq,
        };
        lp.add(row, rel, Rational::zero());
    }
    if with_margin {
        lp.objective[n] = int(1);
    }
    lp
}

/// The realization program for a complete ordering: masses are
/// nonnegative and sum to one, events in one rank class have equal
/// probability, and representatives of adjacent classes differ by at least
/// `ε`, which is maximized. Variable `n` (after the world masses) is `ε`.
pub fn build_program(o: &CompleteOrdering) -> LinearProgram {
    margin_program(o.space().world_count(), &adjacency_comparisons(o), true)
}

/// Homogeneous form: `q >= 0`, `Σq >= 1`, strict rows `>= 1`, weak rows
/// `>= 0`, equalities `= 0`. Feasible exactly when the comparisons hold
/// strictly for some distribution, and scale free, so any certificate
/// subset is itself infeasible.
fn strict_certificate(n: usize, comparisons: &[Comparison]) -> Result<Option<NonRealizable>> {
    let mut lp = LinearProgram::new(n, Sense::Maximize);
    for w in 0..n {
        let mut row = vec![Rational::zero(); n];
        row[w] = int(1);
        lp.add(row, Cmp::Ge, Rational::zero());
    }
    lp.add(vec![int(1); n], Cmp::Ge, int(1));
    let offset = lp.constraints.len();
    for c in comparisons {
        let row = difference_row(&c.lhs, &c.rhs, n, 0);
        match c.rel {
            Relation::Gt => lp.add(row, Cmp::Ge, int(1)),
            Relation::Ge => lp.add(row, Cmp::Ge, Rational::zero()),
            Relation::Eq => lp.add(row, Cmp::Eq, Rational::zero()),
        };
    }
    match solve(&lp)? {
        LpOutcome::Infeasible { certificate } => {
            debug_assert!(lp.verify_infeasibility(&certificate));
            let conflicts = comparisons
                .iter()
                .zip(&certificate[offset..])
                .filter(|(_, m)| !m.is_zero())
                .map(|(c, m)| Conflict {
                    id: c.id.clone(),
                    lhs: c.lhs,
                    rel: c.rel,
                    rhs: c.rhs,
                    multiplier: m.clone(),
                })
                .collect();
            Ok(Some(NonRealizable { conflicts }))
        }
        _ => Ok(None),
    }
}

fn distribution_from(space: &SpaceRef, point: &[Rational]) -> Result<Distribution> {
    Distribution::new(space.clone(), point[..space.world_count()].to_vec())
}

fn realize(space: &SpaceRef, comparisons: &[Comparison]) -> Result<Realizability> {
    let n = space.world_count();
    let strict = comparisons.iter().any(|c| c.rel == Relation::Gt);
    let lp = margin_program(n, comparisons, strict);
    let found = match solve(&lp)? {
        LpOutcome::Optimal { point, .. } => {
            let margin = strict.then(|| point[n].clone());
            if margin.as_ref().is_none_or(|m| m.is_positive()) {
                Some(Realization {
                    distribution: distribution_from(space, &point)?,
                    margin,
                })
            } else {
                None
            }
        }
        LpOutcome::Infeasible { .. } => None,
        LpOutcome::Unbounded { .. } => {
            return Err(Error::Solver("margin program cannot be unbounded".into()))
        }
    };
    if let Some(r) = found {
        return Ok(Realizability::Realizable(r));
    }
    match strict_certificate(n, comparisons)? {
        Some(cert) => Ok(Realizability::NonRealizable(cert)),
        None => Err(Error::Solver(
            "margin program and certificate program disagree".into(),
        )),
    }
}

/// Finds the agreeing distribution with the largest margin, or a
/// certificate that none exists.
pub fn realize_complete(o: &CompleteOrdering) -> Result<Realizability> {
    let outcome = realize(o.space(), &adjacency_comparisons(o))?;
    if let Realizability::Realizable(r) = &outcome {
        if !agrees(&r.distribution, o)? {
            return Err(Error::Solver(
                "realization does not reproduce the ordering".into(),
            ));
        }
    }
    Ok(outcome)
}

/// Realizes only the asserted judgments: strict ones by at least the
/// maximized margin, weak ones and equalities as stated. With no judgments
/// the uniform distribution is returned.
pub fn realize_partial(po: &PartialOrdering) -> Result<Realizability> {
    if po.is_empty() {
        return Ok(Realizability::Realizable(Realization {
            distribution: Distribution::uniform(po.space().clone()),
            margin: None,
        }));
    }
    let outcome = realize(po.space(), &judgment_comparisons(po))?;
    if let Realizability::Realizable(r) = &outcome {
        if !r.distribution.satisfies(po) {
            return Err(Error::Solver(
                "realization violates an asserted judgment".into(),
            ));
        }
    }
    Ok(outcome)
}

/// Whether `p` orders every pair of events exactly as `o` does.
pub fn agrees(p: &Distribution, o: &CompleteOrdering) -> Result<bool> {
    if p.space() != o.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(induced_ordering(p).ranks() == o.ranks())
}

/// Whether every pair of events compares by `p` as by `o`, checked pair by
/// pair without building the induced ordering.
pub fn agrees_pairwise(p: &Distribution, o: &CompleteOrdering) -> Result<bool> {
    if p.space() != o.space() {
        return Err(Error::SpaceMismatch);
    }
    let probs = p.event_probs();
    let ranks = o.ranks();
    for a in 0..probs.len() {
        for b in 0..probs.len() {
            if (ranks[a] >= ranks[b]) != (probs[a] >= probs[b]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Margin of the canonical realization, for callers that only need the
/// number.
pub fn margin_of(o: &CompleteOrdering) -> Result<Option<Rational>> {
    Ok(realize_complete(o)?
        .realization()
        .and_then(|r| r.margin.clone()))
}
