//! The set of distributions compatible with a partial ordering.
//!
//! A credal set is stored as its defining judgments. Consistency uses strict
//! semantics: `a > b` demands `p(a) > p(b)`. Geometric queries (unanimity,
//! bounds) optimize over the closed relaxation, where strict judgments
//! become weak, and report whether an optimum is actually reached inside
//! the strict set.

use num_traits::{Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::algebra::{Event, SpaceRef};
use crate::error::{Error, Result};
use crate::ordering::{Distribution, PartialOrdering, Relation};
use crate::rational::{frac, int, Rational};
use crate::ratlp::{solve, Cmp, Constraint, LinearProgram, LpOutcome, Sense};
use crate::realize::realize_partial;

/// Implication pairs are scanned exhaustively up to this many worlds.
pub const PRADE_EXHAUSTIVE_WORLDS: usize = 4;
/// Largest space `prade_check` accepts; between the two it samples.
pub const PRADE_MAX_WORLDS: usize = 10;
pub const PRADE_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Rational,
    pub upper: Rational,
    pub attained_lower: bool,
    pub attained_upper: bool,
}

impl Bounds {
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entailment {
    Always,
    /// A member of the credal set with `p(a) < p(b)`.
    NotAlways(Distribution),
}

impl Entailment {
    pub fn is_always(&self) -> bool {
        matches!(self, Entailment::Always)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PradeCriterion {
    /// `p(F) = 0`
    Bottom,
    /// `p(T) = 1`
    Top,
    /// `a implies b` gives `p(a) <= p(b)`
    Monotone,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PradeFailure {
    pub criterion: PradeCriterion,
    pub events: Vec<Event>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PradeVerdict {
    Pass { pairs_checked: usize, sampled: bool },
    Fail(PradeFailure),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scale {
    /// Variables are masses summing to one.
    Normalized,
    /// Charnes–Cooper: variables `y = t·p` followed by `t >= 0`.
    Homogeneous,
}

enum Extremum {
    Finite(Rational, Vec<Rational>),
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct CredalSet {
    judgments: PartialOrdering,
    /// Max-margin member of the strict set, absent when empty.
    interior: Option<Distribution>,
    /// Test hook: omit `Σp = 1` so `prade_check` has something to catch.
    drop_normalization: bool,
}

impl CredalSet {
    pub fn new(judgments: PartialOrdering) -> Result<Self> {
        let interior = realize_partial(&judgments)?
            .realization()
            .map(|r| r.distribution.clone());
        Ok(CredalSet {
            judgments,
            interior,
            drop_normalization: false,
        })
    }

    pub fn space(&self) -> &SpaceRef {
        self.judgments.space()
    }

    pub fn judgments(&self) -> &PartialOrdering {
        &self.judgments
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_none()
    }

    /// A distribution satisfying every judgment as asserted.
    pub fn interior_point(&self) -> Option<&Distribution> {
        self.interior.as_ref()
    }

    fn require_nonempty(&self) -> Result<&Distribution> {
        self.interior.as_ref().ok_or(Error::EmptyCredalSet)
    }

    fn check(&self, event: &Event) -> Result<()> {
        self.space().check(event)
    }

    fn width(&self) -> usize {
        self.space().world_count()
    }

    fn indicator(&self, event: &Event) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); self.width()];
        for w in event.worlds() {
            row[w] = int(1);
        }
        row
    }

    fn has_strict(&self) -> bool {
        self.judgments
            .judgments()
            .iter()
            .any(|j| j.rel == Relation::Gt)
    }

    /// Relaxation over the base variables (masses, plus `t` when
    /// homogeneous), optionally followed by a margin column that strict
    /// judgments must clear. `extra` rows are written over the base
    /// variables.
    fn program(&self, scale: Scale, margin: bool, extra: &[Constraint]) -> LinearProgram {
        let n = self.width();
        let base = n + usize::from(scale == Scale::Homogeneous);
        let total = base + usize::from(margin);
        let pad = |mut row: Vec<Rational>| {
            row.resize(total, Rational::zero());
            row
        };
        let mut lp = LinearProgram::new(total, Sense::Maximize);
        for w in 0..base {
            let mut row = vec![Rational::zero(); total];
            row[w] = int(1);
            lp.add(row, Cmp::Ge, Rational::zero());
        }
        match scale {
            Scale::Normalized if !self.drop_normalization => {
                lp.add(pad(vec![int(1); n]), Cmp::Eq, int(1));
            }
            Scale::Normalized => {}
            Scale::Homogeneous => {
                let mut row = vec![int(1); n];
                row.push(int(-1));
                lp.add(pad(row), Cmp::Eq, Rational::zero());
            }
        }
        for j in self.judgments.judgments() {
            let mut row = self.indicator(&j.lhs);
            for w in j.rhs.worlds() {
                row[w] -= int(1);
            }
            let mut row = pad(row);
            match j.rel {
                Relation::Gt if margin => {
                    row[base] = int(-1);
                    lp.add(row, Cmp::Ge, Rational::zero());
                }
                Relation::Gt | Relation::Ge => {
                    lp.add(row, Cmp::Ge, Rational::zero());
                }
                Relation::Eq => {
                    lp.add(row, Cmp::Eq, Rational::zero());
                }
            }
        }
        for c in extra {
            lp.add(pad(c.coefficients.clone()), c.rel, c.rhs.clone());
        }
        if margin {
            let mut cap = vec![Rational::zero(); total];
            cap[base] = int(1);
            lp.add(cap, Cmp::Le, int(1));
        }
        lp
    }

    fn optimize(
        &self,
        scale: Scale,
        extra: &[Constraint],
        objective: &[Rational],
        sense: Sense,
    ) -> Result<Option<Extremum>> {
        let mut lp = self.program(scale, false, extra);
        lp.sense = sense;
        lp.objective = objective.to_vec();
        lp.objective.resize(lp.variable_count, Rational::zero());
        Ok(match solve(&lp)? {
            LpOutcome::Optimal { value, point } => Some(Extremum::Finite(value, point)),
            LpOutcome::Unbounded { .. } => Some(Extremum::Unbounded),
            LpOutcome::Infeasible { .. } => None,
        })
    }

    fn finite(
        &self,
        scale: Scale,
        extra: &[Constraint],
        objective: &[Rational],
        sense: Sense,
    ) -> Result<(Rational, Vec<Rational>)> {
        match self.optimize(scale, extra, objective, sense)? {
            Some(Extremum::Finite(v, p)) => Ok((v, p)),
            Some(Extremum::Unbounded) => Err(Error::Solver("relaxation is unbounded".into())),
            None => Err(Error::Solver(
                "relaxation infeasible although the strict set is not".into(),
            )),
        }
    }

    /// Whether some point of the strict set reaches `objective = value`:
    /// fix the objective and maximize the margin on strict judgments.
    fn attained(
        &self,
        scale: Scale,
        extra: &[Constraint],
        objective: &[Rational],
        value: &Rational,
    ) -> Result<bool> {
        if !self.has_strict() {
            return Ok(true);
        }
        let mut rows = extra.to_vec();
        rows.push(Constraint::new(objective.to_vec(), Cmp::Eq, value.clone()));
        let mut lp = self.program(scale, true, &rows);
        let eps = lp.variable_count - 1;
        lp.objective[eps] = int(1);
        Ok(match solve(&lp)? {
            LpOutcome::Optimal { value, .. } => value.is_positive(),
            _ => false,
        })
    }

    fn interval(
        &self,
        scale: Scale,
        extra: &[Constraint],
        objective: &[Rational],
    ) -> Result<Bounds> {
        let (lower, _) = self.finite(scale, extra, objective, Sense::Minimize)?;
        let (upper, _) = self.finite(scale, extra, objective, Sense::Maximize)?;
        Ok(Bounds {
            attained_lower: self.attained(scale, extra, objective, &lower)?,
            attained_upper: self.attained(scale, extra, objective, &upper)?,
            lower,
            upper,
        })
    }

    /// Whether `p(a) >= p(b)` throughout the set.
    pub fn entails(&self, a: &Event, b: &Event) -> Result<Entailment> {
        self.check(a)?;
        self.check(b)?;
        let interior = self.require_nonempty()?;
        let mut objective = self.indicator(a);
        for w in b.worlds() {
            objective[w] -= int(1);
        }
        let (value, point) = self.finite(Scale::Normalized, &[], &objective, Sense::Minimize)?;
        if !value.is_negative() {
            return Ok(Entailment::Always);
        }
        let vertex = Distribution::new(self.space().clone(), point[..self.width()].to_vec())?;
        if vertex.satisfies(&self.judgments) {
            return Ok(Entailment::NotAlways(vertex));
        }
        // The minimizer sits on a face the strict judgments exclude; step
        // toward the interior while keeping p(a) < p(b).
        let at_interior = interior.prob(a) - interior.prob(b);
        let t = if at_interior.is_negative() || at_interior.is_zero() {
            frac(1, 2)
        } else {
            let t = -&value / (int(2) * (&at_interior - &value));
            t.min(frac(1, 2))
        };
        let masses = vertex
            .masses()
            .iter()
            .zip(interior.masses())
            .map(|(v, s)| (int(1) - &t) * v + &t * s)
            .collect();
        let witness = Distribution::new(self.space().clone(), masses)?;
        debug_assert!(witness.satisfies(&self.judgments));
        debug_assert!(witness.prob(a) < witness.prob(b));
        Ok(Entailment::NotAlways(witness))
    }

    /// Range of `p(a)` over the set.
    pub fn bounds(&self, a: &Event) -> Result<Bounds> {
        self.check(a)?;
        self.require_nonempty()?;
        self.interval(Scale::Normalized, &[], &self.indicator(a))
    }

    /// Range of `p(a | c)` over members with `p(c) > 0`.
    pub fn cond_bounds(&self, a: &Event, c: &Event) -> Result<Bounds> {
        self.check(a)?;
        self.check(c)?;
        self.require_nonempty()?;
        let (max_c, _) =
            self.finite(Scale::Normalized, &[], &self.indicator(c), Sense::Maximize)?;
        if max_c.is_zero() {
            return Err(Error::ZeroProbabilityConditioner);
        }
        let joint = a.intersection(c)?;
        let normalize = [Constraint::new(self.indicator(c), Cmp::Eq, int(1))];
        self.interval(Scale::Homogeneous, &normalize, &self.indicator(&joint))
    }

    /// Confirms the probability axioms hold across the set: `p(F) = 0`,
    /// `p(T) = 1`, and monotonicity along implication. A failure indicates a
    /// defect in the engine, not in the judgments.
    pub fn prade_check(&self) -> Result<PradeVerdict> {
        self.require_nonempty()?;
        let n = self.width();
        if n > PRADE_MAX_WORLDS {
            return Err(Error::CapExceeded {
                what: "worlds for the implication scan",
                size: n,
                cap: PRADE_MAX_WORLDS,
            });
        }
        let space = self.space().clone();
        let fail = |criterion, events: Vec<Event>, detail: String| {
            Ok(PradeVerdict::Fail(PradeFailure {
                criterion,
                events,
                detail,
            }))
        };
        for (criterion, event, want) in [
            (PradeCriterion::Bottom, space.bottom(), Rational::zero()),
            (PradeCriterion::Top, space.top(), int(1)),
        ] {
            let row = self.indicator(&event);
            for sense in [Sense::Minimize, Sense::Maximize] {
                match self.optimize(Scale::Normalized, &[], &row, sense)? {
                    Some(Extremum::Finite(v, _)) if v == want => {}
                    Some(Extremum::Finite(v, _)) => {
                        return fail(criterion, vec![event], format!("{sense:?} is {v}"))
                    }
                    Some(Extremum::Unbounded) => {
                        return fail(criterion, vec![event], format!("{sense:?} is unbounded"))
                    }
                    None => return fail(criterion, vec![event], "relaxation infeasible".into()),
                }
            }
        }

        let sampled = n > PRADE_EXHAUSTIVE_WORLDS;
        let pairs: Vec<(Event, Event)> = if sampled {
            // b is drawn first and a as a random subset of it.
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let full = space.top().bits() as u64 + 1;
            (0..PRADE_SAMPLES)
                .map(|_| {
                    let b = (rng.next_u64() % full) as u32;
                    let a = b & (rng.next_u64() as u32);
                    (space.event(a).unwrap(), space.event(b).unwrap())
                })
                .collect()
        } else {
            let events: Vec<Event> = space.events().collect();
            events
                .iter()
                .flat_map(|a| events.iter().map(move |b| (*a, *b)))
                .filter(|(a, b)| a.implies(b).unwrap_or(false))
                .collect()
        };
        for (a, b) in &pairs {
            if let Entailment::NotAlways(w) = self.entails(b, a)? {
                return fail(
                    PradeCriterion::Monotone,
                    vec![*a, *b],
                    format!("p(a) = {} exceeds p(b) = {}", w.prob(a), w.prob(b)),
                );
            }
        }
        Ok(PradeVerdict::Pass {
            pairs_checked: pairs.len(),
            sampled,
        })
    }
}
