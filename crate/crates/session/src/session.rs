//! One elicitation session: a journal and the state it derives.

use qualprob::axioms::check_partial;
use qualprob::{
    parse_problem, realize_partial, CredalSet, Entailment, Event, PartialOrdering, Realizability,
    Relation, SpaceRef,
};

use crate::error::SessionError;
use crate::journal::Record;
use crate::view::{
    masses, rational, BoundsView, EntailsView, Flag, JudgmentView, RealizationView, ReportView,
    StatusView,
};

pub const DEFAULT_MAX_WORLDS: usize = 10;

/// Parses a one-line space declaration such as `worlds: a b c`.
pub fn parse_space(declaration: &str, max_worlds: usize) -> Result<SpaceRef, SessionError> {
    if declaration.contains('\n') {
        return Err(SessionError::InvalidSpace(
            "declaration must be a single line".into(),
        ));
    }
    let problem =
        parse_problem(declaration).map_err(|e| SessionError::InvalidSpace(e.error.to_string()))?;
    let n = problem.space.world_count();
    if n > max_worlds {
        return Err(SessionError::CapExceeded {
            what: "session worlds",
            size: n,
            cap: max_worlds,
        });
    }
    Ok(problem.space)
}

fn parse_event(space: &SpaceRef, field: &'static str, text: &str) -> Result<Event, SessionError> {
    space
        .parse_event(text)
        .map_err(|source| SessionError::Parse { field, source })
}

/// `>`, `>=`, `=`, and the mirrored `<`, `<=` (which swap the sides).
pub fn parse_relation(text: &str) -> Result<(Relation, bool), SessionError> {
    Relation::parse(text.trim()).ok_or_else(|| SessionError::InvalidRelation(text.to_string()))
}

/// Current consistency verdict; recomputed after every mutation.
#[derive(Debug, Clone)]
struct Status {
    consistent: bool,
    margin: Option<String>,
    conflict: Vec<String>,
}

/// Shrinks the certificate's judgments to an irreducible inconsistent
/// subset: each member is dropped in turn if the rest stays inconsistent.
fn minimal_conflict(active: &PartialOrdering, support: Vec<String>) -> Vec<String> {
    let mut keep: Vec<String> = active
        .judgments()
        .iter()
        .map(|j| j.id.clone())
        .filter(|id| support.contains(id))
        .collect();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        let inconsistent = !trial.is_empty()
            && realize_partial(&active.restrict(&trial))
                .map(|r| !r.is_realizable())
                .unwrap_or(false);
        if inconsistent {
            keep = trial;
        } else {
            i += 1;
        }
    }
    keep
}

fn evaluate(active: &PartialOrdering) -> Result<Status, SessionError> {
    Ok(
        match realize_partial(active).map_err(SessionError::Query)? {
            Realizability::Realizable(r) => Status {
                consistent: true,
                margin: r.margin.as_ref().map(rational),
                conflict: Vec::new(),
            },
            Realizability::NonRealizable(cert) => Status {
                consistent: false,
                margin: None,
                conflict: minimal_conflict(active, cert.ids()),
            },
        },
    )
}

fn flags(active: &PartialOrdering) -> Vec<Flag> {
    let space = active.space();
    let (bottom, top) = (space.bottom(), space.top());
    let mut out = Vec::new();
    for j in active.judgments() {
        let mut flag = |axiom, message| {
            out.push(Flag {
                judgment: j.id.clone(),
                axiom,
                message,
            })
        };
        let pair = |a: Event, b: Event| (j.lhs == a && j.rhs == b) || (j.lhs == b && j.rhs == a);
        if (j.rel != Relation::Gt && pair(bottom, top)) || (j.lhs == bottom && j.rhs == top) {
            flag("A2", "T must rank strictly above F");
        } else if j.rel == Relation::Gt && j.lhs == bottom {
            flag("A3", "no event ranks strictly below F");
        } else if j.rel == Relation::Gt && j.rhs == top {
            flag("A3", "no event ranks strictly above T");
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Session {
    space: SpaceRef,
    journal: Vec<Record>,
    active: PartialOrdering,
    next_id: u64,
    status: Status,
}

impl Session {
    /// The opening record for a new session.
    pub fn create_record(
        declaration: &str,
        ts: u64,
        max_worlds: usize,
    ) -> Result<Record, SessionError> {
        let space = parse_space(declaration, max_worlds)?;
        Ok(Record::Space {
            ts,
            declaration: space.declaration(),
        })
    }

    pub fn new(first: Record, max_worlds: usize) -> Result<Session, SessionError> {
        let Record::Space { declaration, .. } = &first else {
            return Err(SessionError::Journal {
                line: 1,
                message: "journal must start with a space record".into(),
            });
        };
        let space = parse_space(declaration, max_worlds)?;
        let active = PartialOrdering::new(space.clone());
        Ok(Session {
            space,
            journal: vec![first],
            status: evaluate(&active)?,
            active,
            next_id: 1,
        })
    }

    /// Rebuilds a session from its journal.
    pub fn replay(records: &[Record], max_worlds: usize) -> Result<Session, SessionError> {
        let (first, rest) = records.split_first().ok_or(SessionError::Journal {
            line: 1,
            message: "empty journal".into(),
        })?;
        let mut session = Session::new(first.clone(), max_worlds)?;
        for (i, r) in rest.iter().enumerate() {
            session
                .apply(r.clone())
                .map_err(|e| SessionError::Journal {
                    line: i + 2,
                    message: e.to_string(),
                })?;
        }
        Ok(session)
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn journal(&self) -> &[Record] {
        &self.journal
    }

    pub fn revision(&self) -> usize {
        self.journal.len()
    }

    pub fn active(&self) -> &PartialOrdering {
        &self.active
    }

    pub fn is_consistent(&self) -> bool {
        self.status.consistent
    }

    /// Validates an assertion and returns the record that would commit it.
    pub fn prepare_assert(
        &self,
        ts: u64,
        lhs: &str,
        rel: &str,
        rhs: &str,
    ) -> Result<Record, SessionError> {
        let (rel, swap) = parse_relation(rel)?;
        let mut a = parse_event(&self.space, "lhs", lhs)?;
        let mut b = parse_event(&self.space, "rhs", rhs)?;
        if swap {
            std::mem::swap(&mut a, &mut b);
        }
        Ok(Record::Assert {
            ts,
            jid: format!("j{}", self.next_id),
            lhs: self.space.describe(&a),
            rel,
            rhs: self.space.describe(&b),
        })
    }

    pub fn prepare_retract(&self, ts: u64, jid: &str) -> Result<Record, SessionError> {
        if self.active.get(jid).is_none() {
            return Err(SessionError::UnknownJudgment(jid.to_string()));
        }
        Ok(Record::Retract {
            ts,
            jid: jid.to_string(),
        })
    }

    /// Commits a record and recomputes the verdict.
    pub fn apply(&mut self, record: Record) -> Result<StatusView, SessionError> {
        let mut asserted = None;
        match &record {
            Record::Space { .. } => {
                return Err(SessionError::Journal {
                    line: self.journal.len() + 1,
                    message: "space record after the first line".into(),
                })
            }
            Record::Assert {
                jid, lhs, rel, rhs, ..
            } => {
                let a = parse_event(&self.space, "lhs", lhs)?;
                let b = parse_event(&self.space, "rhs", rhs)?;
                self.active
                    .insert(jid.clone(), a, *rel, b)
                    .map_err(SessionError::Query)?;
                if let Some(n) = jid.strip_prefix('j').and_then(|n| n.parse::<u64>().ok()) {
                    self.next_id = self.next_id.max(n + 1);
                }
                asserted = Some(jid.clone());
            }
            Record::Retract { jid, .. } => {
                self.active
                    .remove(jid)
                    .ok_or_else(|| SessionError::UnknownJudgment(jid.clone()))?;
            }
        }
        self.journal.push(record);
        self.status = evaluate(&self.active)?;
        let mut view = self.status_view();
        view.judgment = asserted
            .map(|id| JudgmentView::new(&self.space, self.active.get(&id).expect("just inserted")));
        Ok(view)
    }

    pub fn status_view(&self) -> StatusView {
        StatusView {
            revision: self.revision(),
            consistent: self.status.consistent,
            margin: self.status.margin.clone(),
            conflict: self.status.conflict.clone(),
            flags: flags(&self.active),
            judgments: self
                .active
                .judgments()
                .iter()
                .map(|j| JudgmentView::new(&self.space, j))
                .collect(),
            judgment: None,
        }
    }

    /// An immutable copy for answering queries outside the session lock.
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            revision: self.revision(),
            space: self.space.clone(),
            active: self.active.clone(),
            consistent: self.status.consistent,
            status: self.status_view(),
        }
    }
}

/// Session state at one revision. All queries are pure functions of it.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub revision: usize,
    pub space: SpaceRef,
    pub active: PartialOrdering,
    pub consistent: bool,
    status: StatusView,
}

impl Snapshot {
    pub fn status(&self) -> StatusView {
        self.status.clone()
    }

    fn credal(&self) -> Result<CredalSet, SessionError> {
        if !self.consistent {
            return Err(SessionError::InconsistentSession);
        }
        CredalSet::new(self.active.clone()).map_err(SessionError::Query)
    }

    pub fn entails(&self, lhs: &str, rhs: &str) -> Result<EntailsView, SessionError> {
        let a = parse_event(&self.space, "lhs", lhs)?;
        let b = parse_event(&self.space, "rhs", rhs)?;
        let outcome = self
            .credal()?
            .entails(&a, &b)
            .map_err(SessionError::Query)?;
        Ok(EntailsView {
            revision: self.revision,
            lhs: self.space.describe(&a),
            rhs: self.space.describe(&b),
            always: outcome.is_always(),
            witness: match outcome {
                Entailment::Always => None,
                Entailment::NotAlways(w) => Some(masses(&self.space, &w)),
            },
        })
    }

    pub fn bounds(&self, event: &str, given: Option<&str>) -> Result<BoundsView, SessionError> {
        let a = parse_event(&self.space, "event", event)?;
        let c = given
            .map(|g| parse_event(&self.space, "given", g))
            .transpose()?;
        let cs = self.credal()?;
        let b = match &c {
            None => cs.bounds(&a),
            Some(c) => cs.cond_bounds(&a, c),
        }
        .map_err(SessionError::Query)?;
        Ok(BoundsView::new(
            self.revision,
            self.space.describe(&a),
            c.map(|c| self.space.describe(&c)),
            &b,
        ))
    }

    pub fn realization(&self) -> Result<RealizationView, SessionError> {
        if !self.consistent {
            return Err(SessionError::InconsistentSession);
        }
        let out = realize_partial(&self.active).map_err(SessionError::Query)?;
        let r = out.realization().ok_or(SessionError::InconsistentSession)?;
        if !r.distribution.satisfies(&self.active) {
            return Err(SessionError::Query(qualprob::Error::Solver(
                "realization violates an active judgment".into(),
            )));
        }
        Ok(RealizationView {
            revision: self.revision,
            distribution: masses(&self.space, &r.distribution),
            margin: r.margin.as_ref().map(rational),
        })
    }

    pub fn report(&self) -> ReportView {
        ReportView::new(self.revision, &self.space, &check_partial(&self.active))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(decl: &str) -> Session {
        Session::new(
            Session::create_record(decl, 0, DEFAULT_MAX_WORLDS).unwrap(),
            DEFAULT_MAX_WORLDS,
        )
        .unwrap()
    }

    fn assert_j(s: &mut Session, lhs: &str, rel: &str, rhs: &str) -> StatusView {
        let r = s.prepare_assert(0, lhs, rel, rhs).unwrap();
        s.apply(r).unwrap()
    }

    #[test]
    fn create() {
        let s = session("worlds: w1 w2 w3");
        assert!(s.is_consistent());
        assert_eq!(s.revision(), 1);
        let s = session("atoms: x y");
        assert_eq!(s.space().world_count(), 4);
        assert!(matches!(
            Session::create_record("worlds: a b\norder:", 0, 10),
            Err(SessionError::InvalidSpace(_))
        ));
        assert!(matches!(
            Session::create_record("worlds: a b c d e f g h i j k", 0, 10),
            Err(SessionError::CapExceeded { .. })
        ));
        assert!(matches!(
            Session::create_record("order:", 0, 10),
            Err(SessionError::InvalidSpace(_))
        ));
    }

    #[test]
    fn contradiction_and_retraction() {
        let mut s = session("worlds: w1 w2");
        let v = assert_j(&mut s, "w1", ">", "w2");
        assert!(v.consistent);
        assert_eq!(v.margin.as_deref(), Some("1"));
        assert_eq!(v.judgment.unwrap().id, "j1");

        let v = assert_j(&mut s, "w1", "<", "w2");
        assert!(!v.consistent);
        assert_eq!(v.conflict, vec!["j1", "j2"]);
        let j2 = v.judgments.iter().find(|j| j.id == "j2").unwrap();
        assert_eq!((j2.lhs.as_str(), j2.rhs.as_str()), ("w2", "w1"));
        assert_eq!(
            s.snapshot().bounds("w1", None),
            Err(SessionError::InconsistentSession)
        );

        let r = s.prepare_retract(0, "j1").unwrap();
        let v = s.apply(r).unwrap();
        assert!(v.consistent);
        assert!(matches!(
            s.prepare_retract(0, "j1"),
            Err(SessionError::UnknownJudgment(_))
        ));
        assert_eq!(s.revision(), 4);
    }

    #[test]
    fn conflict_is_minimal() {
        let mut s = session("worlds: w1 w2 w3");
        assert_j(&mut s, "w3", ">=", "w1");
        assert_j(&mut s, "w1", ">", "w2");
        assert_j(&mut s, "w1 or w3", ">=", "w2");
        let v = assert_j(&mut s, "w2 or w3", ">", "w1 or w3");
        assert!(!v.consistent);
        assert_eq!(v.conflict, vec!["j2", "j4"]);
    }

    #[test]
    fn queries() {
        let mut s = session("worlds: w1 w2 w3");
        assert_j(&mut s, "w1", ">=", "w2");
        assert_j(&mut s, "w2", ">=", "w3");
        let snap = s.snapshot();
        let b = snap.bounds("w1", None).unwrap();
        assert_eq!((b.lower.as_str(), b.upper.as_str()), ("1/3", "1"));
        assert!(snap.entails("w1 or w3", "w2 or w3").unwrap().always);
        let e = snap.entails("w1", "w3").unwrap();
        assert!(e.always && e.witness.is_none());
        let e = snap.entails("w2", "w1").unwrap();
        assert!(e.witness.is_some());
        assert_eq!(snap.realization().unwrap().margin, None);
        assert!(snap.report().verdicts.values().all(|v| v.pass));
        match snap.bounds("w1 and", None) {
            Err(e) => assert_eq!(
                (e.code(), e.offset(), e.field()),
                ("parse_error", Some(6), Some("event"))
            ),
            Ok(_) => panic!(),
        }
    }

    #[test]
    fn flags_trivial_violations() {
        let mut s = session("worlds: w1 w2");
        assert_j(&mut s, "F", ">", "w1");
        assert_j(&mut s, "w1", "=", "w1");
        let v = assert_j(&mut s, "T", "<", "w2");
        let flagged: Vec<_> = v
            .flags
            .iter()
            .map(|f| (f.judgment.as_str(), f.axiom))
            .collect();
        assert_eq!(flagged, vec![("j1", "A3"), ("j3", "A3")]);
        assert!(!v.consistent);
        // Each flagged judgment is contradictory alone; deletion filtering
        // keeps the later one.
        assert_eq!(v.conflict, vec!["j3"]);
    }

    #[test]
    fn replay_matches() {
        let mut s = session("atoms: x y");
        assert_j(&mut s, "x", ">", "y");
        assert_j(&mut s, "x and y", ">=", "not x");
        let r = s.prepare_retract(5, "j1").unwrap();
        s.apply(r).unwrap();
        assert_j(&mut s, "y", ">", "x or y");
        let again = Session::replay(s.journal(), DEFAULT_MAX_WORLDS).unwrap();
        assert_eq!(again.status_view(), s.status_view());
        assert_eq!(again.journal(), s.journal());
    }
}
