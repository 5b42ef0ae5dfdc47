//! JSON payloads. Rationals are strings `num/den` (bare `num` for
//! integers); events are rendered as canonical sentences.

use std::collections::BTreeMap;

use qualprob::axioms::{AxiomReport, Verdict};
use qualprob::rational::format;
use qualprob::{Bounds, Distribution, Event, Judgment, Rational, Relation, Space};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JudgmentView {
    pub id: String,
    pub lhs: String,
    pub rel: Relation,
    pub rhs: String,
}

impl JudgmentView {
    pub fn new(space: &Space, j: &Judgment) -> Self {
        JudgmentView {
            id: j.id.clone(),
            lhs: space.describe(&j.lhs),
            rel: j.rel,
            rhs: space.describe(&j.rhs),
        }
    }
}

/// A judgment that contradicts the certainty assumptions on its face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub judgment: String,
    pub axiom: &'static str,
    pub message: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatusView {
    pub revision: usize,
    pub consistent: bool,
    pub margin: Option<String>,
    /// Judgment ids that cannot hold together; empty when consistent.
    pub conflict: Vec<String>,
    pub flags: Vec<Flag>,
    pub judgments: Vec<JudgmentView>,
    /// The judgment just asserted, on assert responses.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub judgment: Option<JudgmentView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MassView {
    pub world: String,
    pub mass: String,
}

pub fn masses(space: &Space, p: &Distribution) -> Vec<MassView> {
    p.masses()
        .iter()
        .enumerate()
        .map(|(i, m)| MassView {
            world: space.world_label(i),
            mass: format(m),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntailsView {
    pub revision: usize,
    pub lhs: String,
    pub rhs: String,
    pub always: bool,
    /// A member of the credal set with p(lhs) < p(rhs).
    pub witness: Option<Vec<MassView>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsView {
    pub revision: usize,
    pub event: String,
    pub given: Option<String>,
    pub lower: String,
    pub upper: String,
    pub attained_lower: bool,
    pub attained_upper: bool,
}

impl BoundsView {
    pub fn new(revision: usize, event: String, given: Option<String>, b: &Bounds) -> Self {
        BoundsView {
            revision,
            event,
            given,
            lower: format(&b.lower),
            upper: format(&b.upper),
            attained_lower: b.attained_lower,
            attained_upper: b.attained_upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizationView {
    pub revision: usize,
    pub distribution: Vec<MassView>,
    pub margin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessView {
    pub events: Vec<String>,
    pub detail: String,
    pub judgments: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictView {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessView>,
}

impl VerdictView {
    pub fn new(space: &Space, v: &Verdict) -> Self {
        VerdictView {
            pass: v.is_pass(),
            witness: v.witness().map(|w| WitnessView {
                events: w.events.iter().map(|e| describe(space, e)).collect(),
                detail: w.detail.clone(),
                judgments: w.judgments.clone(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportView {
    pub revision: usize,
    pub verdicts: BTreeMap<String, VerdictView>,
    pub coverage: Option<String>,
    pub notes: Vec<String>,
}

impl ReportView {
    pub fn new(revision: usize, space: &Space, report: &AxiomReport) -> Self {
        ReportView {
            revision,
            verdicts: report
                .verdicts
                .iter()
                .map(|(a, v)| (a.to_string(), VerdictView::new(space, v)))
                .collect(),
            coverage: report.coverage.as_ref().map(format),
            notes: report.notes.clone(),
        }
    }
}

pub fn describe(space: &Space, e: &Event) -> String {
    space.describe(e)
}

pub fn rational(r: &Rational) -> String {
    format(r)
}
