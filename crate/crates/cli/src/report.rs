//! Command reports: one serializable body per command plus its text form.
//! Both renderings are deterministic for fixed input.

use std::fmt::Write as _;

use qualprob::axioms::{AxiomReport, ConditionalReport, Verdict};
use qualprob::rational::format;
use qualprob::realize::NonRealizable;
use qualprob::{Bounds, CompleteOrdering, Distribution, Space};
use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema: u32,
    pub command: &'a str,
    pub pass: bool,
    #[serde(flatten)]
    pub body: &'a T,
}

pub trait Report: Serialize {
    fn text(&self) -> String;
}

#[derive(Serialize)]
pub struct Mass {
    pub world: String,
    pub mass: String,
}

pub fn masses(space: &Space, p: &Distribution) -> Vec<Mass> {
    p.masses()
        .iter()
        .enumerate()
        .map(|(i, m)| Mass {
            world: space.world_label(i),
            mass: format(m),
        })
        .collect()
}

fn write_masses(out: &mut String, ms: &[Mass]) {
    for m in ms {
        let _ = writeln!(out, "  {} {}", m.world, m.mass);
    }
}

#[derive(Serialize)]
pub struct VerdictRow {
    pub axiom: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub judgments: Vec<String>,
}

impl VerdictRow {
    fn new(space: &Space, axiom: String, v: &Verdict) -> Self {
        let w = v.witness();
        VerdictRow {
            axiom,
            pass: v.is_pass(),
            detail: w.map(|w| w.detail.clone()),
            events: w
                .map(|w| w.events.iter().map(|e| space.describe(e)).collect())
                .unwrap_or_default(),
            judgments: w.map(|w| w.judgments.clone()).unwrap_or_default(),
        }
    }

    fn write(&self, out: &mut String) {
        let mark = if self.pass { "pass" } else { "FAIL" };
        let _ = writeln!(out, "  {:<24} {mark}", self.axiom);
        if let Some(d) = &self.detail {
            let _ = writeln!(out, "    {d}");
        }
        if !self.events.is_empty() {
            let _ = writeln!(out, "    events: {}", self.events.join(" ; "));
        }
        if !self.judgments.is_empty() {
            let _ = writeln!(out, "    judgments: {}", self.judgments.join(" "));
        }
    }
}

#[derive(Serialize)]
pub struct CheckBody {
    pub space: String,
    pub ordering: &'static str,
    pub verdicts: Vec<VerdictRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional: Option<Vec<VerdictRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<String>,
    pub sampled: bool,
    pub notes: Vec<String>,
}

impl CheckBody {
    pub fn new(
        space: &Space,
        ordering: &'static str,
        report: &AxiomReport,
        conditional: Option<&ConditionalReport>,
    ) -> Self {
        let mut notes = report.notes.clone();
        if let Some(c) = conditional {
            notes.extend(c.notes.iter().cloned());
        }
        CheckBody {
            space: space.declaration(),
            ordering,
            verdicts: report
                .verdicts
                .iter()
                .map(|(a, v)| VerdictRow::new(space, a.to_string(), v))
                .collect(),
            conditional: conditional.map(|c| {
                c.verdicts
                    .iter()
                    .map(|(a, v)| VerdictRow::new(space, a.to_string(), v))
                    .collect()
            }),
            coverage: report.coverage.as_ref().map(format),
            sampled: report.sampled || conditional.is_some_and(|c| c.sampled),
            notes,
        }
    }

    pub fn pass(&self) -> bool {
        self.verdicts
            .iter()
            .chain(self.conditional.iter().flatten())
            .all(|v| v.pass)
    }
}

impl Report for CheckBody {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.space);
        let _ = writeln!(out, "{} ordering", self.ordering);
        for v in &self.verdicts {
            v.write(&mut out);
        }
        if let Some(rows) = &self.conditional {
            let _ = writeln!(out, "conditional");
            for v in rows {
                v.write(&mut out);
            }
        }
        if let Some(c) = &self.coverage {
            let _ = writeln!(out, "coverage {c}");
        }
        if self.sampled {
            let _ = writeln!(out, "sampled (not exhaustive)");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "{}", if self.pass() { "PASS" } else { "FAIL" });
        out
    }
}

#[derive(Serialize)]
pub struct ConflictRow {
    pub id: Option<String>,
    pub lhs: String,
    pub rel: &'static str,
    pub rhs: String,
    pub multiplier: String,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum RealizeBody {
    Realizable {
        realizable: bool,
        margin: Option<String>,
        distribution: Vec<Mass>,
    },
    NonRealizable {
        realizable: bool,
        certificate: Vec<ConflictRow>,
    },
}

impl RealizeBody {
    pub fn certificate(space: &Space, cert: &NonRealizable) -> Self {
        RealizeBody::NonRealizable {
            realizable: false,
            certificate: cert
                .conflicts
                .iter()
                .map(|c| ConflictRow {
                    id: c.id.clone(),
                    lhs: space.describe(&c.lhs),
                    rel: c.rel.symbol(),
                    rhs: space.describe(&c.rhs),
                    multiplier: format(&c.multiplier),
                })
                .collect(),
        }
    }

    pub fn pass(&self) -> bool {
        matches!(self, RealizeBody::Realizable { .. })
    }
}

impl Report for RealizeBody {
    fn text(&self) -> String {
        let mut out = String::new();
        match self {
            RealizeBody::Realizable {
                margin,
                distribution,
                ..
            } => {
                let _ = writeln!(out, "realizable");
                let _ = writeln!(out, "margin {}", margin.as_deref().unwrap_or("none"));
                write_masses(&mut out, distribution);
            }
            RealizeBody::NonRealizable { certificate, .. } => {
                let _ = writeln!(out, "not realizable");
                let _ = writeln!(out, "certificate (weighted sum is contradictory):");
                for c in certificate {
                    let _ = writeln!(
                        out,
                        "  {} x [{}] {} {} {}",
                        c.multiplier,
                        c.id.as_deref().unwrap_or("-"),
                        c.lhs,
                        c.rel,
                        c.rhs
                    );
                }
            }
        }
        out
    }
}

#[derive(Serialize)]
pub struct EntailBody {
    pub lhs: String,
    pub rhs: String,
    pub always: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Mass>>,
}

impl Report for EntailBody {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} >= {}", self.lhs, self.rhs);
        match &self.witness {
            None => {
                let _ = writeln!(out, "always");
            }
            Some(w) => {
                let _ = writeln!(out, "not always; counterexample:");
                write_masses(&mut out, w);
            }
        }
        out
    }
}

#[derive(Serialize)]
pub struct BoundsBody {
    pub event: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub given: Option<String>,
    pub lower: String,
    pub upper: String,
    pub attained_lower: bool,
    pub attained_upper: bool,
}

impl BoundsBody {
    pub fn new(event: String, given: Option<String>, b: &Bounds) -> Self {
        BoundsBody {
            event,
            given,
            lower: format(&b.lower),
            upper: format(&b.upper),
            attained_lower: b.attained_lower,
            attained_upper: b.attained_upper,
        }
    }
}

impl Report for BoundsBody {
    fn text(&self) -> String {
        format!(
            "{} {}\nattained {} {}\n",
            self.lower, self.upper, self.attained_lower, self.attained_upper
        )
    }
}

#[derive(Serialize)]
pub struct EnumerateBody {
    pub worlds: usize,
    pub count: usize,
    pub all_realizable: bool,
    /// Each ordering as its indifference classes, lowest first.
    pub orderings: Vec<Vec<Vec<String>>>,
}

impl EnumerateBody {
    pub fn new(worlds: usize, all_realizable: bool, orderings: &[CompleteOrdering]) -> Self {
        EnumerateBody {
            worlds,
            count: orderings.len(),
            all_realizable,
            orderings: orderings
                .iter()
                .map(|o| {
                    o.classes()
                        .iter()
                        .map(|class| class.iter().map(|e| o.space().describe(e)).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl Report for EnumerateBody {
    fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "worlds {}", self.worlds);
        let _ = writeln!(out, "orderings {}", self.count);
        let _ = writeln!(out, "all realizable {}", self.all_realizable);
        for (i, o) in self.orderings.iter().enumerate() {
            let classes: Vec<String> = o.iter().map(|c| c.join(" = ")).collect();
            let _ = writeln!(out, "{:>4}  {}", i + 1, classes.join(" < "));
        }
        out
    }
}
