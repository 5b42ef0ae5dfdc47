//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use qualprob::axioms::{
    check_conditional, check_unconditional, Axiom, ConditionalAxiom, ScanOptions,
};
use qualprob::credal::PradeVerdict;
use qualprob::oracle::{enumerate_qualitative_probabilities, random_rational_distribution};
use qualprob::rational::{frac, int, zero};
use qualprob::ratlp::{fourier_motzkin_feasible, solve, Cmp, LinearProgram, Sense};
use qualprob::realize::agrees;
use qualprob::{
    induced_conditional, induced_ordering, realize_complete, shared, CompleteOrdering,
    ConditionalStructure, CredalSet, Distribution, Entailment, Error, Event, PartialOrdering,
    Relation, Space, SpaceRef,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[path = "../../session/tests/support/replay.rs"]
mod replay;

type Outcome = Result<String, String>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn numbered(n: usize) -> SpaceRef {
    shared(Space::numbered(n).unwrap())
}

/// The seeded distributions shared by the soundness, round-trip and
/// A6→H2 criteria: 200 of them over 2–5 worlds, on grids coarse enough to
/// produce ties and null worlds.
fn soundness_distributions() -> Vec<(u64, Distribution)> {
    (0..200)
        .map(|seed| {
            let space = numbered(2 + (seed % 4) as usize);
            let resolution = [4, 10, 60][(seed / 4 % 3) as usize];
            (
                seed,
                random_rational_distribution(&space, seed, resolution).unwrap(),
            )
        })
        .collect()
}

fn soundness() -> Outcome {
    let started = Instant::now();
    let options = ScanOptions::default();
    let cases = soundness_distributions();
    for (seed, p) in &cases {
        let (certain_true, certain_false) = p.certainty_sets();
        let o = induced_ordering(p);
        let report = check_unconditional(&o, &certain_true, &certain_false, &options)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(report.all_pass(), || {
            format!("seed {seed}: {:?}", report.verdicts)
        })?;
        let cs = induced_conditional(p).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = check_conditional(&cs, &options).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(report.all_pass(), || {
            format!("seed {seed}: {:?}", report.verdicts)
        })?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} distributions over 2-5 worlds, 0 failures, {:.1}s",
        cases.len(),
        elapsed.as_secs_f64()
    ))
}

const KRAFT_GOLDEN_COUNT: usize = 31;

fn enumerate_three() -> Result<Vec<CompleteOrdering>, String> {
    let result = enumerate_qualitative_probabilities(&numbered(3)).map_err(|e| e.to_string())?;
    ensure(result.total_count == result.orderings.len(), || {
        "count disagrees with the listed orderings".into()
    })?;
    Ok(result.orderings)
}

fn kraft() -> Outcome {
    let started = Instant::now();
    let orderings = enumerate_three()?;
    ensure(orderings.len() == KRAFT_GOLDEN_COUNT, || {
        format!("{} orderings, golden {KRAFT_GOLDEN_COUNT}", orderings.len())
    })?;
    let mut smallest = None;
    for (i, o) in orderings.iter().enumerate() {
        let r = realize_complete(o).map_err(|e| e.to_string())?;
        let r = r
            .realization()
            .ok_or_else(|| format!("ordering {i} has no agreeing distribution"))?;
        let margin = r.margin.clone().unwrap_or_else(zero);
        ensure(margin > zero(), || format!("ordering {i}: margin {margin}"))?;
        ensure(agrees(&r.distribution, o).unwrap_or(false), || {
            format!("ordering {i}: realization disagrees")
        })?;
        smallest = Some(smallest.map_or(margin.clone(), |m: qualprob::Rational| m.min(margin)));
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} orderings (golden {KRAFT_GOLDEN_COUNT}), all realized, smallest margin {}, {:.1}s",
        orderings.len(),
        smallest.map(|m| m.to_string()).unwrap_or_default(),
        elapsed.as_secs_f64()
    ))
}

fn complementarity() -> Outcome {
    let orderings = enumerate_three()?;
    let options = ScanOptions::default();
    let mut exceptions = 0;
    for o in &orderings {
        let report = check_unconditional(o, &[], &[], &options).map_err(|e| e.to_string())?;
        exceptions += usize::from(!report.passes(Axiom::H1));
    }
    ensure(exceptions == 0, || {
        format!("{exceptions} orderings fail H1")
    })?;
    Ok(format!("H1 holds on all {} orderings", orderings.len()))
}

fn round_trip() -> Outcome {
    let cases = soundness_distributions();
    for (seed, p) in &cases {
        let o = induced_ordering(p);
        let r = realize_complete(&o).map_err(|e| format!("seed {seed}: {e}"))?;
        let r = r
            .realization()
            .ok_or_else(|| format!("seed {seed}: not realizable"))?;
        ensure(agrees(&r.distribution, &o).unwrap_or(false), || {
            format!("seed {seed}: realization disagrees")
        })?;
        ensure(induced_ordering(&r.distribution) == o, || {
            format!("seed {seed}: orderings differ")
        })?;
    }
    Ok(format!(
        "{} distributions, orderings equal exactly",
        cases.len()
    ))
}

fn random_program(seed: u64, vars: usize, rows: usize) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pick = |lo: i64, hi: i64| lo + (rng.next_u64() % (hi - lo + 1) as u64) as i64;
    let sense = if pick(0, 1) == 0 {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut lp = LinearProgram::new(vars, sense);
    lp.objective = (0..vars).map(|_| int(pick(-3, 3))).collect();
    for _ in 0..rows {
        let coefficients = (0..vars).map(|_| int(pick(-3, 3))).collect();
        let rel = match pick(0, 4) {
            0 => Cmp::Eq,
            1 | 2 => Cmp::Le,
            _ => Cmp::Ge,
        };
        lp.add(coefficients, rel, int(pick(-4, 4)));
    }
    lp
}

fn solver_oracle() -> Outcome {
    let (mut compared, mut infeasible, mut over_cap) = (0, 0, 0);
    for seed in 0..200 {
        let lp = random_program(seed, 2 + (seed % 4) as usize, 4 + (seed % 7) as usize);
        let oracle = match fourier_motzkin_feasible(&lp) {
            Ok(v) => v,
            Err(Error::CapExceeded { .. }) => {
                over_cap += 1;
                continue;
            }
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        let outcome = solve(&lp).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(lp.verify(&outcome), || {
            format!("seed {seed}: certificate fails")
        })?;
        ensure(outcome.is_feasible() == oracle, || {
            format!(
                "seed {seed}: simplex {} vs FM {oracle}",
                outcome.is_feasible()
            )
        })?;
        compared += 1;
        infeasible += usize::from(!oracle);
    }
    ensure(compared >= 100, || {
        format!("only {compared} systems within caps")
    })?;
    Ok(format!(
        "{compared} systems ({infeasible} infeasible, {over_cap} over cap), 0 disagreements"
    ))
}

fn random_judgments(s: &SpaceRef, seed: u64, count: usize) -> PartialOrdering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events = s.event_count() as u64;
    let mut po = PartialOrdering::new(s.clone());
    for _ in 0..count {
        let a = s.event((rng.next_u64() % events) as u32).unwrap();
        let b = s.event((rng.next_u64() % events) as u32).unwrap();
        let rel =
            [Relation::Gt, Relation::Ge, Relation::Ge, Relation::Eq][(rng.next_u64() % 4) as usize];
        po.push(a, rel, b);
    }
    po
}

fn credal() -> Outcome {
    let s = numbered(3);
    let ev = |bits| s.event(bits).unwrap();
    let mut chain = PartialOrdering::new(s.clone());
    chain.push(ev(0b001), Relation::Ge, ev(0b010));
    chain.push(ev(0b010), Relation::Ge, ev(0b100));
    let cs = CredalSet::new(chain).map_err(|e| e.to_string())?;
    for (bits, lower, upper) in [
        (0b001, frac(1, 3), int(1)),
        (0b010, int(0), frac(1, 2)),
        (0b100, int(0), frac(1, 3)),
    ] {
        let b = cs.bounds(&ev(bits)).map_err(|e| e.to_string())?;
        ensure(b.lower == lower && b.upper == upper, || {
            format!(
                "bounds of {}: [{}, {}]",
                s.describe(&ev(bits)),
                b.lower,
                b.upper
            )
        })?;
    }

    // w1 >= w2 entails w1 or w3 >= w2 or w3 by additivity.
    let mut one = PartialOrdering::new(s.clone());
    one.push(ev(0b001), Relation::Ge, ev(0b010));
    let cs = CredalSet::new(one).map_err(|e| e.to_string())?;
    let e = cs
        .entails(&ev(0b101), &ev(0b110))
        .map_err(|e| e.to_string())?;
    ensure(e == Entailment::Always, || {
        "additivity example not entailed".into()
    })?;

    let mut checked = 0;
    for worlds in 1..=4 {
        let space = numbered(worlds);
        let mut seed = 0;
        let mut here = 0;
        while here < 15 {
            let cs = CredalSet::new(random_judgments(&space, seed, 1 + (seed % 4) as usize))
                .map_err(|e| e.to_string())?;
            seed += 1;
            if cs.is_empty() {
                continue;
            }
            match cs.prade_check().map_err(|e| e.to_string())? {
                PradeVerdict::Pass { .. } => {}
                PradeVerdict::Fail(f) => return Err(format!("prade: {f:?}")),
            }
            here += 1;
        }
        checked += here;
    }
    Ok(format!(
        "chain bounds [1/3,1] [0,1/2] [0,1/3], additivity Always, prade passes on {checked} sets"
    ))
}

/// Conditional possibility with min-based conditioning on three worlds:
/// (a|c) sits at the top level when a∧c is as possible as c, else at a∧c.
fn min_combination_structure() -> ConditionalStructure {
    let space = numbered(3);
    let levels = [3u64, 2, 1];
    let poss = |e: Event| e.worlds().map(|w| levels[w]).max().unwrap_or(0);
    let scores: Vec<u64> = space.events().map(poss).collect();
    let base = CompleteOrdering::from_scores(space.clone(), &scores).unwrap();
    let mut entries = Vec::new();
    for c in space.events().filter(|c| !c.is_bottom()) {
        for a in space.events() {
            let pac = poss(a & c);
            entries.push((a, c, if pac == poss(c) { 3 } else { pac }));
        }
    }
    ConditionalStructure::from_entries(base, entries).unwrap()
}

fn a6_implies_h2() -> Outcome {
    let options = ScanOptions::default();
    let mut a6_passing = 0;
    for (seed, p) in soundness_distributions() {
        let cs = induced_conditional(&p).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = check_conditional(&cs, &options).map_err(|e| format!("seed {seed}: {e}"))?;
        if report.passes(ConditionalAxiom::A6) {
            a6_passing += 1;
            ensure(report.passes(ConditionalAxiom::H2), || {
                format!("seed {seed}: A6 passes but H2 fails")
            })?;
        }
    }
    let report =
        check_conditional(&min_combination_structure(), &options).map_err(|e| e.to_string())?;
    let a6 = &report.verdicts[&ConditionalAxiom::A6];
    let detail = a6.witness().map(|w| w.detail.clone()).unwrap_or_default();
    ensure(detail.contains("not strictly increasing"), || {
        format!("min table: A6 verdict {a6:?}")
    })?;
    Ok(format!(
        "{a6_passing} structures pass A6, all pass H2; min table fails A6 strictness"
    ))
}

fn journal_replay() -> Outcome {
    let s = replay::run(1000)?;
    Ok(format!(
        "{} sequences, {} steps ({} inconsistent, {} retractions), byte-equal JSON",
        s.sequences, s.steps, s.inconsistent_steps, s.retractions
    ))
}

fn console_absent() -> Outcome {
    let crates = Path::new(env!("CARGO_MANIFEST_DIR")).join("..");
    let mut members: Vec<String> = std::fs::read_dir(&crates)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().join("Cargo.toml").exists())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    members.sort();
    ensure(!members.iter().any(|m| m.contains("console")), || {
        format!("a console member exists: {members:?}")
    })?;
    Ok(format!(
        "workspace members {}; every criterion above ran in-process",
        members.join(", ")
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("soundness suite", soundness),
        ("kraft realizability at 3 worlds", kraft),
        ("complementarity (H1) over the enumeration", complementarity),
        ("round-trip exactness", round_trip),
        ("simplex / fourier-motzkin equivalence", solver_oracle),
        ("credal worked values and prade", credal),
        ("A6 implies H2; min table fails A6", a6_implies_h2),
        ("journal replay", journal_replay),
        ("primary suite without the console", console_absent),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
