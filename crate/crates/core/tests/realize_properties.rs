use proptest::prelude::*;
use qualprob::oracle::random_rational_distribution;
use qualprob::rational::{frac, int, zero};
use qualprob::ratlp::{solve, Cmp, LpOutcome};
use qualprob::realize::build_program;
use qualprob::{
    induced_ordering, realize_complete, realize_partial, shared, CompleteOrdering, PartialOrdering,
    Rational, Relation, Space, SpaceRef,
};

fn space(n: usize) -> SpaceRef {
    shared(Space::numbered(n).unwrap())
}

/// Orderings near the realizable boundary: induced ones and copies with a
/// pair of events exchanged.
fn sample_orderings(worlds: usize, count: u64) -> Vec<CompleteOrdering> {
    let s = space(worlds);
    let mut out = Vec::new();
    for seed in 0..count {
        let p = random_rational_distribution(&s, seed, 12).unwrap();
        let o = induced_ordering(&p);
        let events: Vec<_> = s.events().collect();
        let a = events[(seed as usize * 7 + 1) % events.len()];
        let b = events[(seed as usize * 13 + 2) % events.len()];
        out.push(o.with_swapped(&a, &b));
        out.push(o);
    }
    out
}

fn margin(o: &CompleteOrdering) -> Option<Rational> {
    realize_complete(o)
        .unwrap()
        .realization()
        .map(|r| r.margin.clone().unwrap())
}

#[test]
fn adjacency_constraints_suffice() {
    let mut realizable = 0;
    let mut unrealizable = 0;
    for worlds in 1..=4 {
        for o in sample_orderings(worlds, 15) {
            let mut full = build_program(&o);
            let n = o.space().world_count();
            let events: Vec<_> = o.space().events().collect();
            for a in &events {
                for b in &events {
                    let ord = o.compare(a, b).unwrap();
                    if ord.is_lt() || (ord.is_eq() && a >= b) {
                        continue;
                    }
                    let mut row = vec![zero(); n + 1];
                    for w in a.worlds() {
                        row[w] += int(1);
                    }
                    for w in b.worlds() {
                        row[w] -= int(1);
                    }
                    if ord.is_gt() {
                        row[n] = int(-1);
                        full.add(row, Cmp::Ge, zero());
                    } else {
                        full.add(row, Cmp::Eq, zero());
                    }
                }
            }
            let full_margin = match solve(&full).unwrap() {
                LpOutcome::Optimal { value, .. } if value > zero() => Some(value),
                _ => None,
            };
            assert_eq!(margin(&o), full_margin, "{o:?}");
            if full_margin.is_some() {
                realizable += 1;
            } else {
                unrealizable += 1;
            }
        }
    }
    assert!(realizable > 10 && unrealizable > 10);
}

#[test]
fn monotone_rescaling_preserves_verdicts() {
    for worlds in 2..=4 {
        for o in sample_orderings(worlds, 10) {
            // A strictly increasing map of the ranks, and of probabilities.
            let scores: Vec<u64> = o
                .ranks()
                .iter()
                .map(|&r| 3 * (r as u64).pow(2) + 7)
                .collect();
            let rescaled = CompleteOrdering::from_scores(o.space().clone(), &scores).unwrap();
            assert_eq!(rescaled, o);
            assert_eq!(margin(&rescaled), margin(&o));
        }
        let s = space(worlds);
        for seed in 0..10 {
            let p = random_rational_distribution(&s, seed, 30).unwrap();
            let cubed: Vec<Rational> = p
                .event_probs()
                .iter()
                .map(|x| x * x * x + x * frac(1, 2))
                .collect();
            let o = CompleteOrdering::from_scores(s.clone(), &cubed).unwrap();
            assert_eq!(o, induced_ordering(&p));
            assert!(margin(&o).is_some());
        }
    }
}

#[test]
fn complete_certificates_replay() {
    let mut seen = 0;
    for worlds in 2..=4 {
        for o in sample_orderings(worlds, 15) {
            if let Some(cert) = realize_complete(&o).unwrap().certificate() {
                seen += 1;
                let replay = cert.as_partial(o.space().clone());
                assert!(!realize_partial(&replay).unwrap().is_realizable(), "{o:?}");
            }
        }
    }
    assert!(seen > 10);
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Gt), Just(Relation::Ge), Just(Relation::Eq)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partial_verdicts_are_certified(
        worlds in 1usize..=4,
        raw in prop::collection::vec((0u32..16, relation(), 0u32..16), 0..7),
    ) {
        let s = space(worlds);
        let mask = s.top().bits();
        let mut po = PartialOrdering::new(s.clone());
        for (a, rel, b) in raw {
            po.push(s.event(a & mask).unwrap(), rel, s.event(b & mask).unwrap());
        }
        match realize_partial(&po).unwrap().certificate() {
            None => {
                let r = realize_partial(&po).unwrap();
                let r = r.realization().unwrap();
                prop_assert!(r.distribution.satisfies(&po));
                if let Some(m) = &r.margin {
                    prop_assert!(*m > zero());
                }
            }
            Some(cert) => {
                prop_assert!(!cert.conflicts.is_empty());
                let ids = cert.ids();
                let replay = po.restrict(&ids);
                prop_assert_eq!(replay.len(), ids.len());
                prop_assert!(!realize_partial(&replay).unwrap().is_realizable());
            }
        }
    }
}
