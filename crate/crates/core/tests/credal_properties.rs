use qualprob::credal::PradeVerdict;
use qualprob::rational::frac;
use qualprob::{
    realize_partial, shared, CredalSet, Entailment, Event, PartialOrdering, Relation, Space,
    SpaceRef,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn space(n: usize) -> SpaceRef {
    shared(Space::numbered(n).unwrap())
}

/// Seeded judgment lists; roughly half of them are consistent.
fn random_judgments(s: &SpaceRef, seed: u64, count: usize) -> PartialOrdering {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events = s.event_count() as u64;
    let mut po = PartialOrdering::new(s.clone());
    for _ in 0..count {
        let a = s.event((rng.next_u64() % events) as u32).unwrap();
        let b = s.event((rng.next_u64() % events) as u32).unwrap();
        let rel = [Relation::Gt, Relation::Ge, Relation::Ge, Relation::Eq][(rng.next_u64() % 4) as usize];
        po.push(a, rel, b);
    }
    po
}

fn nonempty_sets(worlds: usize, wanted: usize) -> Vec<CredalSet> {
    let s = space(worlds);
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < wanted {
        let cs = CredalSet::new(random_judgments(&s, seed, 1 + (seed % 4) as usize)).unwrap();
        seed += 1;
        if !cs.is_empty() {
            out.push(cs);
        }
    }
    out
}

#[test]
fn worked_values() {
    let s = space(3);
    let ev = |bits| s.event(bits).unwrap();
    let mut po = PartialOrdering::new(s.clone());
    po.push(ev(1), Relation::Ge, ev(2));
    po.push(ev(2), Relation::Ge, ev(4));
    let cs = CredalSet::new(po).unwrap();
    let b = |e| {
        let b = cs.bounds(&ev(e)).unwrap();
        (b.lower, b.upper)
    };
    assert_eq!(b(1), (frac(1, 3), frac(1, 1)));
    assert_eq!(b(2), (frac(0, 1), frac(1, 2)));
    assert_eq!(b(4), (frac(0, 1), frac(1, 3)));

    let mut po = PartialOrdering::new(s.clone());
    po.push(ev(1), Relation::Ge, ev(2));
    let cs = CredalSet::new(po).unwrap();
    assert_eq!(cs.entails(&ev(5), &ev(6)).unwrap(), Entailment::Always);
}

#[test]
fn prade_passes_on_seeded_sets() {
    let mut checked = 0;
    for worlds in 1..=4 {
        for cs in nonempty_sets(worlds, 15) {
            match cs.prade_check().unwrap() {
                PradeVerdict::Pass { sampled, .. } => assert!(!sampled),
                PradeVerdict::Fail(f) => panic!("{f:?} on {:?}", cs.judgments()),
            }
            checked += 1;
        }
    }
    assert!(checked >= 50);
}

#[test]
fn unanimity_bridge_and_sandwich() {
    for worlds in 2..=4 {
        for cs in nonempty_sets(worlds, 10) {
            for j in cs.judgments().judgments() {
                assert!(cs.entails(&j.lhs, &j.rhs).unwrap().is_always());
                if j.rel == Relation::Eq {
                    assert!(cs.entails(&j.rhs, &j.lhs).unwrap().is_always());
                }
            }
            let r = realize_partial(cs.judgments()).unwrap();
            let p = &r.realization().unwrap().distribution;
            for e in cs.space().events() {
                assert!(cs.bounds(&e).unwrap().contains(&p.prob(&e)));
            }
        }
    }
}

#[test]
fn more_judgments_never_widen_bounds() {
    let s = space(3);
    for seed in 0..12 {
        let full = random_judgments(&s, 1000 + seed, 5);
        let mut po = PartialOrdering::new(s.clone());
        let mut previous: Option<Vec<(qualprob::Rational, qualprob::Rational)>> = None;
        for j in full.judgments() {
            po.push(j.lhs, j.rel, j.rhs);
            let cs = CredalSet::new(po.clone()).unwrap();
            if cs.is_empty() {
                break;
            }
            let now: Vec<_> = s
                .events()
                .map(|e| {
                    let b = cs.bounds(&e).unwrap();
                    (b.lower, b.upper)
                })
                .collect();
            if let Some(before) = &previous {
                for ((lo0, hi0), (lo1, hi1)) in before.iter().zip(&now) {
                    assert!(lo1 >= lo0 && hi1 <= hi0);
                }
            }
            previous = Some(now);
        }
    }
}

#[test]
fn entailment_is_a_preorder() {
    for cs in nonempty_sets(3, 6) {
        let events: Vec<Event> = cs.space().events().collect();
        let n = events.len();
        let mut ge = vec![vec![false; n]; n];
        for (i, a) in events.iter().enumerate() {
            for (j, b) in events.iter().enumerate() {
                match cs.entails(a, b).unwrap() {
                    Entailment::Always => ge[i][j] = true,
                    Entailment::NotAlways(w) => {
                        assert!(w.satisfies(cs.judgments()));
                        assert!(w.prob(a) < w.prob(b));
                    }
                }
            }
        }
        for i in 0..n {
            assert!(ge[i][i]);
            for j in 0..n {
                for k in 0..n {
                    if ge[i][j] && ge[j][k] {
                        assert!(ge[i][k]);
                    }
                }
            }
        }
    }
}
