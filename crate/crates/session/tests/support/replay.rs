//! Randomized assert/retract sequences: a store reopened from its journal
//! files, and every journal prefix replayed in memory, must answer every
//! query with byte-identical JSON.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use qualprob::Event;
use qualprob_session::{
    parse_journal, render_journal, Config, Session, SessionError, Snapshot, Store,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

const RELS: [&str; 5] = [">", ">=", "=", "<=", "<"];

pub struct Summary {
    pub sequences: u64,
    pub steps: usize,
    pub inconsistent_steps: usize,
    pub retractions: usize,
}

fn json<T: Serialize>(r: Result<T, SessionError>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap(),
        Err(e) => format!("error:{}", e.code()),
    }
}

struct Probe {
    event: String,
    given: String,
    lhs: String,
    rhs: String,
}

/// Everything a client could observe at one revision.
fn observe(snap: &Snapshot, probe: &Probe) -> String {
    [
        json(Ok(snap.status())),
        json(snap.realization()),
        json(Ok(snap.report())),
        json(snap.bounds(&probe.event, None)),
        json(snap.bounds(&probe.event, Some(&probe.given))),
        json(snap.entails(&probe.lhs, &probe.rhs)),
    ]
    .join("\n")
}

fn random_event(rng: &mut ChaCha8Rng, snap: &Snapshot) -> String {
    let n = snap.space.world_count();
    let bits = rng.next_u32() % (1 << n);
    snap.space.describe(&Event::from_bits(bits, n).unwrap())
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn run(sequences: u64) -> Result<Summary, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = Config {
        journal_dir: Some(dir.path().to_path_buf()),
        ..Config::default()
    };
    let tick = Arc::new(AtomicU64::new(0));
    let t = tick.clone();
    let store = Store::open(config.clone())
        .map_err(|e| e.to_string())?
        .with_clock(move || t.fetch_add(1, Ordering::Relaxed));
    let err = |e: SessionError| e.to_string();

    let mut summary = Summary {
        sequences,
        steps: 0,
        inconsistent_steps: 0,
        retractions: 0,
    };
    let mut finals = Vec::new();
    for seed in 0..sequences {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let decl = match rng.next_u32() % 3 {
            0 => "worlds: w1 w2",
            1 => "worlds: w1 w2 w3",
            _ => "atoms: x y",
        };
        let (id, _) = store.create(decl).map_err(err)?;
        let mut history = Vec::new();
        for _ in 0..2 + rng.next_u32() % 6 {
            let snap = store.snapshot(&id).map_err(err)?;
            let active = snap.status().judgments;
            if !active.is_empty() && rng.next_u32() % 3 == 0 {
                let pick = rng.next_u32() as usize % active.len();
                store.retract(&id, &active[pick].id).map_err(err)?;
                summary.retractions += 1;
            } else {
                let lhs = random_event(&mut rng, &snap);
                let rhs = random_event(&mut rng, &snap);
                let rel = RELS[rng.next_u32() as usize % RELS.len()];
                store.assert(&id, &lhs, rel, &rhs).map_err(err)?;
            }
            let snap = store.snapshot(&id).map_err(err)?;
            let probe = Probe {
                event: random_event(&mut rng, &snap),
                given: random_event(&mut rng, &snap),
                lhs: random_event(&mut rng, &snap),
                rhs: random_event(&mut rng, &snap),
            };
            summary.inconsistent_steps += usize::from(!snap.consistent);
            history.push((observe(&snap, &probe), probe));
            summary.steps += 1;
        }

        // Every prefix of the journal reproduces the state observed then.
        let text = render_journal(&store.journal(&id).map_err(err)?);
        let records = parse_journal(&text).map_err(err)?;
        check(render_journal(&records) == text, || {
            format!("seed {seed}: journal text does not round-trip")
        })?;
        for (k, (seen, probe)) in history.iter().enumerate() {
            let replayed = Session::replay(&records[..k + 2], config.max_worlds).map_err(err)?;
            check(&observe(&replayed.snapshot(), probe) == seen, || {
                format!("seed {seed}, step {k}: replayed answers differ")
            })?;
        }
        let (last, probe) = history.pop().expect("at least two steps");
        finals.push((id, last, probe));
    }

    let reopened = Store::open(config).map_err(err)?;
    check(reopened.ids().len() == sequences as usize, || {
        format!("reopened store has {} sessions", reopened.ids().len())
    })?;
    for (id, seen, probe) in &finals {
        let snap = reopened.snapshot(id).map_err(err)?;
        check(&observe(&snap, probe) == seen, || {
            format!("session {id}: reopened answers differ")
        })?;
    }
    Ok(summary)
}
