//! Session registry with one journal file per session.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use crate::error::SessionError;
use crate::journal::{parse_journal, Record};
use crate::session::{Session, Snapshot, DEFAULT_MAX_WORLDS};
use crate::view::StatusView;

#[derive(Debug, Clone)]
pub struct Config {
    pub max_worlds: usize,
    /// Wall-clock limit for a single query.
    pub query_budget: Duration,
    /// Where journals live; `None` keeps sessions in memory only.
    pub journal_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_worlds: DEFAULT_MAX_WORLDS,
            query_budget: Duration::from_secs(10),
            journal_dir: None,
        }
    }
}

type Clock = Box<dyn Fn() -> u64 + Send + Sync>;

fn wall_clock() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub struct Store {
    config: Config,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    clock: Clock,
}

impl Store {
    /// Opens the store, replaying every `*.journal` file in the journal
    /// directory.
    pub fn open(config: Config) -> Result<Store, SessionError> {
        let mut sessions = BTreeMap::new();
        if let Some(dir) = &config.journal_dir {
            fs::create_dir_all(dir)?;
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "journal"))
                .collect();
            paths.sort();
            for path in paths {
                let id = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or_default()
                    .to_string();
                let records = parse_journal(&fs::read_to_string(&path)?)?;
                let session = Session::replay(&records, config.max_worlds)?;
                sessions.insert(id, Arc::new(Mutex::new(session)));
            }
        }
        Ok(Store {
            config,
            sessions: RwLock::new(sessions),
            clock: Box::new(wall_clock),
        })
    }

    pub fn with_clock(mut self, clock: impl Fn() -> u64 + Send + Sync + 'static) -> Self {
        self.clock = Box::new(clock);
        self
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    fn path(&self, id: &str) -> Option<PathBuf> {
        self.config
            .journal_dir
            .as_ref()
            .map(|d| d.join(format!("{id}.journal")))
    }

    fn append(&self, id: &str, record: &Record, create: bool) -> Result<(), SessionError> {
        let Some(path) = self.path(id) else {
            return Ok(());
        };
        let mut file = if create {
            File::create_new(&path)?
        } else {
            OpenOptions::new().append(true).open(&path)?
        };
        writeln!(file, "{record}")?;
        file.sync_data()?;
        Ok(())
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, SessionError> {
        self.sessions
            .read()
            .expect("registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    pub fn create(&self, declaration: &str) -> Result<(String, StatusView), SessionError> {
        let record = Session::create_record(declaration, (self.clock)(), self.config.max_worlds)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.append(&id, &record, true)?;
        let session = Session::new(record, self.config.max_worlds)?;
        let status = session.status_view();
        self.sessions
            .write()
            .expect("registry lock")
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok((id, status))
    }

    /// Validates, persists, then applies; writes to one session are
    /// serialized by its lock.
    fn mutate(
        &self,
        id: &str,
        prepare: impl FnOnce(&Session, u64) -> Result<Record, SessionError>,
    ) -> Result<StatusView, SessionError> {
        let handle = self.session(id)?;
        let mut session = handle.lock().expect("session lock");
        let record = prepare(&session, (self.clock)())?;
        self.append(id, &record, false)?;
        session.apply(record)
    }

    pub fn assert(
        &self,
        id: &str,
        lhs: &str,
        rel: &str,
        rhs: &str,
    ) -> Result<StatusView, SessionError> {
        self.mutate(id, |s, ts| s.prepare_assert(ts, lhs, rel, rhs))
    }

    pub fn retract(&self, id: &str, jid: &str) -> Result<StatusView, SessionError> {
        self.mutate(id, |s, ts| s.prepare_retract(ts, jid))
    }

    pub fn snapshot(&self, id: &str) -> Result<Snapshot, SessionError> {
        Ok(self.session(id)?.lock().expect("session lock").snapshot())
    }

    pub fn journal(&self, id: &str) -> Result<Vec<Record>, SessionError> {
        Ok(self
            .session(id)?
            .lock()
            .expect("session lock")
            .journal()
            .to_vec())
    }

    pub fn ids(&self) -> Vec<String> {
        self.sessions
            .read()
            .expect("registry lock")
            .keys()
            .cloned()
            .collect()
    }

    pub fn journal_dir(&self) -> Option<&Path> {
        self.config.journal_dir.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let config = Config {
            journal_dir: Some(dir.path().to_path_buf()),
            ..Config::default()
        };
        let store = Store::open(config.clone()).unwrap().with_clock(|| 42);
        let (id, status) = store.create("worlds: w1 w2").unwrap();
        assert!(status.consistent);
        store.assert(&id, "w1", ">", "w2").unwrap();
        store.assert(&id, "w2", ">", "w1").unwrap();
        let before = store.snapshot(&id).unwrap().status();
        assert!(!before.consistent);

        let text = fs::read_to_string(dir.path().join(format!("{id}.journal"))).unwrap();
        assert_eq!(
            text,
            "space 42 worlds: w1 w2\nassert 42 j1 w1 > w2\nassert 42 j2 w2 > w1\n"
        );
        let reopened = Store::open(config).unwrap();
        assert_eq!(reopened.ids(), vec![id.clone()]);
        assert_eq!(reopened.snapshot(&id).unwrap().status(), before);

        let (other, _) = store.create("worlds: w1 w2").unwrap();
        assert_ne!(id, other);
        assert!(matches!(
            store.assert("nope", "w1", ">", "w2"),
            Err(SessionError::UnknownSession(_))
        ));
    }
}
