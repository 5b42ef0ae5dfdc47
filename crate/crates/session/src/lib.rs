//! Incremental elicitation sessions.
//!
//! A session holds a space and an append-only journal of judgment
//! assertions and retractions. Its state — the active judgments, their
//! consistency, and every query answer — is a function of the journal, so
//! replaying a journal reproduces the session exactly.

pub mod error;
pub mod http;
pub mod journal;
pub mod session;
pub mod store;
pub mod view;

pub use error::SessionError;
pub use journal::{parse_journal, render_journal, Record};
pub use session::{Session, Snapshot, DEFAULT_MAX_WORLDS};
pub use store::{Config, Store};
