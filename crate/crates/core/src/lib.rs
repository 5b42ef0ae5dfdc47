//! Comparative belief orderings over finite Boolean algebras.
//!
//! The crate decides whether an ordering of events satisfies the
//! qualitative-probability axioms, whether some probability distribution
//! agrees with it exactly, and what a set of distributions compatible with a
//! partial ordering entails. All numeric work is exact rational arithmetic.

pub mod algebra;
pub mod axioms;
pub mod credal;
pub mod error;
pub mod oracle;
pub mod ordering;
pub mod problem;
pub mod rational;
pub mod ratlp;
pub mod realize;

pub use algebra::{parse_sentence, Event, Sentence, Space, SpaceMode, SpaceRef};
pub use credal::{Bounds, CredalSet, Entailment};
pub use error::{Error, Result};
pub use ordering::{
    induced_conditional, induced_ordering, shared, CompleteOrdering, ConditionalStructure,
    Distribution, Judgment, PartialOrdering, Relation,
};
pub use problem::{parse_problem, Problem, ProblemError};
pub use rational::Rational;
pub use realize::{realize_complete, realize_partial, Realizability, Realization};
