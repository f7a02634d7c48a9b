//! Session-level reasoning on top of the solver: which values remain
//! valid, which are implied, why a set of choices conflicts, stepping
//! through models, and the incremental bound driver for `*` features.

mod bounds;
mod mus;
mod session;
mod view;

pub use bounds::{incremental_solve, BoundedSolution, BoundsError, IncrementalBounds};
pub use mus::{minimal_unsat_subset, MusReport};
pub use session::{AssumptionEntry, Direction, SessionState};
pub use view::{AssumptionView, AttributeView, PartView, SessionView};

use crate::space::Value;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InteractiveError {
    #[error("the assumptions are satisfiable, there is no conflict to explain")]
    Satisfiable,
    #[error("the assumptions are unsatisfiable")]
    Unsatisfiable,
    #[error("no further models")]
    Exhausted,
    #[error("unknown variable `{0}`")]
    UnknownTarget(String),
    #[error("`{0}` is not an attribute variable")]
    NotAnAttribute(String),
    #[error("`{0}` is not an optional part")]
    NotAPart(String),
    #[error("{value} is not in the domain of `{target}`")]
    ValueOutOfDomain { target: String, value: Value },
    #[error("no assumption with id {0}")]
    UnknownAssumption(u64),
    #[error("internal error: {0}")]
    Internal(String),
}
