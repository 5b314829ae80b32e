//! Stateless model checker for message-passing actor programs.
//!
//! Actors interact only through shared objects: mailboxes with wildcard
//! receives, mutexes, semaphores, and cyclic barriers. The checker explores
//! one execution per equivalence class of the commutation relation (optimal
//! dynamic partial order reduction with wakeup trees), detects deadlocks and
//! crashes, and explains a found bug by locating its *critical transition*,
//! the last step after which the bug is unavoidable.
//!
//! Unlike a classic depth-first ODPOR, exploration here may resume from any
//! pending node of the exploration tree. That random-first order is what the
//! `rfs-step` and `rfs-branch` strategies exploit to reach bugs early in
//! large state spaces; `dfs` and `uniform-dfs` recover the classic order.
//!
//! The crate also ships an exhaustive no-reduction oracle used to validate
//! the reduced explorer trace-for-trace on small inputs, benchmark
//! generators, a line-oriented program DSL, and a CLI (`actmc`).

pub mod bench;
pub mod ctsearch;
pub mod dsl;
pub mod explorer;
pub mod independence;
pub mod model;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod wakeup;

pub use ctsearch::{find_critical_transition, CtReport};
pub use explorer::{Budget, ExploreOptions, Explorer, Outcome, Strategy, StrategyKind, Verdict};
pub use independence::{trace_key, TraceKey};
pub use model::{Action, ActorId, Classification, Execution, Program, SimState};
