//! In-memory topology graph and property-path evaluation.

mod automaton;
mod eval;
mod graph;
mod join_baseline;
mod path;

pub use automaton::{Dfa, DfaState, Label};
pub use eval::{NodeSpec, Parallelism, ReachResult, TraversalStats};
pub use graph::TopologyGraph;
pub use join_baseline::JoinResult;
pub use path::{Direction, PathExpr, PathPattern};
