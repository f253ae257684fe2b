//! Finite simple graphs generated by maps acting on finite rings and state
//! spaces, their statistics, and number-theoretic checks of their
//! connectivity.
//!
//! Two distinct states `x` and `y` are joined when some generator sends one to
//! the other. Direction, loops, and repeated edges are discarded.

pub mod error;
pub mod graphcore;
pub mod mapfamily;
pub mod metrics;
pub mod numtheory;
pub mod ringspace;
pub mod survey;
pub mod verify;

pub use error::{Error, Result};
pub use graphcore::{build_graph, GraphSpec, SimpleGraph};
pub use mapfamily::{parse_map, parse_map_list, MapExpr, MapFamily};
pub use metrics::{full_report, NuEstimator, StatsReport};
pub use ringspace::{SpaceKind, SpaceTemplate, State, StateSpace};
pub use survey::{FamilyTemplate, LocusResult};
pub use verify::Verdict;
