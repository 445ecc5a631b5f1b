//! Hierarchical landmark-based object search over road networks.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: road-network storage, DIMACS ingestion and the Dijkstra variants
//!   used by index construction.
//! - [`partition`]: recursive balanced b-way partitioning.
//! - [`sultree`]: the SUL-Tree, a partition hierarchy whose nodes carry local
//!   landmarks and Subgraph Distance Lists (SDLs).
//! - [`coltree`]: the COL-Tree, a compaction of a SUL-Tree over an object set
//!   with sorted Object Distance Lists (ODLs) in its leaves.
//! - [`distoracle`]: exact point-to-point distance backends.
//! - [`query`]: AkNN, kFN, range and kNN search over COL-Trees.
//! - [`baselines`]: brute force, AUB and IER competitors.
//! - [`experiment`]: workload generation, synthetic graphs and the CSV benchmark
//!   driver.
//!
//! Vertex ids are dense `u32`s. Network distances are `u64` ([`Dist`]).

pub mod baselines;
mod bounds;
pub mod coltree;
pub mod distoracle;
mod error;
pub mod experiment;
pub mod graph;
pub mod partition;
pub mod query;
pub mod stats;
pub mod sultree;

pub use coltree::{ColTree, NodeBounds};
pub use distoracle::{BackendKind, DistanceBackend};
pub use error::{Error, Result};
pub use graph::{Dist, RoadGraph, VertexId, INFINITY};
pub use query::{AggregateFunction, Neighbor, RangeOutput, RankedOutput};
pub use stats::QueryStats;
pub use sultree::{LandmarkPolicy, SulParams, SulTree};
