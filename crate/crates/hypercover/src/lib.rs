//! Simulator and verification library for a deterministic distributed
//! primal-dual approximation of minimum weight vertex cover in hypergraphs
//! of bounded rank (equivalently, weighted set cover with bounded element
//! frequency).
//!
//! The crate executes the algorithm message-by-message over the logical
//! bipartite vertex/edge network, using exact rational arithmetic for all
//! dual values, and re-checks every analytical claim (dual feasibility, the
//! per-vertex deal vault, raise/stuck counters, the approximation-ratio
//! certificate, and the per-message bit budget) on every run.

pub mod congest;
pub mod engine;
pub mod fixpoint;
pub mod gen;
pub mod hypergraph;
pub mod params;
pub mod rat;
pub mod record;
pub mod verify;

pub use hypergraph::{DegreeStats, Hypergraph, SetSystem};
pub use params::{AlphaMode, Params};
pub use rat::Rat;
