//! Universal treasure hunt and rendezvous for mobile agents in anonymous
//! port-numbered graphs whose nodes may have finite or countably infinite
//! degree.
//!
//! * [`graph`]: finite graphs, lazy infinite generators, validation.
//! * [`path`]: path types and values, and the orders agents enumerate.
//! * [`hunt`]: the treasure hunt agent.
//! * [`oracle`]: brute-force character, weight and critical-path oracles.
//! * [`rendezvous`]: label tapes, the per-bit scheduler, and the two-agent
//!   synchronous simulator.
//! * [`experiments`]: reports and batch suites behind the `portwalk` CLI.

pub mod experiments;
pub mod graph;
pub mod hunt;
pub mod oracle;
pub mod path;
pub mod rendezvous;
pub mod scalar;

/// Exact type value; unbounded.
pub type Value = num_bigint::BigUint;

/// Fixed-width value used by the simulators. All arithmetic on it is checked.
pub type FastValue = u128;

/// Type stream over exact values.
pub type ExactTypeStream = path::TypeStream<Value>;

/// Type stream over fixed-width values.
pub type FastTypeStream = path::TypeStream<FastValue>;

pub use graph::{AnyGraph, Degree, GraphError, NodeId, Port, PortGraph};
pub use path::{EnumMode, Path, PathType};
