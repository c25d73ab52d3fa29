//! Superbubble enumeration for directed acyclic graphs in O(n + m).
//!
//! The pipeline is: load an edge list ([`graph`]), add an artificial source
//! and sink when needed ([`graph::augment`]), order the vertices by DFS
//! ([`topo`]), build furthest-parent/child range structures ([`rmq`]) and
//! run the backwards candidate scan ([`detector`]). [`oracle`] is an
//! independent brute-force enumerator used for differential testing.

pub mod bench;
pub mod candidates;
pub mod detector;
pub mod dot;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod rmq;
pub mod topo;
pub mod verify;

pub use detector::{detect, trace_detect, Superbubble, SuperbubbleReport};
pub use graph::{augment, load_edge_list, parse_edge_list, AugmentedGraph, Graph, GraphError, VertexId};
pub use topo::{topological_sort, TopoError, TopoOrder};
