//! DAG and undirected-graph structures plus the graph-based routes to the
//! relevant set.

mod dag;
mod iamb;
mod ug;

pub use dag::Dag;
pub use iamb::{markov_boundary_iamb, ug_via_markov_boundaries, MarkovBoundary, MbGraph};
pub use ug::{relevant_via_ug, ug_edge_exclusion, UndirectedGraph};
