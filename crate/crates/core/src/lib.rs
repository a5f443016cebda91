//! Enumeration of cost-bounded minimal Steiner trees through a
//! frontier-based BDD.
//!
//! The usual entry point is [`pipeline::run`], which simplifies the graph,
//! restricts it to the union of a few heuristic seed trees, builds and
//! reduces the BDD, and returns the cheapest trees mapped back to the input.

pub mod bdd;
pub mod frontier;
pub mod graph;
pub mod oracle;
pub mod order;
pub mod pipeline;
pub mod seed;
pub mod simplify;
pub mod stp;
pub mod traverse;
pub mod tree;

pub use bdd::{Bdd, BddNode, NodeId, Target};
pub use frontier::{construct, ConstructError, ConstructOptions, ConstructStats};
pub use graph::{Cost, Edge, Graph, GraphError, Vertex, UNBOUNDED};
pub use order::{EdgeOrder, StartRule};
pub use pipeline::{run, Report, RunConfig, RunOutput, Theta};
pub use seed::{select_seeds, SeedConfig, SeedRoot};
pub use simplify::{simplify, SimplificationMap};
pub use stp::{parse_stp, write_stp, ParseError};
pub use traverse::{enumerate, EnumerateOptions, EnumerateStats};
pub use tree::{validate_tree, SteinerTree};
