//! Combinatorics of fermionic configurations on `Z^d`.

mod ball;
mod classes;
mod cluster;
mod config;
mod lattice;
mod separation;

pub use ball::{ball, boundaries, Boundaries, Domain, FermiBall};
pub use classes::{equivalence_key, monocluster_shapes, shift_equivalence_classes, ClassKey};
pub use cluster::{r_clusters, ClusterDecomposition};
pub use config::{FermiConfig, Site};
pub use lattice::{distances_from, graph_distance, Lattice, SiteNorm};
pub use separation::{weakly_separated, Cube, Witness};
