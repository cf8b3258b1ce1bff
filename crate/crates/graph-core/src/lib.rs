//! Weighted communication graphs with port numbering, random generators and the
//! sequential oracles (MST, hop diameter, cluster graphs) used for verification.

mod cluster;
mod error;
mod generate;
mod graph;
mod io;
mod oracle;

pub use cluster::{
    induced_cluster_graph, validate_partition, ClusterGraph, ClusterId, ClusterStats, Partition,
    PartitionReport,
};
pub use error::GraphError;
pub use generate::{generate_graph, GraphKind, MAX_RETRIES};
pub use graph::{Edge, NodeId, Port, PortId, Topology, Weight, WeightedGraph};
pub use io::{dump_edges, parse_graph, write_graph};
pub use oracle::{canonical_edge_set, eccentricity, hop_diameter, kruskal_mst, tree_diameter, Dsu};
