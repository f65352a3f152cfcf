//! Maximal clique ("complete graph") mining over spatial point sets with a
//! τ-sized grid, conversion of cliques into complex relationship
//! transactions, and interesting itemset mining over those transactions.
//!
//! The usual flow is
//! [`ingest`] or [`synth`] → [`clique`] → [`relation`] → [`itemset`], with
//! [`pipeline`] wiring the stages to the file formats in [`io`].

pub mod bench;
pub mod clique;
pub mod error;
pub mod exec;
pub mod grid;
pub mod ingest;
pub mod io;
pub mod itemset;
pub mod model;
pub mod pipeline;
pub mod relation;
pub mod synth;

pub use clique::{
    brute_force_maximal_cliques, build_neighborhoods, cardinality_histogram, faithful_prune, grid_neighborhoods,
    mine_maximal_cliques, CliqueSet, MaximalClique, NeighborhoodList,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{CellKey, GridIndex};
pub use itemset::{brute_force_itemsets, mine_interesting, InterestingPattern, Thresholds, TransactionDb};
pub use model::{edge_count, euclidean_distance, Dataset, Dims, NeighborGraph, ObjectType, SpatialObject};
pub use pipeline::PipelineConfig;
pub use relation::{extract_relationship, strip_identifiers, ComplexRelationship, Item, Polarity};
