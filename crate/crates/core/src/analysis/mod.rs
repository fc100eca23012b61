//! Structural oracles for auditing decoder runs: the syndrome adjacency
//! graph, residual classification, α-subsets, witnesses and exhaustive
//! decoding. The exponential searches here are test oracles only.

mod adjacency;
mod classify;
mod locality;

pub use adjacency::{
    build_syndrome_graph, connected_components, degree_bound, find_witness, max_conn_alpha, MaxConn,
    SyndromeAdjacencyGraph, DEFAULT_SEARCH_CAP,
};
pub use classify::{
    brute_force_decode, classify, residual_noise_bound, reduced_weight, Classification, Classifier, ResidualBoundAudit,
    NormalizedWeight, OutcomeClass, COSET_ENUMERATION_MAX_RANK,
};
pub use locality::locality_check;
