//! Hypergraph-product codes from bipartite expanders and small-set-flip
//! decoding under local stochastic noise.

pub mod analysis;
pub mod bitset;
pub mod code;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod noise;

pub use bitset::BitSet;
pub use code::{build_code, CodeRef, CssCode, QubitLabel};
pub use error::{Error, Result};
pub use graph::{sample_biregular, BipartiteGraph, Side};
