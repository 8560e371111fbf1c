//! Balanced supersaturation machinery for r-uniform hypergraphs.
//!
//! The crate is organized around a small pipeline: [`hypergraph`] holds the
//! host-graph representation and samplers, [`pattern`] computes density
//! exponents of a forbidden pattern, [`enumerate`] finds copies of the
//! pattern in a host, [`family`] builds and certifies balanced copy
//! families, and [`turan`] runs exact and experimental Turán computations.

pub mod enumerate;
pub mod error;
pub mod family;
pub mod hypergraph;
pub mod pattern;
pub mod turan;

pub use error::Error;
pub use hypergraph::{EdgeSet, Hypergraph};
pub use pattern::Pattern;

pub type Result<T> = std::result::Result<T, Error>;
