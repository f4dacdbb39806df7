//! Single-particle weighted-graph duals of many-boson quantum walks.
//!
//! * [`graph`]: Hermitian weighted graphs and the graph families used throughout.
//! * [`fock`]: bosonic Fock bases, dual graphs and spin-sector bookkeeping.
//! * [`hierarchy`]: expression language for recursively built duals.
//! * [`ctqw`]: spectral continuous-time quantum walk engine and transfer certification.
//! * [`lattice`]: 1D optical-lattice continuum propagation for near-perfect transfer.

pub mod ctqw;
pub mod error;
pub mod fock;
pub mod graph;
pub mod hierarchy;
pub mod lattice;

pub use error::{Error, Result};
