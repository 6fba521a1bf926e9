//! Search of partially ordered sets, sorted arrays and sorted lists, with
//! classical algorithms and amplitude-level simulations of their quantum
//! counterparts.
//!
//! Every search algorithm talks to hidden data through an oracle session
//! from [`oracle`], which keeps a [`oracle::QueryLedger`] of classical and
//! quantum queries. Quantum subroutines are simulated in the two-dimensional
//! marked/unmarked subspace by [`qsim`].

pub mod abstract_search;
pub mod array;
pub mod concrete_search;
pub mod error;
pub mod intersect;
pub mod oracle;
pub mod par;
pub mod poset;
pub mod qsim;
pub mod stats;

pub use error::{Error, Result};
pub use poset::{ChainDecomposition, Element, ElementSet, Poset};
