//! Exact tools for alternating forms with maximal isotropic decomposable
//! subspaces: structural analysis, complementary isotropic subspaces,
//! canonical representations, and Moser-type flattening of closed
//! polynomial forms.

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod exterior;
pub mod flatten;
pub mod io;
pub mod isotropic;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod report;
pub mod search;

pub use error::{Error, Result};
pub use exterior::{AlternatingForm, IndexTuple, Splitting, Subspace, Vector};
pub use rational::Q;
