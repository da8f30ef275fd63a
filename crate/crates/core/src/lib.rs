//! Path cohomology, Hodge theory, heat semigroups and lazy random walks on
//! finite digraphs.

pub mod cli;
pub mod complex;
pub mod digraph;
pub mod error;
pub mod heat;
pub mod hodge;
pub mod linalg;
pub mod oracle;
pub mod sparse;
pub mod walk;

pub use error::{Error, Result};
pub use nalgebra;
