//! Enumeration of discrete structures up to isomorphism.
//!
//! Build a [`Domain`] from building blocks, then iterate it, sample it, or
//! enumerate one canonical representative per isomorphism class with
//! [`cnfs`]. [`Pipeline`] chains transformations and an action on top and
//! runs serially or on a worker pool.

pub mod cnf;
pub mod domain;
pub mod error;
pub mod parallel;
pub mod pipeline;
pub mod problems;
pub mod value;

pub use cnf::{cnfs, is_canonical};
pub use domain::Domain;
pub use error::{Error, Result};
pub use parallel::PoolConfig;
pub use pipeline::{ExecutionContext, Output, Pipeline};
pub use value::{Atom, Permutation, Uset, Value};
