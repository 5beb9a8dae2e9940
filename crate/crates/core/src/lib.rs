//! Ranks of finite relational models and square degrees of truncated tree
//! families, with the encodings, constructions and searches that connect
//! them.

pub mod builder;
pub mod coloring;
pub mod encode;
pub mod error;
pub mod rank;
pub mod rectrank;
pub mod search;
pub mod structure;
pub mod tree;
pub mod treedeg;

pub use error::{Error, Result};
