//! Finite groups, crossed modules and lifting constructions over them.

pub mod error;
pub mod group;
pub mod words;
pub mod action;
pub mod xmod;
pub mod sse;
pub mod lifting;
pub mod condp;
pub mod corpus;

pub use error::{Error, Result};
