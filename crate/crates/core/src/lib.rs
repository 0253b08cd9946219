//! Finite combinatorics of big Ramsey degrees for free amalgamation classes
//! `Forb(F)` in binary languages: coding trees, age maps, aged embeddings,
//! envelopes, critical levels, nice embeddings and degree bounds.

pub mod aemb;
pub mod agemap;
pub mod cli;
pub mod degrees;
pub mod envelope;
pub mod error;
pub mod fixtures;
pub mod forb;
pub mod io;
pub mod limit;
pub mod nice;
pub mod par;
mod search;
pub mod structure;
pub mod tree;

pub use error::{Error, Result};
