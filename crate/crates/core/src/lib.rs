//! Exact matrix representations of sofic measures.
//!
//! The crate covers Markov and linearly representable measures and the
//! conversions between them, Bernoulli convolutions in integer and Pisot
//! bases, normalization transducers with representation counting, and
//! finite-horizon density spectra of integer sequences.

pub mod algebra;
pub mod automata;
pub mod bernoulli;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod pisot;
pub mod rational;
pub mod sofic;
pub mod spectrum;
pub mod words;

pub use error::{Error, Result};
