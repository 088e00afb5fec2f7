//! Building blocks for experiments on normality along subsequences.
//!
//! A sequence `x` over a finite or countable alphabet is *μ-normal* when every
//! block occurs in it with frequency equal to the μ-measure of the matching
//! cylinder. This crate provides:
//!
//! * [`sources`]: seeded, replayable symbol streams (Bernoulli, Markov,
//!   continued-fraction digits under the Gauss measure, Toeplitz and
//!   Thue–Morse sequences, periodic and product streams) and the explicit
//!   constructions that keep or break normality along a set.
//! * [`selectors`]: subsets `S ⊂ ℕ`, restriction `x|_S`, density profiles,
//!   the superficial decomposition and entropy-based determinism proxies.
//! * [`empirics`]: streaming block and wildcard-pattern counting, normality
//!   defects and joint tables of double sequences.
//! * [`measures`]: exact cylinder and spread-block measures, the spread-block
//!   witness search and predicted limiting frequencies along a set.

pub mod empirics;
pub mod linalg;
pub mod measures;
pub mod selectors;
pub mod sources;

pub use sources::{Alphabet, Symbol, SymbolStream};
