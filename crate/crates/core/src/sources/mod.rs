//! Seeded symbol streams.
//!
//! Streams are indexed from 1: the first call to [`SymbolStream::next_symbol`]
//! returns `x_1`. [`SymbolStream::position`] is the index of the last symbol
//! emitted (0 before the first call).

mod automatic;
mod construct;
mod gauss;
mod product;
mod random;

pub use automatic::{
    garcia_hedlund_symbol, thue_morse_symbol, GarciaHedlundStream, PeriodicStream, ThueMorseStream,
};
pub use construct::{
    build_density_zero_spoiler, build_preserving_pair, members_as_intervals, PreservingPairStream,
    SpoilerMode, SpoilerStream, SpoilerWindow, WindowSchedule, LOWER_DENSITY_ZERO_TOL,
};
pub use gauss::{gauss_digit_measure, GaussDigitStream, GaussMirrorState};
pub use product::{PairCode, ProductStream, ProjectionStream};
pub use random::{rng_from_seed, BernoulliStream, Initial, MarkovStream, Weights};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;

/// Symbols of every alphabet are nonnegative integers.
pub type Symbol = u64;

/// `Finite(n)` is `{0, …, n−1}`; `Naturals` is `{1, 2, …}` (continued
/// fraction digits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alphabet {
    Finite(u64),
    Naturals,
}

impl Alphabet {
    pub fn finite(size: u64) -> Result<Self, SourceError> {
        if size < 2 {
            return Err(SourceError::AlphabetTooSmall(size));
        }
        Ok(Alphabet::Finite(size))
    }

    pub fn binary() -> Self {
        Alphabet::Finite(2)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        match *self {
            Alphabet::Finite(n) => s < n,
            Alphabet::Naturals => s >= 1,
        }
    }

    /// The filler symbol used by constructions.
    pub fn first_symbol(&self) -> Symbol {
        match self {
            Alphabet::Finite(_) => 0,
            Alphabet::Naturals => 1,
        }
    }

    pub fn size(&self) -> Option<u64> {
        match *self {
            Alphabet::Finite(n) => Some(n),
            Alphabet::Naturals => None,
        }
    }

    /// Symbols up to and including `cap` (all of them for finite alphabets
    /// when `cap` is `None`).
    pub fn symbols_up_to(&self, cap: Option<u64>) -> Vec<Symbol> {
        match (*self, cap) {
            (Alphabet::Finite(n), None) => (0..n).collect(),
            (Alphabet::Finite(n), Some(c)) => (0..n.min(c.saturating_add(1))).collect(),
            (Alphabet::Naturals, Some(c)) => (1..=c).collect(),
            (Alphabet::Naturals, None) => (1..=DEFAULT_DIGIT_CAP).collect(),
        }
    }
}

/// Default reporting cap for countable alphabets.
pub const DEFAULT_DIGIT_CAP: u64 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SourceError {
    #[error("alphabet must have at least 2 symbols, got {0}")]
    AlphabetTooSmall(u64),
    #[error("weights sum to {0}, expected 1 within 1e-12")]
    NotNormalized(f64),
    #[error("weight {0} is negative or not finite")]
    BadWeight(f64),
    #[error("alphabet has {alphabet} symbols but {weights} weights were given")]
    AlphabetMismatch { alphabet: u64, weights: usize },
    #[error("geometric parameter must lie in (0, 1], got {0}")]
    BadGeometric(f64),
    #[error("pattern must be non-empty")]
    EmptyPattern,
    #[error("initial distribution has {got} entries for {states} states")]
    InitialLength { states: usize, got: usize },
    #[error("symbol {0} is not in the alphabet")]
    SymbolOutsideAlphabet(Symbol),
    #[error(transparent)]
    Chain(#[from] LinalgError),
    #[error("inconsistent decomposition: {0}")]
    Decomposition(String),
    #[error("selection set has positive lower density (estimate {0}); the spoiler construction needs lower density 0")]
    PositiveLowerDensity(f64),
    #[error("mirror state must lie in [0, 1), got {0}")]
    MirrorState(f64),
}

/// Tolerance on the total mass of probability vectors.
pub const WEIGHT_TOL: f64 = 1e-12;

pub(crate) fn check_distribution(w: &[f64]) -> Result<(), SourceError> {
    if let Some(&bad) = w.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(SourceError::BadWeight(bad));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(SourceError::NotNormalized(sum));
    }
    Ok(())
}

pub trait SymbolStream: Send {
    fn alphabet(&self) -> Alphabet;

    fn next_symbol(&mut self) -> Symbol;

    fn position(&self) -> u64;

    fn fill(&mut self, buf: &mut [Symbol]) {
        for slot in buf {
            *slot = self.next_symbol();
        }
    }
}

pub type BoxStream = Box<dyn SymbolStream>;

impl<S: SymbolStream + ?Sized> SymbolStream for Box<S> {
    fn alphabet(&self) -> Alphabet {
        (**self).alphabet()
    }

    fn next_symbol(&mut self) -> Symbol {
        (**self).next_symbol()
    }

    fn position(&self) -> u64 {
        (**self).position()
    }

    fn fill(&mut self, buf: &mut [Symbol]) {
        (**self).fill(buf)
    }
}

pub trait SymbolStreamExt: SymbolStream {
    /// The next `n` symbols.
    fn take_prefix(&mut self, n: usize) -> Vec<Symbol> {
        let mut out = vec![0; n];
        self.fill(&mut out);
        out
    }

    fn boxed(self) -> BoxStream
    where
        Self: Sized + 'static,
    {
        Box::new(self)
    }
}

impl<S: SymbolStream + ?Sized> SymbolStreamExt for S {}

/// A finite buffer replayed as a stream; panics when exhausted.
#[derive(Debug, Clone)]
pub struct VecStream {
    alphabet: Alphabet,
    data: Vec<Symbol>,
    pos: u64,
}

impl VecStream {
    pub fn new(alphabet: Alphabet, data: Vec<Symbol>) -> Result<Self, SourceError> {
        if let Some(&s) = data.iter().find(|s| !alphabet.contains(**s)) {
            return Err(SourceError::SymbolOutsideAlphabet(s));
        }
        Ok(VecStream {
            alphabet,
            data,
            pos: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

impl SymbolStream for VecStream {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_symbol(&mut self) -> Symbol {
        let s = *self
            .data
            .get(self.pos as usize)
            .expect("finite stream exhausted");
        self.pos += 1;
        s
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

/// Constant stream, handy in tests and as a product factor.
#[derive(Debug, Clone)]
pub struct ConstantStream {
    alphabet: Alphabet,
    symbol: Symbol,
    pos: u64,
}

impl ConstantStream {
    pub fn new(alphabet: Alphabet, symbol: Symbol) -> Result<Self, SourceError> {
        if !alphabet.contains(symbol) {
            return Err(SourceError::SymbolOutsideAlphabet(symbol));
        }
        Ok(ConstantStream {
            alphabet,
            symbol,
            pos: 0,
        })
    }
}

impl SymbolStream for ConstantStream {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_symbol(&mut self) -> Symbol {
        self.pos += 1;
        self.symbol
    }

    fn position(&self) -> u64 {
        self.pos
    }
}
