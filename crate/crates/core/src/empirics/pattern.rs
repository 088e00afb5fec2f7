use serde::{Deserialize, Serialize};

use super::EmpiricsError;
use crate::measures::SpreadBlock;
use crate::Symbol;

/// Symbols required at fixed offsets of a window, all other positions free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WildcardPattern {
    offsets: Vec<u64>,
    symbols: Vec<Symbol>,
}

impl WildcardPattern {
    /// Offsets start at 0 and increase strictly.
    pub fn new(offsets: Vec<u64>, symbols: Vec<Symbol>) -> Result<Self, EmpiricsError> {
        if offsets.is_empty()
            || offsets.len() != symbols.len()
            || offsets[0] != 0
            || offsets.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(EmpiricsError::BadPattern);
        }
        Ok(WildcardPattern { offsets, symbols })
    }

    pub fn from_spread_block(sb: &SpreadBlock) -> Self {
        WildcardPattern {
            offsets: sb.offsets(),
            symbols: sb.block.clone(),
        }
    }

    /// A block with no free positions.
    pub fn contiguous(block: &[Symbol]) -> Result<Self, EmpiricsError> {
        Self::new((0..block.len() as u64).collect(), block.to_vec())
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Window length: last offset plus one.
    pub fn span(&self) -> u64 {
        self.offsets[self.offsets.len() - 1] + 1
    }

    fn matches_at(&self, x: &[Symbol], start: usize) -> bool {
        self.offsets
            .iter()
            .zip(&self.symbols)
            .all(|(&o, &s)| x[start + o as usize] == s)
    }
}

/// Fraction of windows of length `span` whose fixed offsets match.
pub fn pattern_frequency(x: &[Symbol], pattern: &WildcardPattern) -> Result<f64, EmpiricsError> {
    let span = pattern.span() as usize;
    if x.len() < span {
        return Err(EmpiricsError::PrefixTooShort {
            need: span as u64,
            got: x.len() as u64,
        });
    }
    let windows = x.len() - span + 1;
    let hits = (0..windows).filter(|&i| pattern.matches_at(x, i)).count();
    Ok(hits as f64 / windows as f64)
}

/// Streaming pattern counter over a ring buffer of the last `span` symbols.
pub struct PatternCounter {
    pattern: WildcardPattern,
    ring: Vec<Symbol>,
    pos: u64,
    hits: u64,
}

impl PatternCounter {
    pub fn new(pattern: WildcardPattern) -> Self {
        let span = pattern.span() as usize;
        PatternCounter {
            pattern,
            ring: vec![0; span],
            pos: 0,
            hits: 0,
        }
    }

    pub fn push(&mut self, s: Symbol) {
        let span = self.ring.len() as u64;
        self.ring[(self.pos % span) as usize] = s;
        self.pos += 1;
        if self.pos < span {
            return;
        }
        let start = self.pos - span;
        let matched = self
            .pattern
            .offsets
            .iter()
            .zip(&self.pattern.symbols)
            .all(|(&o, &sym)| self.ring[((start + o) % span) as usize] == sym);
        if matched {
            self.hits += 1;
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn windows(&self) -> u64 {
        (self.pos + 1).saturating_sub(self.ring.len() as u64)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn frequency(&self) -> f64 {
        match self.windows() {
            0 => 0.0,
            w => self.hits as f64 / w as f64,
        }
    }
}

/// `(n, frequency over the first n symbols)` at each checkpoint with
/// `span ≤ n ≤ N`, in increasing order.
pub fn running_frequency_series(
    x: &[Symbol],
    pattern: &WildcardPattern,
    checkpoints: &[u64],
) -> Vec<(u64, f64)> {
    let mut cps: Vec<u64> = checkpoints
        .iter()
        .copied()
        .filter(|&n| n >= pattern.span() && n <= x.len() as u64)
        .collect();
    cps.sort_unstable();
    cps.dedup();
    let mut counter = PatternCounter::new(pattern.clone());
    let mut out = Vec::with_capacity(cps.len());
    let mut next = cps.into_iter().peekable();
    for &s in x {
        counter.push(s);
        while next.peek() == Some(&counter.position()) {
            next.next();
            out.push((counter.position(), counter.frequency()));
        }
    }
    out
}
