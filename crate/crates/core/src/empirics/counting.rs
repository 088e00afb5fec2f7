use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::EmpiricsError;
use crate::sources::{Alphabet, SymbolStream, DEFAULT_DIGIT_CAP};
use crate::Symbol;

/// Tables with at most this many cells are stored densely.
pub const MAX_DENSE_TABLE: u64 = 1 << 24;

enum Table {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

/// Streaming sliding-window counter for blocks of length `k`.
///
/// Symbols above the cap (or every symbol of a countable alphabet above the
/// default cap) send their windows to a single overflow bucket. Counters over
/// `[1, M]` and `[M−k+2, N]` merge to the counter over `[1, N]`.
pub struct BlockCounter {
    k: usize,
    alphabet: Alphabet,
    cap: Option<u64>,
    /// Smallest in-cap symbol and the number of in-cap symbols.
    offset: u64,
    base: u64,
    modulus: u64,
    key: u64,
    table: Table,
    overflow: u64,
    total: u64,
    pos: u64,
    last_overflow: u64,
}

impl BlockCounter {
    /// `cap` is the largest symbol counted individually; a countable alphabet
    /// defaults to [`DEFAULT_DIGIT_CAP`].
    pub fn new(alphabet: Alphabet, k: usize, cap: Option<u64>) -> Result<Self, EmpiricsError> {
        if k == 0 {
            return Err(EmpiricsError::ZeroLength);
        }
        let (offset, base, cap) = match (alphabet, cap) {
            (Alphabet::Finite(n), None) => (0, n, None),
            (Alphabet::Finite(n), Some(c)) => (0, n.min(c.saturating_add(1)), Some(c)),
            (Alphabet::Naturals, c) => {
                let c = c.unwrap_or(DEFAULT_DIGIT_CAP).max(1);
                (1, c, Some(c))
            }
        };
        let modulus = u32::try_from(k)
            .ok()
            .and_then(|e| base.checked_pow(e))
            .ok_or(EmpiricsError::TableTooLarge { base, k })?;
        let table = if modulus <= MAX_DENSE_TABLE {
            Table::Dense(vec![0; modulus as usize])
        } else {
            Table::Sparse(HashMap::new())
        };
        Ok(BlockCounter {
            k,
            alphabet,
            cap,
            offset,
            base,
            modulus,
            key: 0,
            table,
            overflow: 0,
            total: 0,
            pos: 0,
            last_overflow: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn windows(&self) -> u64 {
        self.total
    }

    fn in_cap(&self, s: Symbol) -> bool {
        s >= self.offset && s - self.offset < self.base
    }

    pub fn push(&mut self, s: Symbol) {
        self.pos += 1;
        let code = if self.in_cap(s) {
            s - self.offset
        } else {
            self.last_overflow = self.pos;
            0
        };
        self.key = (self.key % (self.modulus / self.base)) * self.base + code;
        if self.pos < self.k as u64 {
            return;
        }
        self.total += 1;
        if self.last_overflow > 0 && self.last_overflow + self.k as u64 > self.pos {
            self.overflow += 1;
            return;
        }
        match &mut self.table {
            Table::Dense(v) => v[self.key as usize] += 1,
            Table::Sparse(m) => *m.entry(self.key).or_insert(0) += 1,
        }
    }

    pub fn extend(&mut self, xs: &[Symbol]) {
        for &s in xs {
            self.push(s);
        }
    }

    /// Adds the windows counted by `other`.
    pub fn merge(&mut self, other: &BlockCounter) -> Result<(), EmpiricsError> {
        if self.k != other.k || self.base != other.base || self.offset != other.offset {
            return Err(EmpiricsError::ShapeMismatch);
        }
        match (&mut self.table, &other.table) {
            (Table::Dense(a), Table::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (Table::Sparse(a), Table::Sparse(b)) => {
                for (key, c) in b {
                    *a.entry(*key).or_insert(0) += c;
                }
            }
            _ => return Err(EmpiricsError::ShapeMismatch),
        }
        self.overflow += other.overflow;
        self.total += other.total;
        Ok(())
    }

    fn decode(&self, mut key: u64) -> Vec<Symbol> {
        let mut b = vec![0; self.k];
        for slot in b.iter_mut().rev() {
            *slot = key % self.base + self.offset;
            key /= self.base;
        }
        b
    }

    pub fn finish(&self) -> EmpiricalMeasure {
        let mut counts = BTreeMap::new();
        match &self.table {
            Table::Dense(v) => {
                for (key, &c) in v.iter().enumerate() {
                    if c > 0 {
                        counts.insert(self.decode(key as u64), c);
                    }
                }
            }
            Table::Sparse(m) => {
                for (&key, &c) in m {
                    counts.insert(self.decode(key), c);
                }
            }
        }
        EmpiricalMeasure {
            k: self.k,
            alphabet: self.alphabet,
            cap: self.cap,
            counts,
            overflow: self.overflow,
            total: self.total,
        }
    }
}

/// Block counts of one prefix. Blocks never observed are absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub k: usize,
    pub alphabet: Alphabet,
    pub cap: Option<u64>,
    pub counts: BTreeMap<Vec<Symbol>, u64>,
    /// Windows containing a symbol above the cap.
    pub overflow: u64,
    /// Number of windows, `N − k + 1`.
    pub total: u64,
}

impl EmpiricalMeasure {
    pub fn count(&self, block: &[Symbol]) -> u64 {
        self.counts.get(block).copied().unwrap_or(0)
    }

    /// `Fr(B)`; zero when no window has been seen.
    pub fn frequency(&self, block: &[Symbol]) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(block) as f64 / self.total as f64
    }

    pub fn overflow_frequency(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.overflow as f64 / self.total as f64
    }

    /// Blocks made of symbols `≤ cap` (every symbol of a finite alphabet
    /// without a cap).
    pub fn in_cap_symbols(&self) -> Vec<Symbol> {
        self.alphabet.symbols_up_to(self.cap)
    }
}

/// Sliding-window block counts of `x` over windows `1, …, N−k+1`.
pub fn block_frequencies(
    x: &[Symbol],
    alphabet: Alphabet,
    k: usize,
    cap: Option<u64>,
) -> Result<EmpiricalMeasure, EmpiricsError> {
    if k == 0 {
        return Err(EmpiricsError::ZeroLength);
    }
    if x.len() < k {
        return Err(EmpiricsError::PrefixTooShort {
            need: k as u64,
            got: x.len() as u64,
        });
    }
    if let Some(&s) = x.iter().find(|&&s| !alphabet.contains(s)) {
        return Err(EmpiricsError::SymbolOutsideAlphabet(s));
    }
    let mut c = BlockCounter::new(alphabet, k, cap)?;
    c.extend(x);
    Ok(c.finish())
}

/// Counts the next `n` symbols of a stream without storing them.
pub fn count_stream(
    stream: &mut dyn SymbolStream,
    n: u64,
    k: usize,
    cap: Option<u64>,
) -> Result<EmpiricalMeasure, EmpiricsError> {
    if n < k as u64 {
        return Err(EmpiricsError::PrefixTooShort { need: k as u64, got: n });
    }
    let mut c = BlockCounter::new(stream.alphabet(), k, cap)?;
    let mut buf = vec![0; 1 << 16];
    let mut left = n;
    while left > 0 {
        let m = left.min(buf.len() as u64) as usize;
        stream.fill(&mut buf[..m]);
        c.extend(&buf[..m]);
        left -= m as u64;
    }
    Ok(c.finish())
}
