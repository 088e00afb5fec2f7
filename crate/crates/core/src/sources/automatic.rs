use super::{Alphabet, SourceError, Symbol, SymbolStream};

/// `x_n = 1` iff the 2-adic valuation of `n` is even (`n ≥ 1`).
pub fn garcia_hedlund_symbol(n: u64) -> Symbol {
    debug_assert!(n >= 1);
    n.trailing_zeros().is_multiple_of(2) as Symbol
}

/// `x_n = 1` iff `n − 1` has an odd number of ones in binary (`n ≥ 1`).
pub fn thue_morse_symbol(n: u64) -> Symbol {
    debug_assert!(n >= 1);
    ((n - 1).count_ones() % 2) as Symbol
}

/// The regular Toeplitz sequence `101110101011…`.
#[derive(Debug, Clone, Default)]
pub struct GarciaHedlundStream {
    pos: u64,
}

impl GarciaHedlundStream {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SymbolStream for GarciaHedlundStream {
    fn alphabet(&self) -> Alphabet {
        Alphabet::binary()
    }

    fn next_symbol(&mut self) -> Symbol {
        self.pos += 1;
        garcia_hedlund_symbol(self.pos)
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

#[derive(Debug, Clone, Default)]
pub struct ThueMorseStream {
    pos: u64,
}

impl ThueMorseStream {
    pub fn new() -> Self {
        Self::default()
    }
}

impl SymbolStream for ThueMorseStream {
    fn alphabet(&self) -> Alphabet {
        Alphabet::binary()
    }

    fn next_symbol(&mut self) -> Symbol {
        self.pos += 1;
        thue_morse_symbol(self.pos)
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

/// `x_n = pattern[(n−1) mod len]`.
#[derive(Debug, Clone)]
pub struct PeriodicStream {
    pattern: Vec<Symbol>,
    alphabet: Alphabet,
    pos: u64,
}

impl PeriodicStream {
    /// The alphabet is the smallest `{0, …, n−1}` (with `n ≥ 2`) holding the
    /// pattern.
    pub fn new(pattern: Vec<Symbol>) -> Result<Self, SourceError> {
        let max = *pattern.iter().max().ok_or(SourceError::EmptyPattern)?;
        let alphabet = Alphabet::finite((max + 1).max(2))?;
        Ok(PeriodicStream {
            pattern,
            alphabet,
            pos: 0,
        })
    }

    pub fn pattern(&self) -> &[Symbol] {
        &self.pattern
    }
}

impl SymbolStream for PeriodicStream {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_symbol(&mut self) -> Symbol {
        let s = self.pattern[(self.pos % self.pattern.len() as u64) as usize];
        self.pos += 1;
        s
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::SymbolStreamExt;

    fn render(xs: &[Symbol]) -> String {
        xs.iter().map(|d| char::from(b'0' + *d as u8)).collect()
    }

    #[test]
    fn garcia_hedlund_prefix() {
        let xs = GarciaHedlundStream::new().take_prefix(12);
        assert_eq!(render(&xs), "101110101011");
        assert_eq!(garcia_hedlund_symbol(1), 1);
        assert_eq!(garcia_hedlund_symbol(2), 0);
        assert_eq!(garcia_hedlund_symbol(4), 1);
    }

    #[test]
    fn garcia_hedlund_matches_stepwise_filling() {
        // Step j fills positions ≡ 2^(j−1) mod 2^j with 1 for odd j and 0 for even j.
        let n = 1 << 12;
        let mut filled = vec![None; n + 1];
        for j in 1..=13u32 {
            let modulus = 1u64 << j;
            let residue = 1u64 << (j - 1);
            let sym = (j % 2) as Symbol;
            for (pos, slot) in filled.iter_mut().enumerate().skip(1) {
                if pos as u64 % modulus == residue {
                    *slot = Some(sym);
                }
            }
        }
        let xs = GarciaHedlundStream::new().take_prefix(n);
        for (i, x) in xs.iter().enumerate() {
            assert_eq!(Some(*x), filled[i + 1], "position {}", i + 1);
        }
    }

    #[test]
    fn garcia_hedlund_is_invariant_under_tripling() {
        for n in 1..=100_000u64 {
            assert_eq!(garcia_hedlund_symbol(3 * n), garcia_hedlund_symbol(n));
        }
    }

    #[test]
    fn thue_morse_prefix_and_recursion() {
        let xs = ThueMorseStream::new().take_prefix(16);
        assert_eq!(render(&xs), "0110100110010110");
        assert_eq!(&xs[..4], &[0, 1, 1, 0]);
        for n in 1..=100_000u64 {
            assert_eq!(thue_morse_symbol(2 * n - 1), thue_morse_symbol(n));
            assert_eq!(thue_morse_symbol(2 * n), 1 - thue_morse_symbol(n));
        }
    }

    #[test]
    fn periodic_patterns() {
        assert_eq!(
            render(&PeriodicStream::new(vec![0, 0, 1, 1]).unwrap().take_prefix(8)),
            "00110011"
        );
        assert_eq!(
            render(&PeriodicStream::new(vec![0, 1]).unwrap().take_prefix(4)),
            "0101"
        );
        let mut c = PeriodicStream::new(vec![1]).unwrap();
        assert!(c.take_prefix(100).iter().all(|&v| v == 1));
        assert_eq!(c.alphabet(), Alphabet::Finite(2));
        assert!(matches!(
            PeriodicStream::new(vec![]),
            Err(SourceError::EmptyPattern)
        ));
    }
}
