use serde::{Deserialize, Serialize};

use super::{Alphabet, BoxStream, Symbol, SymbolStream};

/// Encoding of symbol pairs `(a, b) ∈ Λ₁ × Λ₂` as single symbols.
///
/// When `Λ₂` is finite with `n₂` letters the code is `a·n₂ + b`; otherwise the
/// Cantor pairing `(a+b)(a+b+1)/2 + b` is used. Both are bijections onto the
/// reported alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCode {
    pub first: Alphabet,
    pub second: Alphabet,
}

impl PairCode {
    pub fn new(first: Alphabet, second: Alphabet) -> Self {
        PairCode { first, second }
    }

    pub fn alphabet(&self) -> Alphabet {
        match (self.first, self.second) {
            (Alphabet::Finite(a), Alphabet::Finite(b)) => Alphabet::Finite(a * b),
            _ => Alphabet::Naturals,
        }
    }

    pub fn encode(&self, a: Symbol, b: Symbol) -> Symbol {
        match self.second {
            Alphabet::Finite(n2) => a * n2 + b,
            Alphabet::Naturals => {
                let s = a + b;
                s * (s + 1) / 2 + b
            }
        }
    }

    pub fn decode(&self, c: Symbol) -> (Symbol, Symbol) {
        match self.second {
            Alphabet::Finite(n2) => (c / n2, c % n2),
            Alphabet::Naturals => {
                // largest s with s(s+1)/2 ≤ c
                let mut s = (((8.0 * c as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
                while s * (s + 1) / 2 > c {
                    s -= 1;
                }
                while (s + 1) * (s + 2) / 2 <= c {
                    s += 1;
                }
                let b = c - s * (s + 1) / 2;
                (s - b, b)
            }
        }
    }
}

/// Column pairs `(s1_n, s2_n)`, coded by [`PairCode`].
pub struct ProductStream {
    first: BoxStream,
    second: BoxStream,
    code: PairCode,
    pos: u64,
}

impl ProductStream {
    pub fn new(first: BoxStream, second: BoxStream) -> Self {
        let code = PairCode::new(first.alphabet(), second.alphabet());
        ProductStream {
            first,
            second,
            code,
            pos: 0,
        }
    }

    pub fn code(&self) -> PairCode {
        self.code
    }
}

impl SymbolStream for ProductStream {
    fn alphabet(&self) -> Alphabet {
        self.code.alphabet()
    }

    fn next_symbol(&mut self) -> Symbol {
        self.pos += 1;
        let a = self.first.next_symbol();
        let b = self.second.next_symbol();
        self.code.encode(a, b)
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

/// One row of a pair-coded stream.
pub struct ProjectionStream {
    inner: BoxStream,
    code: PairCode,
    second: bool,
}

impl ProjectionStream {
    pub fn first(inner: BoxStream, code: PairCode) -> Self {
        ProjectionStream {
            inner,
            code,
            second: false,
        }
    }

    pub fn second(inner: BoxStream, code: PairCode) -> Self {
        ProjectionStream {
            inner,
            code,
            second: true,
        }
    }
}

impl SymbolStream for ProjectionStream {
    fn alphabet(&self) -> Alphabet {
        if self.second {
            self.code.second
        } else {
            self.code.first
        }
    }

    fn next_symbol(&mut self) -> Symbol {
        let (a, b) = self.code.decode(self.inner.next_symbol());
        if self.second {
            b
        } else {
            a
        }
    }

    fn position(&self) -> u64 {
        self.inner.position()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{
        BernoulliStream, ConstantStream, GaussDigitStream, PeriodicStream, SymbolStreamExt, Weights,
    };
    use proptest::prelude::*;

    #[test]
    fn periodic_times_constant() {
        let s1 = PeriodicStream::new(vec![0, 0, 1, 1]).unwrap().boxed();
        let s2 = ConstantStream::new(Alphabet::Finite(3), 2).unwrap().boxed();
        let mut p = ProductStream::new(s1, s2);
        let code = p.code();
        let pairs: Vec<_> = p.take_prefix(4).into_iter().map(|c| code.decode(c)).collect();
        assert_eq!(pairs, vec![(0, 2), (0, 2), (1, 2), (1, 2)]);
        assert_eq!(p.alphabet(), Alphabet::Finite(6));
    }

    #[test]
    fn independent_coins_give_uniform_pair_blocks() {
        let w = Weights::Finite(vec![0.5, 0.5]);
        let s1 = BernoulliStream::new(w.clone(), 1).unwrap().boxed();
        let s2 = BernoulliStream::new(w, 2).unwrap().boxed();
        let xs = ProductStream::new(s1, s2).take_prefix(1_000_000);
        let mut counts = [0usize; 16];
        for w in xs.windows(2) {
            counts[(w[0] * 4 + w[1]) as usize] += 1;
        }
        for c in counts {
            let f = c as f64 / (xs.len() - 1) as f64;
            assert!((f - 1.0 / 16.0).abs() < 0.005);
        }
    }

    #[test]
    fn projection_recovers_first_factor() {
        let x = GaussDigitStream::new(4).take_prefix(5000);
        let s1 = GaussDigitStream::new(4).boxed();
        let s2 = GaussDigitStream::new(5).boxed();
        let p = ProductStream::new(s1, s2);
        let code = p.code();
        let mut proj = ProjectionStream::first(p.boxed(), code);
        assert_eq!(proj.take_prefix(5000), x);
    }

    proptest! {
        #[test]
        fn cantor_code_round_trips(a in 0u64..1_000_000, b in 1u64..1_000_000) {
            let code = PairCode::new(Alphabet::Naturals, Alphabet::Naturals);
            let c = code.encode(a, b);
            prop_assert!(c >= 1);
            prop_assert_eq!(code.decode(c), (a, b));
        }

        #[test]
        fn finite_code_round_trips(a in 0u64..7, b in 0u64..5) {
            let code = PairCode::new(Alphabet::Finite(7), Alphabet::Finite(5));
            let c = code.encode(a, b);
            prop_assert!(code.alphabet().contains(c));
            prop_assert_eq!(code.decode(c), (a, b));
        }
    }
}
