use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_distribution, Alphabet, SourceError, Symbol, SymbolStream};
use crate::linalg::Matrix;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Law of a single symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Weights {
    /// Probability of each symbol of a finite alphabet, in order.
    Finite(Vec<f64>),
    /// `P(k) = p(1−p)^(k−1)` on `{1, 2, …}`.
    Geometric { p: f64 },
}

impl Weights {
    pub fn alphabet(&self) -> Result<Alphabet, SourceError> {
        match self {
            Weights::Finite(w) => Alphabet::finite(w.len() as u64),
            Weights::Geometric { .. } => Ok(Alphabet::Naturals),
        }
    }

    pub fn validate(&self) -> Result<(), SourceError> {
        match self {
            Weights::Finite(w) => {
                Alphabet::finite(w.len() as u64)?;
                check_distribution(w)
            }
            Weights::Geometric { p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(SourceError::BadGeometric(*p));
                }
                Ok(())
            }
        }
    }

    pub fn probability(&self, s: Symbol) -> f64 {
        match self {
            Weights::Finite(w) => w.get(s as usize).copied().unwrap_or(0.0),
            Weights::Geometric { p } => {
                if s == 0 {
                    0.0
                } else {
                    p * (1.0 - p).powf((s - 1) as f64)
                }
            }
        }
    }
}

enum Sampler {
    Finite(WeightedIndex<f64>),
    Geometric { log_q: f64 },
}

/// I.i.d. symbols.
pub struct BernoulliStream {
    alphabet: Alphabet,
    sampler: Sampler,
    rng: ChaCha8Rng,
    pos: u64,
}

impl BernoulliStream {
    pub fn new(weights: Weights, seed: u64) -> Result<Self, SourceError> {
        let alphabet = weights.alphabet()?;
        Self::with_alphabet(alphabet, weights, seed)
    }

    /// Checks that `weights` describe a law on `alphabet`.
    pub fn with_alphabet(
        alphabet: Alphabet,
        weights: Weights,
        seed: u64,
    ) -> Result<Self, SourceError> {
        weights.validate()?;
        let sampler = match (&weights, alphabet) {
            (Weights::Finite(w), Alphabet::Finite(n)) if w.len() as u64 == n => {
                Sampler::Finite(WeightedIndex::new(w).map_err(|_| SourceError::NotNormalized(0.0))?)
            }
            (Weights::Finite(w), Alphabet::Finite(n)) => {
                return Err(SourceError::AlphabetMismatch {
                    alphabet: n,
                    weights: w.len(),
                })
            }
            (Weights::Geometric { p }, Alphabet::Naturals) => Sampler::Geometric {
                log_q: (1.0 - p).ln(),
            },
            (w, a) => {
                return Err(SourceError::AlphabetMismatch {
                    alphabet: a.size().unwrap_or(0),
                    weights: match w {
                        Weights::Finite(v) => v.len(),
                        Weights::Geometric { .. } => 0,
                    },
                })
            }
        };
        Ok(BernoulliStream {
            alphabet,
            sampler,
            rng: rng_from_seed(seed),
            pos: 0,
        })
    }
}

impl SymbolStream for BernoulliStream {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_symbol(&mut self) -> Symbol {
        self.pos += 1;
        match &self.sampler {
            Sampler::Finite(d) => d.sample(&mut self.rng) as Symbol,
            Sampler::Geometric { log_q } => {
                if *log_q == f64::NEG_INFINITY {
                    return 1;
                }
                // u in (0, 1]
                let u = 1.0 - self.rng.gen::<f64>();
                1 + (u.ln() / log_q).floor() as Symbol
            }
        }
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Initial {
    Stationary,
    Distribution(Vec<f64>),
}

/// Markov chain trajectory, optionally mapped through a state labelling.
pub struct MarkovStream {
    alphabet: Alphabet,
    rows: Vec<WeightedIndex<f64>>,
    labels: Option<Vec<Symbol>>,
    state: usize,
    started: bool,
    initial: WeightedIndex<f64>,
    rng: ChaCha8Rng,
    pos: u64,
}

impl MarkovStream {
    pub fn new(transition: &Matrix, initial: Initial, seed: u64) -> Result<Self, SourceError> {
        Self::labelled(transition, None, initial, seed)
    }

    /// With `labels`, state `i` is emitted as `labels[i]`.
    pub fn labelled(
        transition: &Matrix,
        labels: Option<Vec<Symbol>>,
        initial: Initial,
        seed: u64,
    ) -> Result<Self, SourceError> {
        transition.check_stochastic()?;
        let n = transition.dim();
        let init = match initial {
            Initial::Stationary => transition.stationary()?,
            Initial::Distribution(d) => {
                if d.len() != n {
                    return Err(SourceError::InitialLength {
                        states: n,
                        got: d.len(),
                    });
                }
                check_distribution(&d)?;
                d
            }
        };
        let alphabet = match &labels {
            None => Alphabet::finite((n as u64).max(2))?,
            Some(l) => {
                if l.len() != n {
                    return Err(SourceError::InitialLength {
                        states: n,
                        got: l.len(),
                    });
                }
                Alphabet::finite(l.iter().max().map_or(2, |m| (m + 1).max(2)))?
            }
        };
        let rows = transition
            .rows()
            .map(|r| WeightedIndex::new(r).map_err(|_| SourceError::NotNormalized(0.0)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MarkovStream {
            alphabet,
            rows,
            labels,
            state: 0,
            started: false,
            initial: WeightedIndex::new(&init).map_err(|_| SourceError::NotNormalized(0.0))?,
            rng: rng_from_seed(seed),
            pos: 0,
        })
    }
}

impl SymbolStream for MarkovStream {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn next_symbol(&mut self) -> Symbol {
        self.state = if self.started {
            self.rows[self.state].sample(&mut self.rng)
        } else {
            self.started = true;
            self.initial.sample(&mut self.rng)
        };
        self.pos += 1;
        match &self.labels {
            Some(l) => l[self.state],
            None => self.state as Symbol,
        }
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::SymbolStreamExt;

    #[test]
    fn fair_coin_frequency_within_binomial_band() {
        let mut s = BernoulliStream::new(Weights::Finite(vec![0.5, 0.5]), 7).unwrap();
        let n = 1_000_000;
        let zeros = s.take_prefix(n).iter().filter(|&&v| v == 0).count();
        let f = zeros as f64 / n as f64;
        // 3σ = 3·0.5/√n = 0.0015
        assert!((f - 0.5).abs() < 0.002, "{f}");
    }

    #[test]
    fn degenerate_weights_give_constant_stream() {
        let mut s = BernoulliStream::new(Weights::Finite(vec![1.0, 0.0]), 1).unwrap();
        assert!(s.take_prefix(10_000).iter().all(|&v| v == 0));
    }

    #[test]
    fn replay_is_deterministic() {
        let w = Weights::Finite(vec![0.5, 0.5]);
        let a = BernoulliStream::new(w.clone(), 42).unwrap().take_prefix(10_000);
        let b = BernoulliStream::new(w, 42).unwrap().take_prefix(10_000);
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(matches!(
            BernoulliStream::new(Weights::Finite(vec![0.5, 0.6]), 0),
            Err(SourceError::NotNormalized(_))
        ));
        assert!(matches!(
            BernoulliStream::with_alphabet(Alphabet::Finite(3), Weights::Finite(vec![0.5, 0.5]), 0),
            Err(SourceError::AlphabetMismatch { .. })
        ));
        assert!(BernoulliStream::new(Weights::Geometric { p: 0.0 }, 0).is_err());
    }

    #[test]
    fn geometric_law_first_atoms() {
        let mut s = BernoulliStream::new(Weights::Geometric { p: 0.5 }, 3).unwrap();
        let xs = s.take_prefix(400_000);
        assert!(xs.iter().all(|&v| v >= 1));
        let ones = xs.iter().filter(|&&v| v == 1).count() as f64 / xs.len() as f64;
        let twos = xs.iter().filter(|&&v| v == 2).count() as f64 / xs.len() as f64;
        assert!((ones - 0.5).abs() < 0.004);
        assert!((twos - 0.25).abs() < 0.004);
    }

    #[test]
    fn three_state_chain_matches_stationary_vector() {
        let t = Matrix::from_rows(&[
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let pi = t.stationary().unwrap();
        let mut s = MarkovStream::new(&t, Initial::Stationary, 11).unwrap();
        let n = 1_000_000;
        let xs = s.take_prefix(n);
        for (state, &p) in pi.iter().enumerate() {
            let f = xs.iter().filter(|&&v| v == state as u64).count() as f64 / n as f64;
            assert!((f - p).abs() < 0.01, "state {state}: {f} vs {p}");
        }
    }

    #[test]
    fn identity_chain_is_constant() {
        let t = Matrix::identity(2);
        let mut s =
            MarkovStream::new(&t, Initial::Distribution(vec![0.0, 1.0]), 5).unwrap();
        assert!(s.take_prefix(1000).iter().all(|&v| v == 1));
        // no unique stationary vector
        assert!(MarkovStream::new(&t, Initial::Stationary, 5).is_err());
    }

    #[test]
    fn symmetric_half_chain_is_a_fair_coin() {
        let t = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let xs = MarkovStream::new(&t, Initial::Stationary, 9)
            .unwrap()
            .take_prefix(1_000_000);
        let mut counts = [0usize; 4];
        for w in xs.windows(2) {
            counts[(w[0] * 2 + w[1]) as usize] += 1;
        }
        for c in counts {
            let f = c as f64 / (xs.len() - 1) as f64;
            assert!((f - 0.25).abs() < 0.003, "{f}");
        }
    }
}
