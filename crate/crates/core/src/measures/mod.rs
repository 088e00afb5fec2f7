//! Exact cylinder and spread-block measures, the spread-block witness search,
//! and predicted limiting frequencies along a set.

mod gauss;
mod markov;
mod prediction;
mod spread;

pub use gauss::{
    gauss_cylinder_interval, gauss_cylinder_measure, gauss_spread_measure,
    gauss_spread_measure_with_limit, DEFAULT_MAX_FILLINGS,
};
pub use markov::LabelledChain;
pub use prediction::{
    gap_conditional_coefficients, predicted_restricted_frequency, GapCoefficients, Prediction,
    PredictionOptions,
};
pub use spread::{
    find_witness, spreadability_defect, CertificateEntry, SpreadBlock, TailBound, WitnessResult,
    DEFAULT_EPS_FLOOR,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};
use crate::sources::{
    check_distribution, BernoulliStream, BoxStream, GaussDigitStream, Initial, MarkovStream,
    PairCode, PeriodicStream, ProductStream, SourceError, SymbolStreamExt, Weights,
};
use crate::{Alphabet, Symbol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("symbol {0} is not in the alphabet of the measure")]
    SymbolOutsideAlphabet(Symbol),
    #[error("block must be non-empty")]
    EmptyBlock,
    #[error("spread block of length {block} needs {expected} gaps, got {gaps}")]
    GapCount {
        block: usize,
        expected: usize,
        gaps: usize,
    },
    #[error("{0}")]
    Source(#[from] SourceError),
    #[error(transparent)]
    Chain(#[from] LinalgError),
    #[error("Gauss spread blocks need gauss_spread_measure (truncated summation)")]
    GaussSpread,
    #[error("operation not supported for {0}")]
    Unsupported(&'static str),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("tolerance needs digits up to {cap}, i.e. {fillings} fillings, above the limit {limit}")]
    TooManyFillings { cap: u64, fillings: f64, limit: u64 },
    #[error("measure of [1] is zero")]
    ZeroOneMass,
    #[error("measure is not on {{0, 1}}")]
    NotBinary,
    #[error("conditional mass {mass} stalled below 1 − {tol} at gap cap {cap}")]
    MassStalled { mass: f64, tol: f64, cap: u64 },
    #[error("no spreadability defect above {eps_floor} for k ≤ {k_max} in box {search_box}")]
    NoDefectFound {
        k_max: usize,
        search_box: u64,
        eps_floor: f64,
    },
    #[error("certificate violated at {q:?}: {value} ≥ {f0}")]
    CertificateViolation { q: Vec<u64>, value: f64, f0: f64 },
    #[error("alphabet too large to enumerate: {0} blocks")]
    TooManyBlocks(f64),
}

/// A shift-invariant measure with a finite description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    /// I.i.d. symbols `0, …, n−1` with the given probabilities.
    Bernoulli { weights: Vec<f64> },
    /// Stationary Markov chain; with `labels`, state `i` emits `labels[i]`
    /// (a hidden chain), otherwise state `i` emits `i`.
    Markov {
        transition: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<Symbol>>,
    },
    /// Continued-fraction digits under the Gauss measure.
    GaussCf,
    /// Uniform measure on the shift orbit of the periodic sequence `pattern^∞`.
    Periodic { pattern: Vec<Symbol> },
    /// Product measure on pair-coded symbols, see [`PairCode`].
    Product {
        first: Box<MeasureSpec>,
        second: Box<MeasureSpec>,
    },
}

impl MeasureSpec {
    pub fn bernoulli(weights: Vec<f64>) -> Self {
        MeasureSpec::Bernoulli { weights }
    }

    pub fn markov(transition: Vec<Vec<f64>>) -> Self {
        MeasureSpec::Markov {
            transition,
            labels: None,
        }
    }

    pub fn fair_coin() -> Self {
        MeasureSpec::Bernoulli {
            weights: vec![0.5, 0.5],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MeasureSpec::Bernoulli { .. } => "bernoulli",
            MeasureSpec::Markov { .. } => "markov",
            MeasureSpec::GaussCf => "gauss_cf",
            MeasureSpec::Periodic { .. } => "periodic",
            MeasureSpec::Product { .. } => "product",
        }
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        match self {
            MeasureSpec::Bernoulli { weights } => {
                Alphabet::finite(weights.len() as u64)?;
                check_distribution(weights)?;
            }
            MeasureSpec::Markov { .. } => {
                LabelledChain::from_spec(self)?;
            }
            MeasureSpec::GaussCf => {}
            MeasureSpec::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(SourceError::EmptyPattern.into());
                }
            }
            MeasureSpec::Product { first, second } => {
                first.validate()?;
                second.validate()?;
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            MeasureSpec::Bernoulli { weights } => Alphabet::Finite(weights.len() as u64),
            MeasureSpec::Markov { transition, labels } => match labels {
                Some(l) => Alphabet::Finite(l.iter().max().map_or(2, |m| (m + 1).max(2))),
                None => Alphabet::Finite((transition.len() as u64).max(2)),
            },
            MeasureSpec::GaussCf => Alphabet::Naturals,
            MeasureSpec::Periodic { pattern } => {
                Alphabet::Finite(pattern.iter().max().map_or(2, |m| (m + 1).max(2)))
            }
            MeasureSpec::Product { first, second } => self.pair_code(first, second).alphabet(),
        }
    }

    fn pair_code(&self, first: &MeasureSpec, second: &MeasureSpec) -> PairCode {
        PairCode::new(first.alphabet(), second.alphabet())
    }

    /// The pair code of a product spec.
    pub fn product_code(&self) -> Option<PairCode> {
        match self {
            MeasureSpec::Product { first, second } => Some(self.pair_code(first, second)),
            _ => None,
        }
    }

    fn check_block(&self, block: &[Symbol]) -> Result<(), MeasureError> {
        let alphabet = self.alphabet();
        match block.iter().find(|&&s| !alphabet.contains(s)) {
            Some(&s) => Err(MeasureError::SymbolOutsideAlphabet(s)),
            None => Ok(()),
        }
    }

    /// `μ([B])`. The empty block has measure 1.
    pub fn cylinder_measure(&self, block: &[Symbol]) -> Result<f64, MeasureError> {
        self.check_block(block)?;
        if block.is_empty() {
            return Ok(1.0);
        }
        match self {
            MeasureSpec::Bernoulli { weights } => {
                Ok(block.iter().map(|&s| weights[s as usize]).product())
            }
            MeasureSpec::Markov { .. } => Ok(LabelledChain::from_spec(self)?.cylinder(block)),
            MeasureSpec::GaussCf => gauss_cylinder_measure(block),
            MeasureSpec::Periodic { pattern } => {
                let offsets: Vec<u64> = (0..block.len() as u64).collect();
                Ok(periodic_placements(pattern, block, &offsets))
            }
            MeasureSpec::Product { first, second } => {
                let code = self.pair_code(first, second);
                let (a, b): (Vec<Symbol>, Vec<Symbol>) = block.iter().map(|&c| code.decode(c)).unzip();
                Ok(first.cylinder_measure(&a)? * second.cylinder_measure(&b)?)
            }
        }
    }

    pub fn symbol_measure(&self, a: Symbol) -> Result<f64, MeasureError> {
        self.cylinder_measure(&[a])
    }

    /// `Π(B) = μ([b₁])⋯μ([b_k])`.
    pub fn product_of_symbol_measures(&self, block: &[Symbol]) -> Result<f64, MeasureError> {
        block.iter().map(|&s| self.symbol_measure(s)).product()
    }

    /// `μ([B^p̄])`; for the Gauss measure only when no stars are inserted.
    pub fn spread_cylinder_measure(&self, sb: &SpreadBlock) -> Result<f64, MeasureError> {
        self.check_block(&sb.block)?;
        match self {
            MeasureSpec::Bernoulli { .. } => self.cylinder_measure(&sb.block),
            MeasureSpec::Markov { .. } => {
                Ok(LabelledChain::from_spec(self)?.spread_cylinder(&sb.block, &sb.gaps))
            }
            MeasureSpec::GaussCf if sb.gaps.iter().all(|&g| g == 0) => self.cylinder_measure(&sb.block),
            MeasureSpec::GaussCf => Err(MeasureError::GaussSpread),
            MeasureSpec::Periodic { pattern } => {
                Ok(periodic_placements(pattern, &sb.block, &sb.offsets()))
            }
            MeasureSpec::Product { first, second } => {
                let code = self.pair_code(first, second);
                let (a, b): (Vec<Symbol>, Vec<Symbol>) =
                    sb.block.iter().map(|&c| code.decode(c)).unzip();
                let sa = SpreadBlock::new(a, sb.gaps.clone())?;
                let sb2 = SpreadBlock::new(b, sb.gaps.clone())?;
                Ok(first.spread_value(&sa)? * second.spread_value(&sb2)?)
            }
        }
    }

    /// Spread measure with the Gauss case routed through truncated summation
    /// at tolerance `1e-9`.
    fn spread_value(&self, sb: &SpreadBlock) -> Result<f64, MeasureError> {
        match self {
            MeasureSpec::GaussCf => Ok(gauss_spread_measure(&sb.block, &sb.gaps, 1e-9)?.0),
            _ => self.spread_cylinder_measure(sb),
        }
    }

    /// A stream generic for the measure (almost surely for random kinds).
    pub fn sample_stream(&self, seed: u64) -> Result<BoxStream, MeasureError> {
        self.validate()?;
        Ok(match self {
            MeasureSpec::Bernoulli { weights } => {
                BernoulliStream::new(Weights::Finite(weights.clone()), seed)?.boxed()
            }
            MeasureSpec::Markov { transition, labels } => MarkovStream::labelled(
                &Matrix::from_rows(transition)?,
                labels.clone(),
                Initial::Stationary,
                seed,
            )?
            .boxed(),
            MeasureSpec::GaussCf => GaussDigitStream::new(seed).boxed(),
            MeasureSpec::Periodic { pattern } => PeriodicStream::new(pattern.clone())?.boxed(),
            MeasureSpec::Product { first, second } => {
                let other = seed ^ 0x9e37_79b9_7f4a_7c15;
                ProductStream::new(first.sample_stream(seed)?, second.sample_stream(other)?).boxed()
            }
        })
    }
}

/// Fraction of phases `j ∈ [0, m)` with `pattern[(j + offsets[i]) mod m] = block[i]`.
fn periodic_placements(pattern: &[Symbol], block: &[Symbol], offsets: &[u64]) -> f64 {
    let m = pattern.len() as u64;
    let hits = (0..m)
        .filter(|&j| {
            block
                .iter()
                .zip(offsets)
                .all(|(&b, &o)| pattern[((j + o) % m) as usize] == b)
        })
        .count();
    hits as f64 / m as f64
}

/// All blocks of length `k` over the first `n` symbols of `alphabet`.
pub(crate) fn all_blocks(symbols: &[Symbol], k: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|b| {
                symbols.iter().map(move |&s| {
                    let mut c = b.clone();
                    c.push(s);
                    c
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn markov_example() -> MeasureSpec {
        MeasureSpec::markov(vec![vec![0.9, 0.1], vec![0.1, 0.9]])
    }

    fn sample_specs() -> Vec<MeasureSpec> {
        vec![
            MeasureSpec::bernoulli(vec![0.2, 0.3, 0.5]),
            markov_example(),
            MeasureSpec::markov(vec![
                vec![0.5, 0.5, 0.0],
                vec![0.0, 0.5, 0.5],
                vec![0.5, 0.0, 0.5],
            ]),
            MeasureSpec::Markov {
                transition: vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.5, 0.0, 0.5]],
                labels: Some(vec![0, 0, 1]),
            },
            MeasureSpec::Periodic {
                pattern: vec![0, 0, 1, 1],
            },
            MeasureSpec::Periodic {
                pattern: vec![0, 1, 2, 1, 0],
            },
            MeasureSpec::Product {
                first: Box::new(MeasureSpec::fair_coin()),
                second: Box::new(markov_example()),
            },
        ]
    }

    #[test]
    fn basic_cylinders() {
        let coin = MeasureSpec::fair_coin();
        assert_eq!(coin.cylinder_measure(&[0, 1]).unwrap(), 0.25);
        let g = MeasureSpec::GaussCf;
        assert!((g.cylinder_measure(&[1]).unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!((g.cylinder_measure(&[1, 1]).unwrap() - (10.0f64 / 9.0).log2()).abs() < 1e-15);
        assert!((markov_example().cylinder_measure(&[0, 0]).unwrap() - 0.45).abs() < 1e-15);
        assert_eq!(
            coin.cylinder_measure(&[2]),
            Err(MeasureError::SymbolOutsideAlphabet(2))
        );
        assert_eq!(g.cylinder_measure(&[0]), Err(MeasureError::SymbolOutsideAlphabet(0)));
    }

    #[test]
    fn spread_examples() {
        let coin = MeasureSpec::fair_coin();
        let sb = SpreadBlock::new(vec![0, 0], vec![5]).unwrap();
        assert_eq!(coin.spread_cylinder_measure(&sb).unwrap(), 0.25);
        let sb = SpreadBlock::new(vec![0, 0], vec![1]).unwrap();
        assert!((markov_example().spread_cylinder_measure(&sb).unwrap() - 0.41).abs() < 1e-15);
        let periodic = MeasureSpec::Periodic {
            pattern: vec![0, 0, 1, 1],
        };
        let sb = SpreadBlock::new(vec![0, 1], vec![1]).unwrap();
        assert_eq!(periodic.spread_cylinder_measure(&sb).unwrap(), 0.5);
        let ones = SpreadBlock::new(vec![1, 1], vec![1]).unwrap();
        assert_eq!(
            MeasureSpec::GaussCf.spread_cylinder_measure(&ones),
            Err(MeasureError::GaussSpread)
        );
    }

    #[test]
    fn symbol_products() {
        assert_eq!(
            MeasureSpec::fair_coin().product_of_symbol_measures(&[0, 1, 1]).unwrap(),
            0.125
        );
        assert!((markov_example().product_of_symbol_measures(&[0, 0]).unwrap() - 0.25).abs() < 1e-15);
        let l1 = (4.0f64 / 3.0).log2();
        assert!(
            (MeasureSpec::GaussCf.product_of_symbol_measures(&[1, 1]).unwrap() - l1 * l1).abs()
                < 1e-15
        );
        assert!((l1 * l1 - 0.172256).abs() < 1e-6);
    }

    #[test]
    fn cylinders_sum_to_one() {
        for spec in sample_specs() {
            let symbols = spec.alphabet().symbols_up_to(None);
            for k in 1..=4 {
                let total: f64 = all_blocks(&symbols, k)
                    .iter()
                    .map(|b| spec.cylinder_measure(b).unwrap())
                    .sum();
                assert!((total - 1.0).abs() < 1e-12, "{spec:?} k={k}: {total}");
            }
        }
    }

    #[test]
    fn kolmogorov_consistency() {
        for spec in sample_specs() {
            let symbols = spec.alphabet().symbols_up_to(None);
            for k in 0..=3 {
                for b in all_blocks(&symbols, k) {
                    let m = spec.cylinder_measure(&b).unwrap();
                    let right: f64 = symbols
                        .iter()
                        .map(|&a| {
                            let mut c = b.clone();
                            c.push(a);
                            spec.cylinder_measure(&c).unwrap()
                        })
                        .sum();
                    let left: f64 = symbols
                        .iter()
                        .map(|&a| {
                            let mut c = vec![a];
                            c.extend_from_slice(&b);
                            spec.cylinder_measure(&c).unwrap()
                        })
                        .sum();
                    assert!((m - right).abs() < 1e-12, "{spec:?} {b:?}");
                    assert!((m - left).abs() < 1e-12, "{spec:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn gauss_consistency_within_tail() {
        let g = MeasureSpec::GaussCf;
        let cap = 2000u64;
        for b in [vec![1], vec![2], vec![1, 1], vec![3, 1, 2]] {
            let m = g.cylinder_measure(&b).unwrap();
            let sum: f64 = (1..=cap)
                .map(|a| {
                    let mut c = b.clone();
                    c.push(a);
                    g.cylinder_measure(&c).unwrap()
                })
                .sum();
            // the missing part is λ([B] ∩ {next digit > cap}) ≤ λ(digit > cap)
            assert!(m - sum >= -1e-15);
            assert!(m - sum <= (1.0 / (cap as f64 + 1.0)).ln_1p() / std::f64::consts::LN_2);
        }
    }

    #[test]
    fn zero_gaps_give_the_cylinder() {
        for spec in sample_specs() {
            let symbols = spec.alphabet().symbols_up_to(None);
            for k in 1..=3 {
                for b in all_blocks(&symbols, k) {
                    let sb = SpreadBlock::new(b.clone(), vec![0; k - 1]).unwrap();
                    assert_eq!(
                        spec.spread_cylinder_measure(&sb).unwrap(),
                        spec.cylinder_measure(&b).unwrap(),
                        "{spec:?} {b:?}"
                    );
                }
            }
        }
    }

    /// For the 2-state example, `(Tⁿ)₀₀ = ½(1 + 0.8ⁿ)`, so
    /// `|μ([0,*^p,0]) − Π| = ¼·0.8^{p+1}`.
    #[test]
    fn markov_mixing_limit() {
        let spec = markov_example();
        for p in 0..40u64 {
            let sb = SpreadBlock::new(vec![0, 0], vec![p]).unwrap();
            let f = spec.spread_cylinder_measure(&sb).unwrap();
            let bound = 0.25 * 0.8f64.powi(p as i32 + 1);
            assert!((f - 0.25).abs() <= bound + 1e-15);
            let sb = SpreadBlock::new(vec![0, 1], vec![p]).unwrap();
            let g = spec.spread_cylinder_measure(&sb).unwrap();
            assert!((g - 0.25).abs() <= bound + 1e-15);
        }
    }

    #[test]
    fn serde_round_trip() {
        for spec in sample_specs().into_iter().chain([MeasureSpec::GaussCf]) {
            let text = serde_json::to_string(&spec).unwrap();
            assert!(text.contains(spec.kind_name()));
            let back: MeasureSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
        let m: MeasureSpec =
            serde_json::from_str(r#"{"kind":"markov","transition":[[0.9,0.1],[0.1,0.9]]}"#).unwrap();
        assert_eq!(m, markov_example());
    }

    #[test]
    fn sample_streams_have_the_right_alphabet() {
        for spec in sample_specs().into_iter().chain([MeasureSpec::GaussCf]) {
            let mut s = spec.sample_stream(3).unwrap();
            assert_eq!(s.alphabet(), spec.alphabet());
            let alphabet = spec.alphabet();
            assert!(s.take_prefix(1000).iter().all(|&v| alphabet.contains(v)));
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(MeasureSpec::bernoulli(vec![0.5, 0.6]).validate().is_err());
        assert!(MeasureSpec::markov(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).validate().is_err());
        assert!(MeasureSpec::Periodic { pattern: vec![] }.validate().is_err());
    }

    proptest! {
        #[test]
        fn bernoulli_is_spreadable(
            w in proptest::collection::vec(0.01f64..1.0, 2..5),
            raw_block in proptest::collection::vec(0u64..10, 1..5),
            gaps in proptest::collection::vec(0u64..6, 4),
        ) {
            let total: f64 = w.iter().sum();
            let weights: Vec<f64> = w.iter().map(|v| v / total).collect();
            let n = weights.len() as u64;
            let spec = MeasureSpec::Bernoulli { weights };
            prop_assume!(spec.validate().is_ok());
            let block: Vec<Symbol> = raw_block.iter().map(|v| v % n).collect();
            let sb = SpreadBlock::new(block.clone(), gaps[..block.len() - 1].to_vec()).unwrap();
            prop_assert_eq!(
                spec.spread_cylinder_measure(&sb).unwrap(),
                spec.product_of_symbol_measures(&block).unwrap()
            );
        }

        #[test]
        fn random_markov_chains_are_consistent(
            raw in proptest::collection::vec(0.05f64..1.0, 9),
            k in 1usize..4,
        ) {
            let rows: Vec<Vec<f64>> = raw
                .chunks(3)
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.iter().map(|v| v / s).collect()
                })
                .collect();
            let spec = MeasureSpec::markov(rows);
            prop_assume!(spec.validate().is_ok());
            let symbols = vec![0, 1, 2];
            let total: f64 = all_blocks(&symbols, k).iter().map(|b| spec.cylinder_measure(b).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for b in all_blocks(&symbols, k) {
                let m = spec.cylinder_measure(&b).unwrap();
                let left: f64 = symbols.iter().map(|&a| {
                    let mut c = vec![a];
                    c.extend_from_slice(&b);
                    spec.cylinder_measure(&c).unwrap()
                }).sum();
                prop_assert!((m - left).abs() < 1e-12);
            }
        }
    }
}
