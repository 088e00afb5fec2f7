//! Subsets `S ⊂ ℕ` given as increasing index streams, and restriction `x|_S`.

mod density;
mod determinism;
mod superficial;

pub use density::{density_profile, geometric_checkpoints, DensityProfile};
pub use determinism::{determinism_score, lz76_complexity, DeterminismScore};
pub use superficial::{
    superficial_decomposition, DecompositionParams, Interval, SuperficialDecomposition,
    SUPERFICIAL_THRESHOLD,
};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::MeasureSpec;
use crate::sources::{
    garcia_hedlund_symbol, rng_from_seed, Alphabet, BoxStream, SourceError, Symbol, SymbolStream,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectorError {
    #[error("progression start must be at least 1")]
    ZeroStart,
    #[error("progression step must be at least 1")]
    ZeroStep,
    #[error("gap distribution puts mass on 0")]
    GapAtZero,
    #[error("gap rule needs at least one gap value")]
    NoGaps,
    #[error("membership probability must lie in (0, 1], got {0}")]
    BadProbability(f64),
    #[error("invalid block parameters: {0}")]
    BadBlocks(String),
    #[error(transparent)]
    Weights(#[from] SourceError),
    #[error("prefix of length {got} is too short, need at least {need}")]
    PrefixTooShort { need: u64, got: u64 },
    #[error("block length {k} is undersampled: {windows} windows for {cells} table cells")]
    Undersampled { k: usize, windows: u64, cells: u64 },
    #[error("prefix is not a 0/1 sequence (found {0})")]
    NotBinary(Symbol),
}

/// An infinite strictly increasing sequence `s₁ < s₂ < …` of naturals.
///
/// Index streams saturate at `u64::MAX` rather than overflow.
pub trait SelectionSet: Send {
    fn next_index(&mut self) -> u64;
}

pub type BoxSet = Box<dyn SelectionSet>;

impl<T: SelectionSet + ?Sized> SelectionSet for Box<T> {
    fn next_index(&mut self) -> u64 {
        (**self).next_index()
    }
}

/// How consecutive elements of a random set are spaced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapRule {
    /// `s₀ = 0`, `s_n = s_{n−1} + ω_n` with i.i.d. `ω_n ∈ values`.
    IidGaps { values: Vec<u64>, weights: Vec<f64> },
    /// `s₁ = 1`, then gaps alternate between a uniform draw from `choices` and
    /// `fixed`; with `choice_first` the draw comes first.
    AlternatingGaps {
        fixed: u64,
        choices: Vec<u64>,
        choice_first: bool,
    },
    /// Each `n` belongs to `S` independently with probability `p`.
    CoinMembership { p: f64 },
}

impl GapRule {
    pub fn validate(&self) -> Result<(), SelectorError> {
        match self {
            GapRule::IidGaps { values, weights } => {
                if values.is_empty() {
                    return Err(SelectorError::NoGaps);
                }
                if values.len() != weights.len() {
                    return Err(SourceError::AlphabetMismatch {
                        alphabet: values.len() as u64,
                        weights: weights.len(),
                    }
                    .into());
                }
                crate::sources::check_distribution(weights)?;
                if values.iter().zip(weights).any(|(&v, &w)| v == 0 && w > 0.0) {
                    return Err(SelectorError::GapAtZero);
                }
                Ok(())
            }
            GapRule::AlternatingGaps { fixed, choices, .. } => {
                if choices.is_empty() {
                    return Err(SelectorError::NoGaps);
                }
                if *fixed == 0 || choices.contains(&0) {
                    return Err(SelectorError::GapAtZero);
                }
                Ok(())
            }
            GapRule::CoinMembership { p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(SelectorError::BadProbability(*p));
                }
                Ok(())
            }
        }
    }
}

/// Serializable description of a selection set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    /// `{start, start+step, …}`.
    Progression { start: u64, step: u64 },
    Gaps { rule: GapRule, seed: u64 },
    /// `{1, b, b², …}`.
    Powers { base: u64 },
    /// `⋃_{n≥1} [bⁿ, f·bⁿ)`.
    GeometricBlocks { base: u64, factor: u64 },
    /// `⋃_{k≥1} [t_k, 2t_k)` with `t_k = b^(k(k+1)/2)`: lower density 0,
    /// upper density 1/2.
    GrowingBlocks { base: u64 },
    /// `⋃_{n≥1} [bⁿ, bⁿ+n)`: density 0.
    SparseBlocks { base: u64 },
    /// Positions of 1 in the Garcia–Hedlund sequence (density 2/3).
    GarciaHedlundSupport,
}

impl SetSpec {
    pub fn validate(&self) -> Result<(), SelectorError> {
        match self {
            SetSpec::Progression { start, step } => {
                if *start == 0 {
                    return Err(SelectorError::ZeroStart);
                }
                if *step == 0 {
                    return Err(SelectorError::ZeroStep);
                }
                Ok(())
            }
            SetSpec::Gaps { rule, .. } => rule.validate(),
            SetSpec::Powers { base } | SetSpec::GrowingBlocks { base } | SetSpec::SparseBlocks { base } => {
                if *base < 2 {
                    return Err(SelectorError::BadBlocks(format!("base {base} < 2")));
                }
                Ok(())
            }
            SetSpec::GeometricBlocks { base, factor } => {
                if *base < 2 || *factor < 2 || factor > base {
                    return Err(SelectorError::BadBlocks(format!(
                        "need 2 ≤ factor ≤ base, got base {base}, factor {factor}"
                    )));
                }
                Ok(())
            }
            SetSpec::GarciaHedlundSupport => Ok(()),
        }
    }

    pub fn build(&self) -> Result<BoxSet, SelectorError> {
        self.validate()?;
        Ok(match self {
            SetSpec::Progression { start, step } => Box::new(arithmetic_progression(*start, *step)?),
            SetSpec::Gaps { rule, seed } => Box::new(gap_process_set(rule.clone(), *seed)?),
            SetSpec::Powers { base } => Box::new(PowersSet {
                base: *base,
                next: 1,
            }),
            SetSpec::GeometricBlocks { base, factor } => {
                let (b, f) = (*base, *factor);
                Box::new(IntervalUnionSet::new(move |n| {
                    let start = b.checked_pow(n as u32)?;
                    Some((start, start.checked_mul(f)?))
                }))
            }
            SetSpec::GrowingBlocks { base } => {
                let b = *base;
                Box::new(IntervalUnionSet::new(move |k| {
                    let e = u32::try_from(k * (k + 1) / 2).ok()?;
                    let t = b.checked_pow(e)?;
                    Some((t, t.checked_mul(2)?))
                }))
            }
            SetSpec::SparseBlocks { base } => {
                let b = *base;
                Box::new(IntervalUnionSet::new(move |n| {
                    let start = b.checked_pow(n as u32)?;
                    Some((start, start.checked_add(n)?))
                }))
            }
            SetSpec::GarciaHedlundSupport => Box::new(GarciaHedlundSupportSet { n: 0 }),
        })
    }

    /// The measure generated by `𝟙_S` when it is a single ergodic measure
    /// with a finite description; `None` otherwise.
    pub fn derived_measure(&self) -> Option<MeasureSpec> {
        match self {
            SetSpec::Progression { start, step } => {
                let m = (*step).max(1) as usize;
                let mut pattern = vec![0; m];
                pattern[((start.max(&1) - 1) % m as u64) as usize] = 1;
                Some(MeasureSpec::Periodic { pattern })
            }
            SetSpec::Gaps { rule, .. } => match rule {
                GapRule::CoinMembership { p } => Some(MeasureSpec::Bernoulli {
                    weights: vec![1.0 - p, *p],
                }),
                GapRule::IidGaps { values, weights } => {
                    let blocks: Vec<(u64, f64)> = values
                        .iter()
                        .copied()
                        .zip(weights.iter().copied())
                        .filter(|(_, w)| *w > 0.0)
                        .collect();
                    Some(renewal_chain(&[blocks]))
                }
                GapRule::AlternatingGaps {
                    fixed, choices, ..
                } => {
                    let w = 1.0 / choices.len() as f64;
                    let drawn: Vec<(u64, f64)> = choices.iter().map(|&c| (c, w)).collect();
                    Some(renewal_chain(&[drawn, vec![(*fixed, 1.0)]]))
                }
            },
            _ => None,
        }
    }
}

/// Labelled chain emitting `0^{g−1}1` for each gap `g`, the gap law cycling
/// through `slots`.
fn renewal_chain(slots: &[Vec<(u64, f64)>]) -> MeasureSpec {
    // state layout: for each slot, for each gap value, g states
    let mut first_state = Vec::new();
    let mut n = 0usize;
    for slot in slots {
        let mut firsts = Vec::new();
        for &(g, _) in slot {
            firsts.push(n);
            n += g as usize;
        }
        first_state.push(firsts);
    }
    let mut t = vec![vec![0.0; n]; n];
    let mut labels = vec![0; n];
    for (si, slot) in slots.iter().enumerate() {
        let next = &slots[(si + 1) % slots.len()];
        let next_first = &first_state[(si + 1) % slots.len()];
        for (gi, &(g, _)) in slot.iter().enumerate() {
            let base = first_state[si][gi];
            for i in 0..g as usize - 1 {
                t[base + i][base + i + 1] = 1.0;
            }
            let last = base + g as usize - 1;
            labels[last] = 1;
            for (nj, &(_, w)) in next.iter().enumerate() {
                t[last][next_first[nj]] += w;
            }
        }
    }
    MeasureSpec::Markov {
        transition: t,
        labels: Some(labels),
    }
}

pub struct Progression {
    next: u64,
    step: u64,
}

/// `s_i = ℓ + (i−1)m`.
pub fn arithmetic_progression(start: u64, step: u64) -> Result<Progression, SelectorError> {
    if start == 0 {
        return Err(SelectorError::ZeroStart);
    }
    if step == 0 {
        return Err(SelectorError::ZeroStep);
    }
    Ok(Progression { next: start, step })
}

impl SelectionSet for Progression {
    fn next_index(&mut self) -> u64 {
        let s = self.next;
        self.next = self.next.saturating_add(self.step);
        s
    }
}

enum GapState {
    Iid(Vec<u64>, WeightedIndex<f64>),
    Alternating {
        fixed: u64,
        choices: Vec<u64>,
        draw_next: bool,
        started: bool,
    },
    Coin(f64),
}

pub struct GapProcessSet {
    state: GapState,
    rng: ChaCha8Rng,
    current: u64,
}

pub fn gap_process_set(rule: GapRule, seed: u64) -> Result<GapProcessSet, SelectorError> {
    rule.validate()?;
    let state = match rule {
        GapRule::IidGaps { values, weights } => {
            let d = WeightedIndex::new(&weights)
                .map_err(|_| SourceError::NotNormalized(weights.iter().sum()))?;
            GapState::Iid(values, d)
        }
        GapRule::AlternatingGaps {
            fixed,
            choices,
            choice_first,
        } => GapState::Alternating {
            fixed,
            choices,
            draw_next: choice_first,
            started: false,
        },
        GapRule::CoinMembership { p } => GapState::Coin(p),
    };
    Ok(GapProcessSet {
        state,
        rng: rng_from_seed(seed),
        current: 0,
    })
}

impl SelectionSet for GapProcessSet {
    fn next_index(&mut self) -> u64 {
        let gap = match &mut self.state {
            GapState::Iid(values, d) => values[d.sample(&mut self.rng)],
            GapState::Alternating {
                fixed,
                choices,
                draw_next,
                started,
            } => {
                if !*started {
                    *started = true;
                    1
                } else {
                    let g = if *draw_next {
                        choices[self.rng.gen_range(0..choices.len())]
                    } else {
                        *fixed
                    };
                    *draw_next = !*draw_next;
                    g
                }
            }
            GapState::Coin(p) => {
                let mut g = 1;
                while self.rng.gen::<f64>() >= *p {
                    g += 1;
                }
                g
            }
        };
        self.current = self.current.saturating_add(gap);
        self.current
    }
}

struct PowersSet {
    base: u64,
    next: u64,
}

impl SelectionSet for PowersSet {
    fn next_index(&mut self) -> u64 {
        let s = self.next;
        self.next = self.next.saturating_mul(self.base);
        s
    }
}

/// Union of the half-open intervals `[a_n, b_n)` produced by `interval(n)` for
/// `n = 1, 2, …`; `None` means the next interval is out of range.
struct IntervalUnionSet<F> {
    interval: F,
    n: u64,
    cur: u64,
    end: u64,
    exhausted: bool,
}

impl<F: Fn(u64) -> Option<(u64, u64)> + Send> IntervalUnionSet<F> {
    fn new(interval: F) -> Self {
        IntervalUnionSet {
            interval,
            n: 0,
            cur: 0,
            end: 0,
            exhausted: false,
        }
    }
}

impl<F: Fn(u64) -> Option<(u64, u64)> + Send> SelectionSet for IntervalUnionSet<F> {
    fn next_index(&mut self) -> u64 {
        while !self.exhausted && self.cur >= self.end {
            self.n += 1;
            match (self.interval)(self.n) {
                Some((a, b)) => {
                    self.cur = a.max(self.cur);
                    self.end = b;
                }
                None => self.exhausted = true,
            }
        }
        if self.exhausted {
            return u64::MAX;
        }
        let s = self.cur;
        self.cur += 1;
        s
    }
}

struct GarciaHedlundSupportSet {
    n: u64,
}

impl SelectionSet for GarciaHedlundSupportSet {
    fn next_index(&mut self) -> u64 {
        loop {
            self.n += 1;
            if garcia_hedlund_symbol(self.n) == 1 {
                return self.n;
            }
        }
    }
}

/// A fixed increasing list, used for prefixes; saturates when exhausted.
pub struct ListSet {
    items: Vec<u64>,
    i: usize,
}

impl ListSet {
    pub fn new(items: Vec<u64>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        ListSet { items, i: 0 }
    }
}

impl SelectionSet for ListSet {
    fn next_index(&mut self) -> u64 {
        let s = self.items.get(self.i).copied().unwrap_or(u64::MAX);
        self.i += 1;
        s
    }
}

/// `x|_S = (x_{s₁}, x_{s₂}, …)`, read lazily in one pass over `x`.
pub struct RestrictedStream {
    x: BoxStream,
    set: BoxSet,
    pos: u64,
}

pub fn restrict(x: BoxStream, set: BoxSet) -> RestrictedStream {
    RestrictedStream { x, set, pos: 0 }
}

impl SymbolStream for RestrictedStream {
    fn alphabet(&self) -> Alphabet {
        self.x.alphabet()
    }

    fn next_symbol(&mut self) -> Symbol {
        let target = self.set.next_index();
        while self.x.position() + 1 < target {
            self.x.next_symbol();
        }
        self.pos += 1;
        self.x.next_symbol()
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

/// `(S∘T)_i = s_{t_i}`, so that `(x|_S)|_T = x|_{S∘T}`.
pub struct ComposedSet {
    outer: BoxSet,
    inner: BoxSet,
    outer_rank: u64,
    outer_value: u64,
}

pub fn compose(outer: BoxSet, inner: BoxSet) -> ComposedSet {
    ComposedSet {
        outer,
        inner,
        outer_rank: 0,
        outer_value: 0,
    }
}

impl SelectionSet for ComposedSet {
    fn next_index(&mut self) -> u64 {
        let t = self.inner.next_index();
        while self.outer_rank < t {
            self.outer_value = self.outer.next_index();
            self.outer_rank += 1;
        }
        self.outer_value
    }
}

/// `y = 𝟙_S` as a 0/1 stream.
pub struct CharacteristicStream {
    set: BoxSet,
    next_member: u64,
    pos: u64,
}

pub fn characteristic(mut set: BoxSet) -> CharacteristicStream {
    let next_member = set.next_index();
    CharacteristicStream {
        set,
        next_member,
        pos: 0,
    }
}

impl SymbolStream for CharacteristicStream {
    fn alphabet(&self) -> Alphabet {
        Alphabet::binary()
    }

    fn next_symbol(&mut self) -> Symbol {
        self.pos += 1;
        if self.pos == self.next_member {
            self.next_member = self.set.next_index();
            1
        } else {
            0
        }
    }

    fn position(&self) -> u64 {
        self.pos
    }
}

/// Members of `S` not exceeding `n`.
pub fn indices_up_to(set: &mut dyn SelectionSet, n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    loop {
        let s = set.next_index();
        if s > n || out.last() == Some(&s) {
            break;
        }
        out.push(s);
    }
    out
}

/// `𝟙_S(1), …, 𝟙_S(n)`.
pub fn characteristic_prefix(set: &mut dyn SelectionSet, n: u64) -> Vec<u8> {
    let mut y = vec![0u8; n as usize];
    for s in indices_up_to(set, n) {
        y[(s - 1) as usize] = 1;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{
        BernoulliStream, GarciaHedlundStream, PeriodicStream, SymbolStreamExt, ThueMorseStream,
        Weights,
    };
    use proptest::prelude::*;

    fn first(set: &mut dyn SelectionSet, n: usize) -> Vec<u64> {
        (0..n).map(|_| set.next_index()).collect()
    }

    #[test]
    fn progression_and_characteristic() {
        let y = characteristic(Box::new(arithmetic_progression(3, 3).unwrap())).take_prefix(9);
        assert_eq!(y, vec![0, 0, 1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(arithmetic_progression(0, 1).err(), Some(SelectorError::ZeroStart));
        assert_eq!(arithmetic_progression(1, 0).err(), Some(SelectorError::ZeroStep));
    }

    #[test]
    fn full_set_restriction_is_identity() {
        let x = BernoulliStream::new(Weights::Finite(vec![0.3, 0.7]), 1).unwrap();
        let expect = BernoulliStream::new(Weights::Finite(vec![0.3, 0.7]), 1)
            .unwrap()
            .take_prefix(10_000);
        let mut r = restrict(x.boxed(), Box::new(arithmetic_progression(1, 1).unwrap()));
        assert_eq!(r.take_prefix(10_000), expect);
    }

    #[test]
    fn garcia_hedlund_along_multiples_of_three_is_itself() {
        let mut r = restrict(
            GarciaHedlundStream::new().boxed(),
            Box::new(arithmetic_progression(3, 3).unwrap()),
        );
        assert_eq!(r.take_prefix(100_000), GarciaHedlundStream::new().take_prefix(100_000));
    }

    #[test]
    fn thue_morse_along_odds_and_evens() {
        let x = ThueMorseStream::new().take_prefix(100_000);
        let odd = restrict(
            ThueMorseStream::new().boxed(),
            Box::new(arithmetic_progression(1, 2).unwrap()),
        )
        .take_prefix(100_000);
        let even = restrict(
            ThueMorseStream::new().boxed(),
            Box::new(arithmetic_progression(2, 2).unwrap()),
        )
        .take_prefix(100_000);
        assert_eq!(odd, x);
        assert!(even.iter().zip(&x).all(|(e, v)| *e == 1 - *v));
    }

    fn alternating() -> GapRule {
        GapRule::AlternatingGaps {
            fixed: 2,
            choices: vec![4, 8],
            choice_first: true,
        }
    }

    #[test]
    fn alternating_gap_set_fixes_the_period_four_sequence() {
        for seed in 0..4 {
            let set = gap_process_set(alternating(), seed).unwrap();
            let r = restrict(PeriodicStream::new(vec![0, 0, 1, 1]).unwrap().boxed(), Box::new(set))
                .take_prefix(100_000);
            assert_eq!(r, PeriodicStream::new(vec![0, 0, 1, 1]).unwrap().take_prefix(100_000));
        }
        // drawing the fixed gap first breaks the identity
        let other = GapRule::AlternatingGaps {
            fixed: 2,
            choices: vec![4, 8],
            choice_first: false,
        };
        let r = restrict(
            PeriodicStream::new(vec![0, 0, 1, 1]).unwrap().boxed(),
            Box::new(gap_process_set(other, 0).unwrap()),
        )
        .take_prefix(4);
        assert_ne!(r, vec![0, 0, 1, 1]);
    }

    #[test]
    fn iid_gaps_one_or_three_have_density_one_half() {
        let rule = GapRule::IidGaps {
            values: vec![1, 3],
            weights: vec![0.5, 0.5],
        };
        let mut set = gap_process_set(rule, 5).unwrap();
        let n = 1_000_000;
        let count = indices_up_to(&mut set, n).len() as f64;
        assert!((count / n as f64 - 0.5).abs() < 0.005);
    }

    #[test]
    fn gap_rules_are_validated() {
        let bad = GapRule::IidGaps {
            values: vec![0, 1],
            weights: vec![0.5, 0.5],
        };
        assert_eq!(gap_process_set(bad, 0).err(), Some(SelectorError::GapAtZero));
        assert!(gap_process_set(GapRule::CoinMembership { p: 0.0 }, 0).is_err());
    }

    #[test]
    fn block_sets_enumerate_their_intervals() {
        let mut g = SetSpec::GeometricBlocks { base: 4, factor: 2 }.build().unwrap();
        assert_eq!(first(g.as_mut(), 8), vec![4, 5, 6, 7, 16, 17, 18, 19]);
        let mut s = SetSpec::SparseBlocks { base: 4 }.build().unwrap();
        assert_eq!(first(s.as_mut(), 6), vec![4, 16, 17, 64, 65, 66]);
        let mut p = SetSpec::Powers { base: 2 }.build().unwrap();
        assert_eq!(first(p.as_mut(), 5), vec![1, 2, 4, 8, 16]);
        let mut gr = SetSpec::GrowingBlocks { base: 2 }.build().unwrap();
        assert_eq!(first(gr.as_mut(), 7), vec![2, 3, 8, 9, 10, 11, 12]);
        let mut gh = SetSpec::GarciaHedlundSupport.build().unwrap();
        assert_eq!(first(gh.as_mut(), 6), vec![1, 3, 4, 5, 7, 9]);
        assert!(SetSpec::GeometricBlocks { base: 4, factor: 5 }.build().is_err());
    }

    #[test]
    fn sets_saturate_instead_of_overflowing() {
        let mut p = SetSpec::Powers { base: 2 }.build().unwrap();
        let xs = first(p.as_mut(), 70);
        assert_eq!(xs[63], 1 << 63);
        assert_eq!(xs[69], u64::MAX);
    }

    #[test]
    fn renewal_chain_for_gaps_one_or_three() {
        let spec = SetSpec::Gaps {
            rule: GapRule::IidGaps {
                values: vec![1, 3],
                weights: vec![0.5, 0.5],
            },
            seed: 0,
        };
        let nu = spec.derived_measure().unwrap();
        // ν([1]) is the density 1/2; ν([1,1]) = ν([1])·P(gap 1) = 1/4.
        assert!((nu.cylinder_measure(&[1]).unwrap() - 0.5).abs() < 1e-12);
        assert!((nu.cylinder_measure(&[1, 1]).unwrap() - 0.25).abs() < 1e-12);
        assert!((nu.cylinder_measure(&[1, 0, 1]).unwrap()).abs() < 1e-12);
        assert!((nu.cylinder_measure(&[1, 0, 0, 1]).unwrap() - 0.25).abs() < 1e-12);
    }

    fn random_increasing(seed: u64, density: f64, n: usize) -> Vec<u64> {
        let mut set = gap_process_set(GapRule::CoinMembership { p: density }, seed).unwrap();
        (0..n).map(|_| set.next_index()).collect()
    }

    proptest! {
        #[test]
        fn restriction_composes(seed_s in 0u64..1000, seed_t in 0u64..1000, ds in 0.1f64..0.9, dt in 0.1f64..0.9) {
            let s = random_increasing(seed_s, ds, 3000);
            let t = random_increasing(seed_t, dt, 300);
            let t: Vec<u64> = t.into_iter().filter(|&v| v <= 3000).collect();
            let n = t.len();
            let x = || BernoulliStream::new(Weights::Finite(vec![0.5, 0.5]), 99).unwrap().boxed();
            let twice = restrict(
                restrict(x(), Box::new(ListSet::new(s.clone()))).boxed(),
                Box::new(ListSet::new(t.clone())),
            )
            .take_prefix(n);
            let once = restrict(
                x(),
                Box::new(compose(Box::new(ListSet::new(s)), Box::new(ListSet::new(t)))),
            )
            .take_prefix(n);
            prop_assert_eq!(twice, once);
        }
    }
}
