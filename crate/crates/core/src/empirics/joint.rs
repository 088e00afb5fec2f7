use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{BlockCounter, EmpiricalMeasure, EmpiricsError};
use crate::sources::{Alphabet, PairCode};
use crate::Symbol;

/// Block counts of the double sequence `(x; y)`, keyed by the pair of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    pub k: usize,
    pub x_alphabet: Alphabet,
    pub y_alphabet: Alphabet,
    pub counts: BTreeMap<(Vec<Symbol>, Vec<Symbol>), u64>,
    pub total: u64,
}

impl JointTable {
    pub fn frequency(&self, bx: &[Symbol], by: &[Symbol]) -> f64 {
        let c = self.counts.get(&(bx.to_vec(), by.to_vec())).copied().unwrap_or(0);
        c as f64 / self.total as f64
    }

    fn marginal(&self, alphabet: Alphabet, first: bool) -> EmpiricalMeasure {
        let mut counts = BTreeMap::new();
        for ((bx, by), &c) in &self.counts {
            let key = if first { bx } else { by };
            *counts.entry(key.clone()).or_insert(0) += c;
        }
        EmpiricalMeasure {
            k: self.k,
            alphabet,
            cap: None,
            counts,
            overflow: 0,
            total: self.total,
        }
    }

    /// Block counts of the top row; equal to counting `x` alone.
    pub fn marginal_x(&self) -> EmpiricalMeasure {
        self.marginal(self.x_alphabet, true)
    }

    pub fn marginal_y(&self) -> EmpiricalMeasure {
        self.marginal(self.y_alphabet, false)
    }

    /// `max |Fr(B_x; B_y) − Fr(B_x)·Fr(B_y)|` over pairs of observed
    /// marginal blocks.
    pub fn independence_defect(&self) -> f64 {
        let mx = self.marginal_x();
        let my = self.marginal_y();
        let bys: BTreeSet<&Vec<Symbol>> = my.counts.keys().collect();
        let mut worst = 0.0f64;
        for bx in mx.counts.keys() {
            let fx = mx.frequency(bx);
            for by in &bys {
                let d = (self.frequency(bx, by) - fx * my.frequency(by)).abs();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Joint `k`-block table of two equally long prefixes over finite alphabets.
pub fn joint_block_frequencies(
    x: &[Symbol],
    x_alphabet: Alphabet,
    y: &[Symbol],
    y_alphabet: Alphabet,
    k: usize,
) -> Result<JointTable, EmpiricsError> {
    if x.len() != y.len() {
        return Err(EmpiricsError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if x_alphabet.size().is_none() || y_alphabet.size().is_none() {
        return Err(EmpiricsError::InfiniteAlphabet);
    }
    if k == 0 {
        return Err(EmpiricsError::ZeroLength);
    }
    if x.len() < k {
        return Err(EmpiricsError::PrefixTooShort {
            need: k as u64,
            got: x.len() as u64,
        });
    }
    for (&s, a) in x.iter().map(|s| (s, x_alphabet)).chain(y.iter().map(|s| (s, y_alphabet))) {
        if !a.contains(s) {
            return Err(EmpiricsError::SymbolOutsideAlphabet(s));
        }
    }
    let code = PairCode::new(x_alphabet, y_alphabet);
    let mut counter = BlockCounter::new(code.alphabet(), k, None)?;
    for (&a, &b) in x.iter().zip(y) {
        counter.push(code.encode(a, b));
    }
    let table = counter.finish();
    let counts = table
        .counts
        .into_iter()
        .map(|(block, c)| {
            let (bx, by): (Vec<Symbol>, Vec<Symbol>) = block.iter().map(|&s| code.decode(s)).unzip();
            ((bx, by), c)
        })
        .collect();
    Ok(JointTable {
        k,
        x_alphabet,
        y_alphabet,
        counts,
        total: table.total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirics::block_frequencies;
    use crate::sources::{BernoulliStream, SymbolStreamExt, Weights};
    use proptest::prelude::*;

    fn coin(seed: u64, n: usize) -> Vec<Symbol> {
        BernoulliStream::new(Weights::Finite(vec![0.5, 0.5]), seed)
            .unwrap()
            .take_prefix(n)
    }

    #[test]
    fn independent_coins() {
        let x = coin(1, 1_000_000);
        let y = coin(2, 1_000_000);
        let t = joint_block_frequencies(&x, Alphabet::binary(), &y, Alphabet::binary(), 2).unwrap();
        assert!(t.independence_defect() < 0.003);
    }

    /// Oracle: on the diagonal the defect is `Fr(B)(1 − Fr(B))`, maximal
    /// over `B`, and off-diagonal terms are `Fr(B)Fr(B′)`, which is smaller.
    #[test]
    fn diagonal_joining() {
        let x = coin(3, 200_000);
        let t = joint_block_frequencies(&x, Alphabet::binary(), &x, Alphabet::binary(), 2).unwrap();
        let e = block_frequencies(&x, Alphabet::binary(), 2, None).unwrap();
        let oracle = e
            .counts
            .keys()
            .map(|b| {
                let f = e.frequency(b);
                f * (1.0 - f)
            })
            .fold(0.0, f64::max);
        assert!((t.independence_defect() - oracle).abs() < 1e-15);
        assert!(t.independence_defect() >= 0.18);
    }

    #[test]
    fn constant_row_is_independent() {
        let x = coin(4, 10_000);
        let y = vec![1; 10_000];
        let t = joint_block_frequencies(&x, Alphabet::binary(), &y, Alphabet::binary(), 3).unwrap();
        assert!(t.independence_defect() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            joint_block_frequencies(&[0, 1], Alphabet::binary(), &[0], Alphabet::binary(), 1),
            Err(EmpiricsError::LengthMismatch { .. })
        ));
        assert!(matches!(
            joint_block_frequencies(&[1], Alphabet::Naturals, &[0], Alphabet::binary(), 1),
            Err(EmpiricsError::InfiniteAlphabet)
        ));
    }

    proptest! {
        #[test]
        fn marginals_are_exact(
            pairs in proptest::collection::vec((0u64..3, 0u64..2), 4..300),
            k in 1usize..4,
        ) {
            let x: Vec<Symbol> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<Symbol> = pairs.iter().map(|p| p.1).collect();
            let t = joint_block_frequencies(&x, Alphabet::Finite(3), &y, Alphabet::binary(), k).unwrap();
            prop_assert_eq!(t.marginal_x(), block_frequencies(&x, Alphabet::Finite(3), k, None).unwrap());
            prop_assert_eq!(t.marginal_y(), block_frequencies(&y, Alphabet::binary(), k, None).unwrap());
        }
    }
}
