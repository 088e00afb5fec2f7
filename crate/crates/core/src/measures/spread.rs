use serde::{Deserialize, Serialize};

use crate::Symbol;

use super::{all_blocks, LabelledChain, MeasureError, MeasureSpec};

/// Floor below which spread-block deviations are treated as rounding noise.
pub const DEFAULT_EPS_FLOOR: f64 = 1e-9;

/// Slack used when comparing `f(q̄)` with `f(p̄)`.
const TIE_TOL: f64 = 1e-12;

/// Enumeration limit for blocks times gap vectors.
const MAX_ENUMERATION: f64 = 5e6;

/// `B^p̄ = (b₁, *^{p₁}, b₂, …, *^{p_{k−1}}, b_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpreadBlock {
    pub block: Vec<Symbol>,
    pub gaps: Vec<u64>,
}

impl SpreadBlock {
    pub fn new(block: Vec<Symbol>, gaps: Vec<u64>) -> Result<Self, MeasureError> {
        if block.is_empty() {
            return Err(MeasureError::EmptyBlock);
        }
        if gaps.len() + 1 != block.len() {
            return Err(MeasureError::GapCount {
                block: block.len(),
                expected: block.len() - 1,
                gaps: gaps.len(),
            });
        }
        Ok(SpreadBlock { block, gaps })
    }

    /// Ordinary block, no stars.
    pub fn contiguous(block: Vec<Symbol>) -> Result<Self, MeasureError> {
        let gaps = vec![0; block.len().saturating_sub(1)];
        Self::new(block, gaps)
    }

    pub fn k(&self) -> usize {
        self.block.len()
    }

    /// `k + Σ p_i`, the length of `B^p̄`.
    pub fn span(&self) -> u64 {
        self.block.len() as u64 + self.gaps.iter().sum::<u64>()
    }

    /// 0-based offsets of the fixed symbols.
    pub fn offsets(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.block.len());
        let mut o = 0;
        out.push(0);
        for &p in &self.gaps {
            o += p + 1;
            out.push(o);
        }
        out
    }

    pub fn with_gaps(&self, gaps: Vec<u64>) -> Result<Self, MeasureError> {
        Self::new(self.block.clone(), gaps)
    }
}

/// `p̄ ≺ q̄`: coordinatewise `≤` with at least one strict inequality.
pub fn precedes(p: &[u64], q: &[u64]) -> bool {
    p.len() == q.len() && p.iter().zip(q).all(|(a, b)| a <= b) && p.iter().zip(q).any(|(a, b)| a < b)
}

/// All vectors in `[0, box]^dim` in lexicographic order.
pub(crate) fn box_vectors(dim: usize, search_box: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=search_box).map(move |p| {
                    let mut w = v.clone();
                    w.push(p);
                    w
                })
            })
            .collect();
    }
    out
}

fn finite_symbols(spec: &MeasureSpec) -> Result<Vec<Symbol>, MeasureError> {
    match spec {
        MeasureSpec::GaussCf => Err(MeasureError::GaussSpread),
        _ => Ok(spec.alphabet().symbols_up_to(None)),
    }
}

fn check_size(symbols: usize, k: usize, search_box: u64) -> Result<(), MeasureError> {
    let n = (symbols as f64).powi(k as i32) * (search_box as f64 + 1.0).powi(k as i32 - 1);
    if n > MAX_ENUMERATION {
        return Err(MeasureError::TooManyBlocks(n));
    }
    Ok(())
}

/// `max |μ([B^p̄]) − Π(B)|` over `B ∈ Λ^k` and `p̄ ∈ [0, box]^{k−1}`.
pub fn spreadability_defect(spec: &MeasureSpec, k: usize, search_box: u64) -> Result<f64, MeasureError> {
    spec.validate()?;
    if k == 0 {
        return Err(MeasureError::EmptyBlock);
    }
    let symbols = finite_symbols(spec)?;
    check_size(symbols.len(), k, search_box)?;
    let vectors = box_vectors(k - 1, search_box);
    let mut worst = 0.0f64;
    for b in all_blocks(&symbols, k) {
        let pi = spec.product_of_symbol_measures(&b)?;
        for p in &vectors {
            let f = spec.spread_cylinder_measure(&SpreadBlock::new(b.clone(), p.clone())?)?;
            worst = worst.max((f - pi).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub q: Vec<u64>,
    pub value: f64,
}

/// What is known about `f(q̄)` for `q̄` outside the search box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scope", rename_all = "snake_case")]
pub enum TailBound {
    /// `f(q̄) ≤ sup_beyond_box < f(p̄₀)` for every `q̄` leaving the box, from
    /// the spectral decomposition of a two-state chain.
    Global { sup_beyond_box: f64 },
    /// Only the vectors inside the box were checked.
    InBox,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub k: usize,
    pub block: Vec<Symbol>,
    pub p0: Vec<u64>,
    /// `f(p̄₀) = μ([B^{p̄₀}])`.
    pub f0: f64,
    /// `Π(B)`.
    pub product: f64,
    /// Largest `μ([B^p̄]) − Π(B)` found, which defines `Q`.
    pub epsilon: f64,
    pub search_box: u64,
    /// `(q̄, f(q̄))` for every `q̄ ≻ p̄₀` in the box.
    pub certificate: Vec<CertificateEntry>,
    pub tail: TailBound,
}

impl WitnessResult {
    pub fn spread_block(&self) -> SpreadBlock {
        SpreadBlock {
            block: self.block.clone(),
            gaps: self.p0.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }
}

/// Searches for a block `B` and a vector `p̄₀` with `μ([B^q̄]) < μ([B^{p̄₀}])`
/// for every `q̄ ≻ p̄₀`.
///
/// `k` is the least length with a deviation above `eps_floor`. Among all
/// `(B, p̄)` of that length the largest positive deviation `ε` wins (first in
/// lexicographic order of `B`, then `p̄`). `Q = {q̄ : f(q̄) ≥ Π(B) + ε}` is
/// computed in the box and `p̄₀` is its lexicographically first `≺`-maximal
/// element.
pub fn find_witness(
    spec: &MeasureSpec,
    k_max: usize,
    search_box: u64,
    eps_floor: f64,
) -> Result<WitnessResult, MeasureError> {
    spec.validate()?;
    if matches!(spec, MeasureSpec::GaussCf) {
        return Err(MeasureError::Unsupported("the Gauss measure (use gauss_spread_measure)"));
    }
    let symbols = finite_symbols(spec)?;
    for k in 2..=k_max {
        check_size(symbols.len(), k, search_box)?;
        let vectors = box_vectors(k - 1, search_box);
        let mut best: Option<(f64, Vec<Symbol>, Vec<u64>)> = None;
        let mut worst_abs = 0.0f64;
        for b in all_blocks(&symbols, k) {
            let pi = spec.product_of_symbol_measures(&b)?;
            for p in &vectors {
                let f = spec.spread_cylinder_measure(&SpreadBlock::new(b.clone(), p.clone())?)?;
                let d = f - pi;
                worst_abs = worst_abs.max(d.abs());
                if best.as_ref().is_none_or(|(bd, _, _)| d > *bd) {
                    best = Some((d, b.clone(), p.clone()));
                }
            }
        }
        if worst_abs <= eps_floor {
            continue;
        }
        let (epsilon, block, _) = best.expect("box is non-empty");
        return certify(spec, k, block, epsilon, search_box, &vectors);
    }
    Err(MeasureError::NoDefectFound {
        k_max,
        search_box,
        eps_floor,
    })
}

fn certify(
    spec: &MeasureSpec,
    k: usize,
    block: Vec<Symbol>,
    epsilon: f64,
    search_box: u64,
    vectors: &[Vec<u64>],
) -> Result<WitnessResult, MeasureError> {
    let product = spec.product_of_symbol_measures(&block)?;
    let values: Vec<f64> = vectors
        .iter()
        .map(|q| spec.spread_cylinder_measure(&SpreadBlock::new(block.clone(), q.clone())?))
        .collect::<Result<_, _>>()?;
    let threshold = product + epsilon - TIE_TOL;
    let q_set: Vec<usize> = (0..vectors.len()).filter(|&i| values[i] >= threshold).collect();
    let p0_idx = *q_set
        .iter()
        .find(|&&i| !q_set.iter().any(|&j| precedes(&vectors[i], &vectors[j])))
        .expect("a finite non-empty set has a maximal element");
    let p0 = vectors[p0_idx].clone();
    let f0 = values[p0_idx];
    let mut certificate = Vec::new();
    for (q, &value) in vectors.iter().zip(&values) {
        if precedes(&p0, q) {
            if value >= f0 {
                return Err(MeasureError::CertificateViolation {
                    q: q.clone(),
                    value,
                    f0,
                });
            }
            certificate.push(CertificateEntry {
                q: q.clone(),
                value,
            });
        }
    }
    let tail = two_state_tail(spec, &block, search_box, f0).unwrap_or(TailBound::InBox);
    Ok(WitnessResult {
        k,
        block,
        p0,
        f0,
        product,
        epsilon,
        search_box,
        certificate,
        tail,
    })
}

/// For an unlabelled two-state chain, `(Tⁿ)_{ab} = π_b + λ₂ⁿ(δ_{ab} − π_b)`
/// with `λ₂ = T₀₀ + T₁₁ − 1`, so past the box
/// `f(q) ≤ Π(B) + π_a|δ_{ab} − π_b|·|λ₂|^{box+2}`.
fn two_state_tail(spec: &MeasureSpec, block: &[Symbol], search_box: u64, f0: f64) -> Option<TailBound> {
    let MeasureSpec::Markov {
        transition,
        labels: None,
    } = spec
    else {
        return None;
    };
    if transition.len() != 2 || block.len() != 2 {
        return None;
    }
    let chain = LabelledChain::from_spec(spec).ok()?;
    let pi = chain.stationary();
    let lambda2 = transition[0][0] + transition[1][1] - 1.0;
    let (a, b) = (block[0] as usize, block[1] as usize);
    let delta = if a == b { 1.0 } else { 0.0 };
    let exponent = i32::try_from(search_box + 2).ok()?;
    let sup = pi[a] * pi[b] + pi[a] * (delta - pi[b]).abs() * lambda2.abs().powi(exponent);
    (sup < f0).then_some(TailBound::Global { sup_beyond_box: sup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn markov_example() -> MeasureSpec {
        MeasureSpec::markov(vec![vec![0.9, 0.1], vec![0.1, 0.9]])
    }

    fn periodic_0011() -> MeasureSpec {
        MeasureSpec::Periodic {
            pattern: vec![0, 0, 1, 1],
        }
    }

    #[test]
    fn spread_block_geometry() {
        let sb = SpreadBlock::new(vec![5, 6, 7], vec![1, 2]).unwrap();
        assert_eq!(sb.span(), 6);
        assert_eq!(sb.offsets(), vec![0, 2, 5]);
        assert!(SpreadBlock::new(vec![], vec![]).is_err());
        assert!(SpreadBlock::new(vec![1, 1], vec![]).is_err());
        assert_eq!(SpreadBlock::contiguous(vec![3]).unwrap().span(), 1);
    }

    #[test]
    fn partial_order() {
        assert!(precedes(&[0, 1], &[0, 2]));
        assert!(precedes(&[0, 1], &[1, 1]));
        assert!(!precedes(&[0, 1], &[0, 1]));
        assert!(!precedes(&[0, 2], &[1, 1]));
    }

    #[test]
    fn bernoulli_defect_is_zero() {
        let spec = MeasureSpec::bernoulli(vec![0.3, 0.7]);
        for k in 1..=4 {
            assert_eq!(spreadability_defect(&spec, k, 4).unwrap(), 0.0);
        }
    }

    /// Oracle: `μ([ab]) = π_a T_ab`, `Π = ¼`; the deviation is largest at
    /// `p = 0`, where it is `0.45 − 0.25`.
    #[test]
    fn markov_defect() {
        let oracle = (0..=4)
            .map(|p| 0.25 * 0.8f64.powi(p + 1))
            .fold(0.0, f64::max);
        let d = spreadability_defect(&markov_example(), 2, 4).unwrap();
        assert!((d - oracle).abs() < 1e-15);
        assert!((d - 0.2).abs() < 1e-15);
    }

    #[test]
    fn periodic_defect() {
        assert_eq!(spreadability_defect(&periodic_0011(), 2, 4).unwrap(), 0.25);
    }

    #[test]
    fn markov_witness() {
        let w = find_witness(&markov_example(), 4, 20, DEFAULT_EPS_FLOOR).unwrap();
        assert_eq!(w.k, 2);
        assert_eq!(w.block, vec![0, 0]);
        assert_eq!(w.p0, vec![0]);
        assert!((w.f0 - 0.45).abs() < 1e-15);
        assert_eq!(w.certificate.len(), 20);
        for (i, e) in w.certificate.iter().enumerate() {
            let p = i as i32 + 1;
            assert_eq!(e.q, vec![p as u64]);
            let closed = 0.5 * (1.0 + 0.8f64.powi(p + 1));
            assert!((e.value / 0.5 - closed).abs() < 1e-12);
        }
        assert!(matches!(w.tail, TailBound::Global { .. }));
        let json = w.to_json();
        let back: WitnessResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn periodic_witness() {
        let w = find_witness(&periodic_0011(), 3, 4, DEFAULT_EPS_FLOOR).unwrap();
        assert_eq!(w.k, 2);
        assert_eq!(w.block, vec![0, 0]);
        assert_eq!(w.p0, vec![3]);
        assert_eq!(w.f0, 0.5);
        assert_eq!(w.tail, TailBound::InBox);
        assert_eq!(w.certificate.len(), 1);
        assert_eq!(w.certificate[0].value, 0.25);
    }

    #[test]
    fn witness_errors() {
        assert!(matches!(
            find_witness(&MeasureSpec::fair_coin(), 3, 4, DEFAULT_EPS_FLOOR),
            Err(MeasureError::NoDefectFound { .. })
        ));
        assert!(matches!(
            find_witness(&MeasureSpec::GaussCf, 3, 4, DEFAULT_EPS_FLOOR),
            Err(MeasureError::Unsupported(_))
        ));
    }

    proptest! {
        /// Every certificate value lies strictly below `f(p̄₀)`, and `p̄₀` is in `Q`.
        #[test]
        fn witness_certificates_hold(a in 0.05f64..0.95, b in 0.05f64..0.95, k_max in 2usize..4) {
            let spec = MeasureSpec::markov(vec![vec![a, 1.0 - a], vec![b, 1.0 - b]]);
            prop_assume!((a - b).abs() > 0.05);
            let w = find_witness(&spec, k_max, 6, DEFAULT_EPS_FLOOR).unwrap();
            prop_assert!(w.f0 >= w.product + w.epsilon - 1e-12);
            for e in &w.certificate {
                prop_assert!(precedes(&w.p0, &e.q));
                prop_assert!(e.value < w.f0);
            }
        }
    }
}
