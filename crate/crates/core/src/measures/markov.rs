use crate::linalg::Matrix;
use crate::Symbol;

use super::{MeasureError, MeasureSpec};

/// Stationary finite-state chain whose state `i` emits `labels[i]`.
///
/// Bernoulli, Markov and periodic specs all have this form, which gives one
/// forward recursion for cylinders, spread blocks and gap laws.
#[derive(Clone, Debug)]
pub struct LabelledChain {
    transition: Matrix,
    stationary: Vec<f64>,
    labels: Vec<Symbol>,
}

impl LabelledChain {
    pub fn new(transition: Matrix, labels: Vec<Symbol>) -> Result<Self, MeasureError> {
        transition.check_stochastic()?;
        if labels.len() != transition.dim() {
            return Err(crate::sources::SourceError::InitialLength {
                states: transition.dim(),
                got: labels.len(),
            }
            .into());
        }
        let stationary = transition.stationary()?;
        Ok(LabelledChain {
            transition,
            stationary,
            labels,
        })
    }

    /// Chain form of a Bernoulli, Markov or periodic spec. Bernoulli symbols of
    /// weight zero are dropped so that the chain stays irreducible.
    pub fn from_spec(spec: &MeasureSpec) -> Result<Self, MeasureError> {
        match spec {
            MeasureSpec::Bernoulli { weights } => {
                spec.validate()?;
                let (labels, w): (Vec<Symbol>, Vec<f64>) = weights
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(i, &w)| (i as Symbol, w))
                    .unzip();
                let rows = vec![w; labels.len()];
                Self::new(Matrix::from_rows(&rows)?, labels)
            }
            MeasureSpec::Markov { transition, labels } => {
                let t = Matrix::from_rows(transition)?;
                let labels = labels
                    .clone()
                    .unwrap_or_else(|| (0..t.dim() as Symbol).collect());
                Self::new(t, labels)
            }
            MeasureSpec::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(crate::sources::SourceError::EmptyPattern.into());
                }
                let m = pattern.len();
                let mut t = Matrix::zeros(m);
                for i in 0..m {
                    t.set(i, (i + 1) % m, 1.0);
                }
                Self::new(t, pattern.clone())
            }
            MeasureSpec::GaussCf => Err(MeasureError::Unsupported("the Gauss measure")),
            MeasureSpec::Product { .. } => Err(MeasureError::Unsupported("product measures")),
        }
    }

    pub fn states(&self) -> usize {
        self.labels.len()
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    pub fn labels(&self) -> &[Symbol] {
        &self.labels
    }

    /// Zeroes the entries of `v` whose state does not emit `a`.
    pub fn restrict(&self, v: &mut [f64], a: Symbol) {
        for (x, &l) in v.iter_mut().zip(&self.labels) {
            if l != a {
                *x = 0.0;
            }
        }
    }

    /// `v·T`.
    pub fn step(&self, v: &[f64]) -> Vec<f64> {
        self.transition.left_mul(v)
    }

    /// `μ([B])` by the forward recursion.
    pub fn cylinder(&self, block: &[Symbol]) -> f64 {
        self.spread_cylinder(block, &vec![0; block.len().saturating_sub(1)])
    }

    /// `μ([B^p̄])`: between fixed symbols the chain makes `p_i + 1` free steps.
    pub fn spread_cylinder(&self, block: &[Symbol], gaps: &[u64]) -> f64 {
        let Some((&first, rest)) = block.split_first() else {
            return 1.0;
        };
        let mut v = self.stationary.clone();
        self.restrict(&mut v, first);
        for (&b, &p) in rest.iter().zip(gaps) {
            for _ in 0..=p {
                v = self.step(&v);
            }
            self.restrict(&mut v, b);
        }
        v.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_chain_drops_null_symbols() {
        let c = LabelledChain::from_spec(&MeasureSpec::bernoulli(vec![0.0, 1.0])).unwrap();
        assert_eq!(c.states(), 1);
        assert_eq!(c.labels(), &[1]);
        assert_eq!(c.cylinder(&[1, 1, 1]), 1.0);
        assert_eq!(c.cylinder(&[0]), 0.0);
    }

    #[test]
    fn periodic_chain_is_a_rotation() {
        let c = LabelledChain::from_spec(&MeasureSpec::Periodic {
            pattern: vec![0, 0, 1, 1],
        })
        .unwrap();
        assert!(c.stationary().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        assert!((c.cylinder(&[0, 0]) - 0.25).abs() < 1e-15);
        assert!((c.cylinder(&[0, 1, 1, 0]) - 0.25).abs() < 1e-15);
        assert_eq!(c.cylinder(&[0, 1, 0]), 0.0);
    }

    /// `π₀ (Tⁿ)₀₀` against the closed form `½·½(1 + 0.8ⁿ)`.
    #[test]
    fn two_state_spread_matches_closed_form() {
        let c = LabelledChain::from_spec(&MeasureSpec::markov(vec![
            vec![0.9, 0.1],
            vec![0.1, 0.9],
        ]))
        .unwrap();
        for p in 0..30u64 {
            let expect = 0.25 * (1.0 + 0.8f64.powi(p as i32 + 1));
            assert!((c.spread_cylinder(&[0, 0], &[p]) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn label_length_checked() {
        let spec = MeasureSpec::Markov {
            transition: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
            labels: Some(vec![0]),
        };
        assert!(LabelledChain::from_spec(&spec).is_err());
        assert!(LabelledChain::from_spec(&MeasureSpec::GaussCf).is_err());
    }
}
