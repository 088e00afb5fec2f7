use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rng_from_seed, Alphabet, SourceError, Symbol, SymbolStream};

/// `λ([k]) = log₂(1 + 1/(k(k+2)))`, the Gauss measure of digit `k`.
pub fn gauss_digit_measure(k: Symbol) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    (1.0 / (k * (k + 2.0))).ln_1p() / std::f64::consts::LN_2
}

/// Largest representable value strictly below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Past coordinate of the natural extension of the Gauss map.
///
/// Given `y`, the next digit has law `P(k|y) = (1+y)/((k+y)(k+1+y))` and the
/// state then moves to `1/(k+y)`. If `y` is Gauss distributed, so is the
/// next state, which makes the emitted digit process stationary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussMirrorState {
    y: f64,
}

impl GaussMirrorState {
    pub fn new(y: f64) -> Result<Self, SourceError> {
        if !(0.0..1.0).contains(&y) {
            return Err(SourceError::MirrorState(y));
        }
        Ok(GaussMirrorState { y })
    }

    /// Gauss-distributed state from a uniform `u ∈ [0, 1]`.
    pub fn from_uniform(u: f64) -> Self {
        let y = (u.clamp(0.0, 1.0) * std::f64::consts::LN_2).exp_m1();
        GaussMirrorState {
            y: y.min(BELOW_ONE),
        }
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn conditional_probability(&self, k: Symbol) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let k = k as f64;
        (1.0 + self.y) / ((k + self.y) * (k + 1.0 + self.y))
    }

    /// `Σ_{k ≤ K} P(k|y) = 1 − (1+y)/(K+1+y)`.
    pub fn partial_sum(&self, big_k: Symbol) -> f64 {
        1.0 - (1.0 + self.y) / (big_k as f64 + 1.0 + self.y)
    }

    /// Smallest `K ≥ 1` with `Σ_{k ≤ K} P(k|y) ≥ u`, for `u ∈ [0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> Symbol {
        let t = (1.0 + self.y) * u / (1.0 - u);
        // `as` saturates on huge or infinite values
        (t.ceil() as Symbol).max(1)
    }

    pub fn advance(&mut self, k: Symbol) {
        self.y = (1.0 / (k as f64 + self.y)).min(BELOW_ONE);
    }
}

/// Stationary continued-fraction digits under the Gauss measure.
pub struct GaussDigitStream {
    state: GaussMirrorState,
    rng: ChaCha8Rng,
    pos: u64,
}

impl GaussDigitStream {
    pub fn new(seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let state = GaussMirrorState::from_uniform(rng.gen::<f64>());
        GaussDigitStream { state, rng, pos: 0 }
    }

    pub fn state(&self) -> GaussMirrorState {
        self.state
    }
}

impl SymbolStream for GaussDigitStream {
    fn alphabet(&self) -> Alphabet {
        Alphabet::Naturals
    }

    fn next_symbol(&mut self) -> Symbol {
        let u: f64 = self.rng.gen();
        let k = self.state.inverse_cdf(u);
        self.state.advance(k);
        self.pos += 1;
        k
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
    fn digit_one_at_zero_state_is_one_half() {
        let s = GaussMirrorState::new(0.0).unwrap();
        assert_eq!(s.conditional_probability(1), 0.5);
    }

    #[test]
    fn conditional_law_sums_to_one() {
        for y in [0.0, 0.3, 0.99] {
            let s = GaussMirrorState::new(y).unwrap();
            let mut acc = 0.0;
            for k in 1..=1_000_000u64 {
                acc += s.conditional_probability(k);
                if k % 1000 == 0 || k < 50 {
                    assert!((acc - s.partial_sum(k)).abs() < 1e-12, "y={y} K={k}");
                }
            }
            // remaining tail is (1+y)/(K+1+y)
            assert!((1.0 - s.partial_sum(1_000_000) - (1.0 + y) / (1_000_001.0 + y)).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_of_conditional_law_is_gauss_measure() {
        // Oracle: integrate P(k|y) against the Gauss density dy/((1+y) ln 2)
        // by composite Simpson on [0,1].
        let steps = 20_000;
        let h = 1.0 / steps as f64;
        for k in 1..=6u64 {
            let f = |y: f64| {
                GaussMirrorState::new(y.min(BELOW_ONE)).unwrap().conditional_probability(k)
                    / ((1.0 + y) * std::f64::consts::LN_2)
            };
            let mut acc = f(0.0) + f(1.0);
            for i in 1..steps {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(i as f64 * h);
            }
            let integral = acc * h / 3.0;
            assert!((integral - gauss_digit_measure(k)).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn inverse_cdf_is_consistent_with_partial_sums() {
        for y in [0.0, 0.25, 0.7] {
            let s = GaussMirrorState::new(y).unwrap();
            for u in [0.0, 0.1, 0.5, 0.51, 0.9, 0.999, 0.999_999] {
                let k = s.inverse_cdf(u);
                assert!(s.partial_sum(k) >= u - 1e-12);
                if k > 1 {
                    assert!(s.partial_sum(k - 1) < u + 1e-12);
                }
            }
        }
    }

    #[test]
    fn state_stays_in_unit_interval() {
        let mut s = GaussDigitStream::new(3);
        for _ in 0..100_000 {
            s.next_symbol();
            let y = s.state().y();
            assert!((0.0..1.0).contains(&y));
        }
        assert!(GaussMirrorState::new(1.0).is_err());
    }

    #[test]
    fn digit_frequencies_match_gauss_measure() {
        let n = 2_000_000;
        let xs = GaussDigitStream::new(17).take_prefix(n);
        for k in 1..=5u64 {
            let f = xs.iter().filter(|&&d| d == k).count() as f64 / n as f64;
            assert!((f - gauss_digit_measure(k)).abs() < 0.002, "k={k}: {f}");
        }
    }

    #[test]
    fn gauss_digit_measure_values() {
        assert!((gauss_digit_measure(1) - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        assert!((gauss_digit_measure(2) - (9.0f64 / 8.0).log2()).abs() < 1e-15);
    }
}
