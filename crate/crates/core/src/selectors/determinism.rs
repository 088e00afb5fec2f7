use serde::{Deserialize, Serialize};

use super::SelectorError;

/// Finite-prefix proxies for the entropy of the measures generated by `𝟙_S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminismScore {
    /// `H_k − H_{k−1}` in bits for `k = 1..=k_max` (`H_0 = 0`).
    pub plugin_entropy_rates: Vec<f64>,
    /// `c(N)·log₂N / N` with `c` the LZ76 phrase count.
    pub lz76_rate: f64,
}

/// Plug-in block entropies and the normalized LZ76 complexity of a 0/1
/// prefix. Fails when the `k_max` table has more cells than windows.
pub fn determinism_score(y: &[u8], k_max: usize) -> Result<DeterminismScore, SelectorError> {
    if let Some(&b) = y.iter().find(|&&b| b > 1) {
        return Err(SelectorError::NotBinary(b as u64));
    }
    if k_max == 0 || k_max > 30 {
        return Err(SelectorError::Undersampled {
            k: k_max,
            windows: y.len() as u64,
            cells: 1u64 << k_max.min(63),
        });
    }
    let windows = (y.len() + 1).saturating_sub(k_max) as u64;
    let cells = 1u64 << k_max;
    if windows < cells {
        return Err(SelectorError::Undersampled {
            k: k_max,
            windows,
            cells,
        });
    }
    let mut rates = Vec::with_capacity(k_max);
    let mut prev = 0.0;
    for k in 1..=k_max {
        let h = block_entropy(y, k);
        rates.push(h - prev);
        prev = h;
    }
    Ok(DeterminismScore {
        plugin_entropy_rates: rates,
        lz76_rate: lz76_rate(y),
    })
}

fn block_entropy(y: &[u8], k: usize) -> f64 {
    let mask = (1usize << k) - 1;
    let mut counts = vec![0u64; 1 << k];
    let mut key = 0usize;
    for (i, &b) in y.iter().enumerate() {
        key = ((key << 1) | b as usize) & mask;
        if i + 1 >= k {
            counts[key] += 1;
        }
    }
    let total = (y.len() + 1 - k) as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

fn lz76_rate(y: &[u8]) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    lz76_complexity(y) as f64 * (n as f64).log2() / n as f64
}

/// Number of phrases in the Lempel–Ziv (1976) parsing: each phrase is the
/// longest factor starting earlier (overlap allowed) plus one new symbol.
///
/// Longest previous factors come from the suffix array: the best earlier
/// match of a suffix is one of its nearest neighbours in suffix order that
/// start before it.
pub fn lz76_complexity(s: &[u8]) -> u64 {
    let n = s.len();
    if n <= 1 {
        return n as u64;
    }
    assert!(n < i32::MAX as usize, "prefix too long for a 32-bit suffix array");
    let mut sa = vec![0i32; n];
    cdivsufsort::sort_in_place(s, &mut sa);
    let (psv, nsv) = earlier_neighbours(&sa);
    let lcp = |a: usize, b: usize| s[a..].iter().zip(&s[b..]).take_while(|(x, y)| x == y).count();
    let (mut c, mut l) = (0u64, 0usize);
    while l < n {
        let m = [psv[l], nsv[l]]
            .into_iter()
            .flatten()
            .map(|j| lcp(j, l))
            .max()
            .unwrap_or(0);
        c += 1;
        l += m + 1;
    }
    c
}

/// For every text position, the nearest suffixes before and after it in
/// suffix order that start earlier in the text.
fn earlier_neighbours(sa: &[i32]) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = sa.len();
    let (mut psv, mut nsv) = (vec![None; n], vec![None; n]);
    let mut stack: Vec<usize> = Vec::new();
    for &p in sa {
        let p = p as usize;
        while let Some(&top) = stack.last() {
            if top > p {
                nsv[top] = Some(p);
                stack.pop();
            } else {
                break;
            }
        }
        psv[p] = stack.last().copied();
        stack.push(p);
    }
    (psv, nsv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::selectors::{characteristic_prefix, gap_process_set, GapRule};
    use crate::sources::{BernoulliStream, SymbolStreamExt, Weights};

    #[test]
    fn lz76_phrase_counts_on_known_strings() {
        // 0·001·10·100·1000·101 in the standard worked example
        let s: Vec<u8> = "0001101001000101".bytes().map(|b| b - b'0').collect();
        assert_eq!(lz76_complexity(&s), 6);
        assert_eq!(lz76_complexity(&[0; 50]), 2);
        assert_eq!(lz76_complexity(&[0, 1, 0, 1, 0, 1, 0, 1]), 3);
    }

    /// Kaspar and Schuster's quadratic scan.
    fn lz76_reference(s: &[u8]) -> u64 {
        let n = s.len();
        if n <= 1 {
            return n as u64;
        }
        let (mut c, mut l, mut i, mut k, mut k_max) = (1u64, 1usize, 0usize, 1usize, 1usize);
        loop {
            if s[i + k - 1] == s[l + k - 1] {
                k += 1;
                if l + k > n {
                    c += 1;
                    break;
                }
            } else {
                k_max = k_max.max(k);
                i += 1;
                if i == l {
                    c += 1;
                    l += k_max;
                    if l + 1 > n {
                        break;
                    }
                    i = 0;
                    k = 1;
                    k_max = 1;
                } else {
                    k = 1;
                }
            }
        }
        c
    }

    proptest! {
        #[test]
        fn lz76_matches_the_quadratic_scan(s in prop::collection::vec(0u8..2, 0..300)) {
            prop_assert_eq!(lz76_complexity(&s), lz76_reference(&s));
        }

        #[test]
        fn lz76_matches_on_low_entropy_strings(
            s in prop::collection::vec(prop_oneof![9 => Just(0u8), 1 => Just(1u8)], 0..400)
        ) {
            prop_assert_eq!(lz76_complexity(&s), lz76_reference(&s));
        }
    }

    #[test]
    fn periodic_prefix_has_vanishing_rate() {
        let y: Vec<u8> = (0..100_000).map(|i| (i % 3 == 2) as u8).collect();
        let score = determinism_score(&y, 8).unwrap();
        assert!(score.lz76_rate < 0.05);
        assert!(score.plugin_entropy_rates[7].abs() < 1e-9);
    }

    #[test]
    fn fair_coin_has_rate_near_one() {
        let y: Vec<u8> = BernoulliStream::new(Weights::Finite(vec![0.5, 0.5]), 8)
            .unwrap()
            .take_prefix(100_000)
            .into_iter()
            .map(|s| s as u8)
            .collect();
        let score = determinism_score(&y, 8).unwrap();
        assert!((0.8..=1.1).contains(&score.lz76_rate), "{}", score.lz76_rate);
        assert!((score.plugin_entropy_rates[0] - 1.0).abs() < 0.01);
    }

    /// The renewal chain behind gaps {1,3} has entropy rate 1/2 bit: one fair
    /// choice per returned 1, and 1's have density 1/2.
    #[test]
    fn gap_set_has_positive_conditional_entropy() {
        let rule = GapRule::IidGaps {
            values: vec![1, 3],
            weights: vec![0.5, 0.5],
        };
        let y = characteristic_prefix(&mut gap_process_set(rule, 1).unwrap(), 1_000_000);
        let score = determinism_score(&y, 4).unwrap();
        assert!(score.plugin_entropy_rates[3] >= 0.2);
        assert!((score.plugin_entropy_rates[3] - 0.5).abs() < 0.05);
    }

    #[test]
    fn undersampled_tables_are_flagged() {
        let y = vec![0u8; 100];
        assert!(matches!(
            determinism_score(&y, 8),
            Err(SelectorError::Undersampled { .. })
        ));
        assert!(matches!(determinism_score(&[0, 2], 1), Err(SelectorError::NotBinary(2))));
    }
}
