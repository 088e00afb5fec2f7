//! Finite-prefix version of the three-part splitting of superficial sets.
//!
//! A *wrapped constant block* is a maximal run of equal symbols together with
//! its two bordering symbols (`10…01` or `01…10`). Wrapped blocks are
//! discarded into the density-zero part `A` on a growing schedule of length
//! thresholds; what is left splits into runs of 1's (`B`) and of 0's (`C`).

use serde::{Deserialize, Serialize};

use super::SelectorError;

/// Residual below which a prefix is treated as superficial.
pub const SUPERFICIAL_THRESHOLD: f64 = 0.1;

/// Closed interval `[start, end]` of positions (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: u64,
    pub end: u64,
}

impl Interval {
    pub fn new(start: u64, end: u64) -> Self {
        debug_assert!(start <= end);
        Interval { start, end }
    }

    pub fn len(&self) -> u64 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: u64) -> bool {
        self.start <= p && p <= self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionParams {
    /// Shortest prefix accepted.
    pub min_prefix: u64,
    /// Largest scheduled threshold; also the threshold applied after the
    /// schedule ends.
    pub m_cap: u64,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        DecompositionParams {
            min_prefix: 64,
            m_cap: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperficialDecomposition {
    /// Length `N` of the analysed prefix.
    pub horizon: u64,
    pub a: Vec<Interval>,
    pub b: Vec<Interval>,
    pub c: Vec<Interval>,
    /// Members of `S` lying in `A`, increasing.
    pub s_in_a: Vec<u64>,
    /// `n₀ = 1, n₁, …` as realized on the prefix.
    pub schedule: Vec<u64>,
    /// `|A ∩ [1,N]| / N`.
    pub residual: f64,
}

impl SuperficialDecomposition {
    /// `B = [1, N]`: the decomposition of `S = ℕ`.
    pub fn full(horizon: u64) -> Self {
        SuperficialDecomposition {
            horizon,
            a: vec![],
            b: vec![Interval::new(1, horizon)],
            c: vec![],
            s_in_a: vec![],
            schedule: vec![1],
            residual: 0.0,
        }
    }

    /// `A = S`, `B = ∅`, `C = ℕ ∖ S` for a density-zero set given by its
    /// members up to `horizon`.
    pub fn density_zero(members: &[u64], horizon: u64) -> Self {
        let mut a = Vec::new();
        let mut c = Vec::new();
        let mut next = 1u64;
        for &s in members.iter().filter(|&&s| s >= 1 && s <= horizon) {
            if s > next {
                c.push(Interval::new(next, s - 1));
            }
            match a.last_mut() {
                Some(Interval { end, .. }) if *end + 1 == s => *end = s,
                _ => a.push(Interval::new(s, s)),
            }
            next = s + 1;
        }
        if next <= horizon {
            c.push(Interval::new(next, horizon));
        }
        let s_in_a: Vec<u64> = members.iter().copied().filter(|&s| s <= horizon).collect();
        let residual = s_in_a.len() as f64 / horizon.max(1) as f64;
        SuperficialDecomposition {
            horizon,
            a,
            b: vec![],
            c,
            s_in_a,
            schedule: vec![1],
            residual,
        }
    }

    pub fn is_superficial(&self) -> bool {
        self.residual < SUPERFICIAL_THRESHOLD
    }

    /// Checks the part invariants: every part inside `[1, N]`, intervals
    /// increasing and pairwise disjoint, the parts covering `[1, N]`, and
    /// `s_in_a ⊂ A`.
    pub fn validate(&self) -> Result<(), String> {
        let mut all: Vec<(Interval, char)> = Vec::new();
        for (part, tag) in [(&self.a, 'A'), (&self.b, 'B'), (&self.c, 'C')] {
            for w in part.windows(2) {
                if w[0].end >= w[1].start {
                    return Err(format!("{tag} intervals overlap or are out of order"));
                }
            }
            for iv in part {
                if iv.start == 0 || iv.start > iv.end || iv.end > self.horizon {
                    return Err(format!(
                        "{tag} interval [{}, {}] outside [1, {}]",
                        iv.start, iv.end, self.horizon
                    ));
                }
                all.push((*iv, tag));
            }
        }
        all.sort();
        let mut next = 1u64;
        for (iv, tag) in &all {
            if iv.start < next {
                return Err(format!("{tag} interval [{}, {}] overlaps another part", iv.start, iv.end));
            }
            if iv.start > next {
                return Err(format!("position {next} belongs to no part"));
            }
            next = iv.end + 1;
        }
        if next != self.horizon + 1 {
            return Err(format!("position {next} belongs to no part"));
        }
        let mut ai = 0;
        for w in self.s_in_a.windows(2) {
            if w[0] >= w[1] {
                return Err("members of S in A are not increasing".into());
            }
        }
        for &s in &self.s_in_a {
            while ai < self.a.len() && self.a[ai].end < s {
                ai += 1;
            }
            if ai == self.a.len() || !self.a[ai].contains(s) {
                return Err(format!("member {s} of S listed in A lies outside A"));
            }
        }
        Ok(())
    }
}

struct Run {
    start: u64,
    end: u64,
    value: u8,
}

fn runs_of(y: &[u8]) -> Vec<Run> {
    let mut runs: Vec<Run> = Vec::new();
    for (i, &v) in y.iter().enumerate() {
        let p = i as u64 + 1;
        match runs.last_mut() {
            Some(r) if r.value == v => r.end = p,
            _ => runs.push(Run {
                start: p,
                end: p,
                value: v,
            }),
        }
    }
    runs
}

/// Splits the prefix `y = 𝟙_S|_{[1,N]}` into `A`, `B`, `C`.
///
/// The schedule is `n₀ = 1` and, for `m ≥ 1`, `n_m` the least `n > n_{m−1}`
/// outside every wrapped block of length `m−1` or `m` such that wrapped blocks
/// of length `≤ m` cover fewer than `n'/m` of the positions `[1, n']` for all
/// `n' ∈ [n, N]`. It stops at `m_cap` or at the first `m` without such `n`;
/// since the condition is about all large `n'`, an `m` whose covering bound
/// still fails in the second half of the prefix also ends the schedule.
/// Inside `[n_m, n_{m+1})` wrapped blocks of length `≤ m` go to `A`; after the
/// last scheduled point the threshold is `m_cap`. Runs left over are
/// classified by symbol, and any `B` or `C` interval shorter than an earlier
/// one of its kind (the one touching `N` excepted) also moves to `A`.
pub fn superficial_decomposition(
    y: &[u8],
    params: DecompositionParams,
) -> Result<SuperficialDecomposition, SelectorError> {
    let n = y.len() as u64;
    if n < params.min_prefix.max(1) {
        return Err(SelectorError::PrefixTooShort {
            need: params.min_prefix.max(1),
            got: n,
        });
    }
    if let Some(&b) = y.iter().find(|&&b| b > 1) {
        return Err(SelectorError::NotBinary(b as u64));
    }
    let runs = runs_of(y);
    let last = runs.len() - 1;
    // wrapped length of each interior run
    let wrapped: Vec<Option<u64>> = runs
        .iter()
        .enumerate()
        .map(|(r, run)| (r > 0 && r < last).then(|| run.end - run.start + 3))
        .collect();
    let mut minlen = vec![u64::MAX; n as usize + 2];
    for (r, run) in runs.iter().enumerate() {
        if let Some(l) = wrapped[r] {
            for p in run.start - 1..=run.end + 1 {
                let slot = &mut minlen[p as usize];
                *slot = (*slot).min(l);
            }
        }
    }
    let run_of = |p: u64| runs.partition_point(|r| r.end < p);
    let covered_by_length = |p: u64, lens: [u64; 2]| -> bool {
        let r = run_of(p);
        let hit = |idx: usize| wrapped[idx].is_some_and(|l| lens.contains(&l));
        hit(r)
            || (p == runs[r].start && r > 0 && hit(r - 1))
            || (p == runs[r].end && r < last && hit(r + 1))
    };

    let mut schedule = vec![1u64];
    for m in 1..=params.m_cap {
        let mut cov = 0u64;
        let mut last_bad = 0u64;
        for p in 1..=n {
            if minlen[p as usize] <= m {
                cov += 1;
            }
            if m * cov >= p {
                last_bad = p;
            }
        }
        if last_bad > n / 2 {
            break;
        }
        let prev = *schedule.last().expect("schedule starts with n0");
        let from = prev.max(last_bad) + 1;
        let lens = [m.saturating_sub(1), m];
        match (from..=n).find(|&p| !covered_by_length(p, lens)) {
            Some(nm) => schedule.push(nm),
            None => break,
        }
    }

    let mut in_a = vec![false; n as usize + 1];
    for (r, run) in runs.iter().enumerate() {
        let Some(l) = wrapped[r] else { continue };
        let start = run.start - 1;
        // window containing the block start
        let w = schedule.partition_point(|&s| s <= start);
        let threshold = if w == 0 {
            0
        } else if w >= schedule.len() {
            params.m_cap
        } else {
            (w - 1) as u64
        };
        if l <= threshold {
            for p in start..=run.end + 1 {
                in_a[p as usize] = true;
            }
        }
    }

    // leftover maximal constant stretches, then the monotone filter
    let collect = |in_a: &[bool]| {
        let mut b = Vec::new();
        let mut c = Vec::new();
        let mut p = 1u64;
        while p <= n {
            if in_a[p as usize] {
                p += 1;
                continue;
            }
            let v = y[(p - 1) as usize];
            let s = p;
            while p <= n && !in_a[p as usize] && y[(p - 1) as usize] == v {
                p += 1;
            }
            let iv = Interval::new(s, p - 1);
            if v == 1 {
                b.push(iv);
            } else {
                c.push(iv);
            }
        }
        (b, c)
    };
    let (b0, c0) = collect(&in_a);
    for part in [&b0, &c0] {
        let mut longest = 0u64;
        for iv in part {
            if iv.len() < longest && iv.end < n {
                for p in iv.start..=iv.end {
                    in_a[p as usize] = true;
                }
            } else {
                longest = longest.max(iv.len());
            }
        }
    }
    let (b, c) = collect(&in_a);
    let mut a = Vec::new();
    let mut s_in_a = Vec::new();
    let mut a_count = 0u64;
    for p in 1..=n {
        if in_a[p as usize] {
            a_count += 1;
            if y[(p - 1) as usize] == 1 {
                s_in_a.push(p);
            }
            match a.last_mut() {
                Some(Interval { end, .. }) if *end + 1 == p => *end = p,
                _ => a.push(Interval::new(p, p)),
            }
        }
    }
    Ok(SuperficialDecomposition {
        horizon: n,
        a,
        b,
        c,
        s_in_a,
        schedule,
        residual: a_count as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selectors::{arithmetic_progression, characteristic_prefix, SetSpec};
    use proptest::prelude::*;

    fn params() -> DecompositionParams {
        DecompositionParams::default()
    }

    #[test]
    fn all_ones_is_one_b_interval() {
        let d = superficial_decomposition(&vec![1u8; 1000], params()).unwrap();
        assert_eq!(d.b, vec![Interval::new(1, 1000)]);
        assert!(d.a.is_empty() && d.c.is_empty());
        assert_eq!(d.residual, 0.0);
        d.validate().unwrap();
    }

    #[test]
    fn alternating_prefix_is_all_residual() {
        let y: Vec<u8> = (0..10_000).map(|i| (i % 2) as u8).collect();
        let d = superficial_decomposition(&y, params()).unwrap();
        assert!(d.residual > 0.99, "{}", d.residual);
        assert!(!d.is_superficial());
        d.validate().unwrap();
    }

    #[test]
    fn geometric_blocks_are_superficial() {
        let n = 4u64.pow(10);
        let mut s = SetSpec::GeometricBlocks { base: 4, factor: 2 }.build().unwrap();
        let y = characteristic_prefix(s.as_mut(), n);
        let d = superficial_decomposition(&y, params()).unwrap();
        d.validate().unwrap();
        assert!(d.residual < 0.05);
        assert!(d.is_superficial());
        for j in 1..10u32 {
            let iv = Interval::new(4u64.pow(j), 2 * 4u64.pow(j) - 1);
            assert!(d.b.contains(&iv), "missing {iv:?}");
        }
    }

    #[test]
    fn short_prefix_rejected() {
        assert!(matches!(
            superficial_decomposition(&[1, 0, 1], params()),
            Err(SelectorError::PrefixTooShort { need: 64, got: 3 })
        ));
    }

    #[test]
    fn density_zero_constructor_is_consistent() {
        let d = SuperficialDecomposition::density_zero(&[1, 2, 4, 8, 16], 20);
        d.validate().unwrap();
        assert_eq!(d.a[0], Interval::new(1, 2));
        assert_eq!(d.c[0], Interval::new(3, 3));
        assert!(d.b.is_empty());
    }

    #[test]
    fn validation_catches_overlaps_and_gaps() {
        let mut d = SuperficialDecomposition::full(10);
        d.c.push(Interval::new(5, 6));
        assert!(d.validate().is_err());
        let mut d = SuperficialDecomposition::full(10);
        d.b = vec![Interval::new(1, 5)];
        assert!(d.validate().is_err());
        let mut d = SuperficialDecomposition::full(10);
        d.s_in_a = vec![3];
        assert!(d.validate().is_err());
    }

    proptest! {
        #[test]
        fn progressions_are_never_superficial(step in 2u64..=50, start in 1u64..=50) {
            let start = (start - 1) % step + 1;
            let mut s = arithmetic_progression(start, step).unwrap();
            let y = characteristic_prefix(&mut s, 20_000);
            let d = superficial_decomposition(&y, params()).unwrap();
            prop_assert!(d.residual > 0.9, "step {} residual {}", step, d.residual);
            prop_assert!(d.validate().is_ok());
        }

        #[test]
        fn parts_respect_their_symbols(bits in proptest::collection::vec(0u8..=1, 64..600)) {
            let d = superficial_decomposition(&bits, params()).unwrap();
            prop_assert!(d.validate().is_ok());
            for iv in &d.b {
                prop_assert!((iv.start..=iv.end).all(|p| bits[(p - 1) as usize] == 1));
            }
            for iv in &d.c {
                prop_assert!((iv.start..=iv.end).all(|p| bits[(p - 1) as usize] == 0));
            }
            for part in [&d.b, &d.c] {
                let lens: Vec<u64> = part.iter().filter(|iv| iv.end < d.horizon).map(|iv| iv.len()).collect();
                prop_assert!(lens.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
