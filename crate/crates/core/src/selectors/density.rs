use serde::{Deserialize, Serialize};

use super::{SelectionSet, SelectorError};

/// Running ratios `#(S ∩ [1,n])/n`.
///
/// The estimates are the minimum and maximum of the ratio over every
/// `n ∈ [N/64, N]`, a finite stand-in for liminf and limsup.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub lower_estimate: f64,
    pub upper_estimate: f64,
    pub checkpoints: Vec<(u64, f64)>,
}

/// Start of the tail window as a fraction of `N`.
pub const TAIL_DIVISOR: u64 = 64;

pub fn density_profile(
    set: &mut dyn SelectionSet,
    n: u64,
    checkpoints: &[u64],
) -> Result<DensityProfile, SelectorError> {
    if n == 0 {
        return Err(SelectorError::PrefixTooShort { need: 1, got: 0 });
    }
    let tail_start = (n / TAIL_DIVISOR).max(1);
    let mut cps: Vec<u64> = checkpoints.iter().copied().filter(|&c| c >= 1 && c <= n).collect();
    cps.sort_unstable();
    cps.dedup();
    let mut cp_iter = cps.into_iter().peekable();
    let mut out = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut next_member = set.next_index();
    let mut count = 0u64;
    for i in 1..=n {
        if i == next_member {
            count += 1;
            next_member = set.next_index();
        }
        if i >= tail_start {
            let r = count as f64 / i as f64;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if cp_iter.peek() == Some(&i) {
            cp_iter.next();
            out.push((i, count as f64 / i as f64));
        }
    }
    Ok(DensityProfile {
        lower_estimate: lo,
        upper_estimate: hi,
        checkpoints: out,
    })
}

/// `1, 10, 100, …` style checkpoints: `base^j` up to `n`, plus `n`.
pub fn geometric_checkpoints(n: u64, base: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = 1u64;
    while c < n {
        out.push(c);
        c = match c.checked_mul(base.max(2)) {
            Some(v) => v,
            None => break,
        };
    }
    out.push(n);
    out
}
