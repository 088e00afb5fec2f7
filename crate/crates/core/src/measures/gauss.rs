use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::Symbol;

use super::MeasureError;

/// Default limit on the number of digit fillings in [`gauss_spread_measure`].
pub const DEFAULT_MAX_FILLINGS: u64 = 50_000_000;

/// Continuants `(p_{k−1}, q_{k−1}, p_k, q_k)` of `[0; b₁, …, b_k]`.
fn continuants_u128(block: &[Symbol]) -> Option<(u128, u128, u128, u128)> {
    let (mut pm, mut qm, mut p, mut q) = (1u128, 0u128, 0u128, 1u128);
    for &b in block {
        let b = b as u128;
        let np = b.checked_mul(p)?.checked_add(pm)?;
        let nq = b.checked_mul(q)?.checked_add(qm)?;
        (pm, qm, p, q) = (p, q, np, nq);
    }
    Some((pm, qm, p, q))
}

fn continuants_big(block: &[Symbol]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut pm, mut qm, mut p, mut q) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for &b in block {
        let b = BigInt::from(b);
        let np = &b * &p + &pm;
        let nq = &b * &q + &qm;
        pm = std::mem::replace(&mut p, np);
        qm = std::mem::replace(&mut q, nq);
    }
    (pm, qm, p, q)
}

/// Endpoints `α < β` of the interval of `x ∈ (0,1)` whose continued fraction
/// starts with `B`, as exact rationals.
pub fn gauss_cylinder_interval(block: &[Symbol]) -> Result<(BigRational, BigRational), MeasureError> {
    if block.is_empty() {
        return Err(MeasureError::EmptyBlock);
    }
    if let Some(&s) = block.iter().find(|&&s| s == 0) {
        return Err(MeasureError::SymbolOutsideAlphabet(s));
    }
    let (pm, qm, p, q) = continuants_big(block);
    let a = BigRational::new(p.clone(), q.clone());
    let b = BigRational::new(p + pm, q + qm);
    Ok(if a < b { (a, b) } else { (b, a) })
}

/// `λ([B]) = |log₂((1+β)/(1+α))|`.
///
/// With continuants the ratio is `1 ± 1/D`, `D = (q_k+q_{k−1})(q_k+p_k)`, so
/// the value is computed as `|ln_1p(±1/D)|/ln 2` without cancellation.
pub fn gauss_cylinder_measure(block: &[Symbol]) -> Result<f64, MeasureError> {
    if block.is_empty() {
        return Ok(1.0);
    }
    if let Some(&s) = block.iter().find(|&&s| s == 0) {
        return Err(MeasureError::SymbolOutsideAlphabet(s));
    }
    let d = match continuants_u128(block) {
        Some((_, qm, p, q)) => match (q.checked_add(qm), q.checked_add(p)) {
            (Some(x), Some(y)) => x as f64 * y as f64,
            _ => big_denominator(block),
        },
        None => big_denominator(block),
    };
    // sign of q_k p_{k−1} − q_{k−1} p_k is (−1)^k
    let eps = if block.len() % 2 == 1 { -1.0 } else { 1.0 };
    Ok(((eps / d).ln_1p() / std::f64::consts::LN_2).abs())
}

fn big_denominator(block: &[Symbol]) -> f64 {
    let (_, qm, p, q) = continuants_big(block);
    let d = (&q + qm) * (q + p);
    d.to_f64().unwrap_or(f64::INFINITY)
}

/// `λ([B^p̄])` with a rigorous error bound, for blocks over `ℕ`.
///
/// Sums `λ` over all fillings of the starred positions by digits `≤ M`; the
/// omitted mass is at most `(Σp_i)·log₂(1 + 1/(M+1))`. `M` is the least cap
/// for which this bound is `≤ tol`.
pub fn gauss_spread_measure(
    block: &[Symbol],
    gaps: &[u64],
    tol: f64,
) -> Result<(f64, f64), MeasureError> {
    gauss_spread_measure_with_limit(block, gaps, tol, DEFAULT_MAX_FILLINGS)
}

pub fn gauss_spread_measure_with_limit(
    block: &[Symbol],
    gaps: &[u64],
    tol: f64,
    max_fillings: u64,
) -> Result<(f64, f64), MeasureError> {
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
    if let Some(&s) = block.iter().find(|&&s| s == 0) {
        return Err(MeasureError::SymbolOutsideAlphabet(s));
    }
    if !(tol > 0.0) {
        return Err(MeasureError::BadTolerance(tol));
    }
    let stars: u64 = gaps.iter().sum();
    if stars == 0 {
        return Ok((gauss_cylinder_measure(block)?, 0.0));
    }
    let s = stars as f64;
    let tail = |m: u64| s * (1.0 / (m as f64 + 1.0)).ln_1p() / std::f64::consts::LN_2;
    // log₂(1 + 1/(M+1)) ≤ tol/s  ⇔  M + 1 ≥ 1/(2^{tol/s} − 1)
    let guess = (1.0 / (tol / s * std::f64::consts::LN_2).exp_m1()).ceil() - 1.0;
    let mut m = guess.max(1.0) as u64;
    while m > 1 && tail(m - 1) <= tol {
        m -= 1;
    }
    while tail(m) > tol {
        m += 1;
    }
    let fillings = (m as f64).powf(s);
    if fillings > max_fillings as f64 {
        return Err(MeasureError::TooManyFillings {
            cap: m,
            fillings,
            limit: max_fillings,
        });
    }
    // layout of the filled block and the indices of its starred positions
    let mut filled = Vec::with_capacity(block.len() + stars as usize);
    let mut star_idx = Vec::with_capacity(stars as usize);
    for (i, &b) in block.iter().enumerate() {
        filled.push(b);
        if let Some(&p) = gaps.get(i) {
            for _ in 0..p {
                star_idx.push(filled.len());
                filled.push(1);
            }
        }
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    loop {
        let v = gauss_cylinder_measure(&filled)?;
        // Neumaier summation
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        // odometer over the starred digits, last position fastest
        let mut j = star_idx.len();
        loop {
            if j == 0 {
                return Ok((sum + comp, tail(m)));
            }
            j -= 1;
            let pos = star_idx[j];
            if filled[pos] < m {
                filled[pos] += 1;
                break;
            }
            filled[pos] = 1;
        }
    }
}
