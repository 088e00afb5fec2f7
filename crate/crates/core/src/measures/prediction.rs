use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Alphabet, Symbol};

use super::{gauss_spread_measure, LabelledChain, MeasureError, MeasureSpec, SpreadBlock};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCoefficients {
    /// `c_n = ν([1,0ⁿ,1])/ν([1])` for `n = 0, …, n_max`.
    pub coefficients: Vec<f64>,
    /// `1 − Σ c_n`.
    pub tail: f64,
}

fn binary_chain(nu: &MeasureSpec) -> Result<(LabelledChain, f64), MeasureError> {
    if nu.alphabet() != Alphabet::binary() {
        return Err(MeasureError::NotBinary);
    }
    let chain = LabelledChain::from_spec(nu)?;
    let ones: f64 = chain
        .stationary()
        .iter()
        .zip(chain.labels())
        .filter(|(_, &l)| l == 1)
        .map(|(p, _)| p)
        .sum();
    if ones <= 0.0 {
        return Err(MeasureError::ZeroOneMass);
    }
    Ok((chain, ones))
}

/// Law of the distance to the next 1 seen from a 1: `c_n` is the conditional
/// probability that exactly `n` zeros follow.
pub fn gap_conditional_coefficients(nu: &MeasureSpec, n_max: usize) -> Result<GapCoefficients, MeasureError> {
    let (chain, ones) = binary_chain(nu)?;
    let mut v: Vec<f64> = chain.stationary().iter().map(|p| p / ones).collect();
    chain.restrict(&mut v, 1);
    let mut coefficients = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        v = chain.step(&v);
        let mut hit = v.clone();
        chain.restrict(&mut hit, 1);
        coefficients.push(hit.iter().sum());
        chain.restrict(&mut v, 0);
    }
    let tail = (1.0 - coefficients.iter().sum::<f64>()).max(0.0);
    Ok(GapCoefficients { coefficients, tail })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionOptions {
    /// Conditional mass of the patterns left out.
    pub tol: f64,
    /// Tolerance for each Gauss spread measure.
    pub gauss_tol: f64,
    /// Largest number of zeros allowed in one group before giving up.
    pub max_zeros: u64,
}

impl Default for PredictionOptions {
    fn default() -> Self {
        PredictionOptions {
            tol: 1e-9,
            gauss_tol: 1e-7,
            max_zeros: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// `Σ μ([B^q̄])·ν([C]|[1])` over the enumerated `C`. The limit lies in
    /// `[value, value + error_bound]`.
    pub value: f64,
    pub error_bound: f64,
    /// Total conditional mass enumerated.
    pub mass: f64,
    /// Smallest and largest `μ([B^q̄])` with positive weight.
    pub min_term: f64,
    pub max_term: f64,
    pub terms: usize,
}

/// Limit of the frequency of `B^p̄` in `x|_S` for `x` μ-normal and `S`
/// generating `ν` when `x` and `𝟙_S` are independent.
///
/// Between the fixed symbols `i` and `i+1` of `B^p̄` lie `r_i = p_i + 1` steps
/// from one 1 of `𝟙_S` to the next; if these contain `Z_i` zeros in total the
/// symbols sit at distance `q_i + 1` in `x` with `q_i = p_i + Z_i`. The law of
/// `Z̄` given a 1 at the start comes from the chain form of `ν`.
pub fn predicted_restricted_frequency(
    mu: &MeasureSpec,
    nu: &MeasureSpec,
    sb: &SpreadBlock,
    opts: PredictionOptions,
) -> Result<Prediction, MeasureError> {
    if !(opts.tol > 0.0) {
        return Err(MeasureError::BadTolerance(opts.tol));
    }
    mu.validate()?;
    let (chain, ones) = binary_chain(nu)?;
    let mut alpha: Vec<f64> = chain.stationary().iter().map(|p| p / ones).collect();
    chain.restrict(&mut alpha, 1);
    let mut cache: HashMap<Vec<u64>, (f64, f64)> = HashMap::new();
    let mut eval = |q: &[u64]| -> Result<(f64, f64), MeasureError> {
        if let Some(&v) = cache.get(q) {
            return Ok(v);
        }
        let v = match mu {
            MeasureSpec::GaussCf => gauss_spread_measure(&sb.block, q, opts.gauss_tol)?,
            _ => (mu.spread_cylinder_measure(&sb.with_gaps(q.to_vec())?)?, 0.0),
        };
        cache.insert(q.to_vec(), v);
        Ok(v)
    };
    let mut zmax = 16u64;
    loop {
        let kernels = GroupKernels::new(&chain, &sb.gaps, zmax);
        let mut acc = Accumulator::default();
        let mut q = sb.gaps.clone();
        enumerate(&kernels, &sb.gaps, 0, &alpha, &mut q, &mut acc, &mut eval)?;
        if acc.mass >= 1.0 - opts.tol {
            return Ok(Prediction {
                value: acc.value,
                error_bound: (1.0 - acc.mass).max(0.0) + acc.bound,
                mass: acc.mass,
                min_term: acc.min_term,
                max_term: acc.max_term,
                terms: acc.terms,
            });
        }
        if zmax >= opts.max_zeros {
            return Err(MeasureError::MassStalled {
                mass: acc.mass,
                tol: opts.tol,
                cap: zmax,
            });
        }
        zmax = (zmax * 2).min(opts.max_zeros);
    }
}

#[derive(Default)]
struct Accumulator {
    value: f64,
    bound: f64,
    mass: f64,
    min_term: f64,
    max_term: f64,
    terms: usize,
}

/// `G^{(r)}_Z`: sum over the ways to make `r` steps from a 1 to a 1 with `Z`
/// zeros in total, for every `r` needed and `Z ≤ zmax`.
struct GroupKernels {
    by_r: HashMap<u64, Vec<Matrix>>,
}

impl GroupKernels {
    fn new(chain: &LabelledChain, gaps: &[u64], zmax: u64) -> Self {
        let n = chain.states();
        let t = chain.transition();
        let mask = |a: Symbol| {
            let mut m = Matrix::zeros(n);
            for (i, &l) in chain.labels().iter().enumerate() {
                if l == a {
                    m.set(i, i, 1.0);
                }
            }
            m
        };
        let t1 = t.mul(&mask(1));
        let t0 = t.mul(&mask(0));
        // K_z = (T P₀)^z T P₁
        let mut single = Vec::with_capacity(zmax as usize + 1);
        let mut prefix = Matrix::identity(n);
        for _ in 0..=zmax {
            single.push(prefix.mul(&t1));
            prefix = prefix.mul(&t0);
        }
        let r_max = gaps.iter().map(|p| p + 1).max().unwrap_or(1);
        let mut by_r = HashMap::new();
        let mut current = single.clone();
        for r in 1..=r_max {
            if r > 1 {
                let mut next = Vec::with_capacity(single.len());
                for z in 0..single.len() {
                    let mut sum = Matrix::zeros(n);
                    for y in 0..=z {
                        sum.add_assign(&current[z - y].mul(&single[y]));
                    }
                    next.push(sum);
                }
                current = next;
            }
            if gaps.iter().any(|&p| p + 1 == r) {
                by_r.insert(r, current.clone());
            }
        }
        GroupKernels { by_r }
    }
}

fn enumerate(
    kernels: &GroupKernels,
    gaps: &[u64],
    depth: usize,
    v: &[f64],
    q: &mut Vec<u64>,
    acc: &mut Accumulator,
    eval: &mut dyn FnMut(&[u64]) -> Result<(f64, f64), MeasureError>,
) -> Result<(), MeasureError> {
    if depth == gaps.len() {
        let w: f64 = v.iter().sum();
        if w <= 0.0 {
            return Ok(());
        }
        let (value, bound) = eval(q)?;
        if acc.terms == 0 {
            acc.min_term = value;
            acc.max_term = value;
        }
        acc.min_term = acc.min_term.min(value);
        acc.max_term = acc.max_term.max(value);
        acc.value += w * value;
        acc.bound += w * bound;
        acc.mass += w;
        acc.terms += 1;
        return Ok(());
    }
    let p = gaps[depth];
    for (z, g) in kernels.by_r[&(p + 1)].iter().enumerate() {
        let next = g.left_mul(v);
        if next.iter().all(|&x| x == 0.0) {
            continue;
        }
        q[depth] = p + z as u64;
        enumerate(kernels, gaps, depth + 1, &next, q, acc, eval)?;
    }
    q[depth] = p;
    Ok(())
}
