//! Restrictions of sampled sequences: preservation, simple-normality
//! preservation and non-preservation by a random set.

use normlab_core::empirics::{normality_defect, simple_normality_defect};
use normlab_core::measures::MeasureSpec;
use normlab_core::selectors::{
    characteristic_prefix, density_profile, determinism_score, restrict,
    superficial_decomposition, DecompositionParams, GapRule, SelectionSet, SetSpec, SUPERFICIAL_THRESHOLD,
};
use normlab_core::sources::{SymbolStreamExt, LOWER_DENSITY_ZERO_TOL};
use normlab_core::Symbol;

use super::{
    base_config, block_series, checkpoints, defect_checks, margin, measure_of, per_seed, restricted_sample,
    set_for_run, sticky_chain, tolerance, unsupported, Outcome,
};
use crate::config::ExperimentConfig;
use crate::report::{Comparison, Criterion, Measurement, Predicted, Series};
use crate::LabError;

/// Prefix length used for set statistics (entropy proxies, density).
pub(super) const SET_PREFIX: u64 = 1 << 20;

/// LZ76 rate below which a set counts as deterministic-looking.
const DETERMINISTIC_LZ_RATE: f64 = 0.1;

/// LZ76 rate above which a set counts as non-deterministic.
const RANDOM_LZ_RATE: f64 = 0.5;

/// Plug-in entropy rate `H_4 − H_3` (bits) at or above which a set counts as
/// non-deterministic.
pub(super) const RANDOM_ENTROPY_RATE: f64 = 0.2;

pub(super) fn wall_defaults() -> ExperimentConfig {
    ExperimentConfig {
        set: SetSpec::Progression { start: 1, step: 3 },
        k: vec![3],
        ..base_config("wall")
    }
}

pub(super) fn kamae_weiss_defaults() -> ExperimentConfig {
    ExperimentConfig {
        set: SetSpec::GarciaHedlundSupport,
        k: vec![3],
        ..base_config("kamae_weiss_toeplitz")
    }
}

pub(super) fn nondeterministic_defaults() -> ExperimentConfig {
    ExperimentConfig {
        set: SetSpec::Gaps {
            rule: GapRule::CoinMembership { p: 0.5 },
            seed: 0,
        },
        n: 1_000_000,
        k: vec![2],
        ..base_config("nondeterministic_nonpreservation")
    }
}

pub(super) fn simple_normality_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: Some(sticky_chain()),
        set: SetSpec::Progression { start: 2, step: 2 },
        k: vec![2],
        tolerance: Some(0.005),
        margin: Some(0.01),
        ..base_config("simple_normality_preservation")
    }
}

pub(super) fn superficial_preservation_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: Some(sticky_chain()),
        set: SetSpec::GeometricBlocks { base: 4, factor: 2 },
        k: vec![1, 2],
        tolerance: Some(0.005),
        seeds: 3,
        ..base_config("superficial_positive_density_preservation")
    }
}

/// LZ76 rate and lower density of the set on a fixed prefix.
fn set_statistics(out: &mut Outcome, config: &ExperimentConfig, seed: Option<u64>) -> Result<(f64, f64), LabError> {
    let mut set = set_for_run(&config.set, seed.unwrap_or(config.seed))?;
    let y = characteristic_prefix(&mut *set, SET_PREFIX);
    let lz = determinism_score(&y, 4)?.lz76_rate;
    let mut set = set_for_run(&config.set, seed.unwrap_or(config.seed))?;
    let lower = density_profile(&mut *set, SET_PREFIX, &[])?.lower_estimate;
    out.measure(Measurement::new("set_lz76_rate", seed, SET_PREFIX, lz, Predicted::NoPrediction));
    out.measure(Measurement::new(
        "set_lower_density",
        seed,
        SET_PREFIX,
        lower,
        Predicted::NoPrediction,
    ));
    Ok((lz, lower))
}

/// `x|_S` for a sample `x`: block defects below tolerance, and the set looks
/// deterministic with positive lower density.
pub(super) fn run_preservation(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure = measure_of(config)?.clone();
    let mut out = Outcome::default();
    let (lz, lower) = set_statistics(&mut out, config, None)?;
    out.check(Criterion::new(
        "set_looks_deterministic",
        None,
        lz,
        Comparison::Below,
        DETERMINISTIC_LZ_RATE,
    ));
    out.check(Criterion::new(
        "set_lower_density_positive",
        None,
        lower,
        Comparison::AtLeast,
        LOWER_DENSITY_ZERO_TOL,
    ));
    let first = measure.alphabet().first_symbol();
    let kmax = config.k.iter().copied().max().unwrap_or(1);
    let block = config.block.clone().unwrap_or_else(|| vec![first; kmax]);
    let cps = checkpoints(config, config.n);
    out.append(per_seed(config, |seed| {
        let mut o = Outcome::default();
        let xs = restricted_sample(&measure, &config.set, seed, config.n)?;
        defect_checks(&mut o, "restricted", &xs, &measure, &config.k, config, seed)?;
        o.series(Series::new("restricted_block_frequency", Some(seed), block_series(&xs, &block, &cps)?));
        Ok(o)
    })?);
    Ok(out)
}

/// Symbol frequencies of `x|_S` match μ while longer blocks do not.
pub(super) fn run_simple_normality(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure = measure_of(config)?.clone();
    per_seed(config, |seed| {
        let mut o = Outcome::default();
        let xs = restricted_sample(&measure, &config.set, seed, config.n)?;
        defect_checks(&mut o, "restricted", &xs, &measure, &[1], config, seed)?;
        for &k in config.k.iter().filter(|&&k| k >= 2) {
            let windows = (xs.len() + 1 - k) as u64;
            let d = normality_defect(&xs, &measure, k, config.cap)?;
            let name = format!("restricted_defect_k{k}");
            o.measure(Measurement::new(&name, Some(seed), windows, d, Predicted::NoPrediction));
            let tol = tolerance(config, windows);
            o.check(Criterion::new(
                format!("{name}_exceeds_margin"),
                Some(seed),
                d,
                Comparison::Above,
                margin(config, tol),
            ));
        }
        Ok(o)
    })
}

/// `x = 𝟙_S` is normal for the measure generated by `S`, and `x|_S` is
/// constant; an independent sample restricted to `S` stays normal.
pub(super) fn run_nondeterministic(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure = measure_of(config)?.clone();
    let derived = config
        .set
        .derived_measure()
        .ok_or_else(|| unsupported(config, "the set has no finitely described derived measure"))?;
    if derived != measure {
        return Err(unsupported(
            config,
            "the measure must be the one generated by the set, so that its indicator is a normal sequence",
        ));
    }
    per_seed(config, |seed| {
        let mut o = Outcome::default();
        let (lz, _) = set_statistics(&mut o, config, Some(seed))?;
        o.check(Criterion::new(
            "set_looks_random",
            Some(seed),
            lz,
            Comparison::Above,
            RANDOM_LZ_RATE,
        ));
        let mut set = set_for_run(&config.set, seed)?;
        let x: Vec<Symbol> = characteristic_prefix(&mut *set, config.n)
            .into_iter()
            .map(Symbol::from)
            .collect();
        defect_checks(&mut o, "indicator", &x, &measure, &config.k, config, seed)?;
        let xs: Vec<Symbol> = x.iter().copied().filter(|&s| s == 1).collect();
        if xs.is_empty() {
            return Err(unsupported(config, "the set has no members in the prefix"));
        }
        let d = simple_normality_defect(&xs, &measure, config.cap)?;
        let tol = tolerance(config, xs.len() as u64);
        o.measure(Measurement::new(
            "indicator_restricted_simple_defect",
            Some(seed),
            xs.len() as u64,
            d,
            Predicted::analytic(1.0 - measure.symbol_measure(1)?),
        ));
        o.check(Criterion::new(
            "indicator_restricted_simple_defect_exceeds_margin",
            Some(seed),
            d,
            Comparison::Above,
            margin(config, tol),
        ));
        // an independent sample along the same set
        let z = restrict(measure.sample_stream(seed.wrapping_add(0x5151))?, set_for_run(&config.set, seed)?)
            .take_prefix(xs.len());
        defect_checks(&mut o, "independent_restricted", &z, &measure, &config.k, config, seed)?;
        Ok(o)
    })
}

/// `x|_S` along a superficial set of positive lower density; the set's
/// decomposition residual is reported with the defects.
pub(super) fn run_superficial_preservation(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure: MeasureSpec = measure_of(config)?.clone();
    let mut out = Outcome::default();
    let horizon = horizon_for(config)?;
    let mut set = set_for_run(&config.set, config.seed)?;
    let y = characteristic_prefix(&mut *set, horizon);
    let dec = superficial_decomposition(&y, DecompositionParams::default())?;
    let mut set = set_for_run(&config.set, config.seed)?;
    let lower = density_profile(&mut *set, horizon, &[])?.lower_estimate;
    out.measure(Measurement::new(
        "set_residual",
        None,
        horizon,
        dec.residual,
        Predicted::NoPrediction,
    ));
    out.measure(Measurement::new(
        "set_lower_density",
        None,
        horizon,
        lower,
        Predicted::NoPrediction,
    ));
    out.check(Criterion::new(
        "set_superficial",
        None,
        dec.residual,
        Comparison::Below,
        SUPERFICIAL_THRESHOLD,
    ));
    out.check(Criterion::new(
        "set_lower_density_positive",
        None,
        lower,
        Comparison::AtLeast,
        LOWER_DENSITY_ZERO_TOL,
    ));
    out.append(per_seed(config, |seed| {
        let mut o = Outcome::default();
        let xs = restricted_sample(&measure, &config.set, seed, config.n)?;
        defect_checks(&mut o, "restricted", &xs, &measure, &config.k, config, seed)?;
        Ok(o)
    })?);
    Ok(out)
}

/// Position of the `n`-th member of the set.
fn horizon_for(config: &ExperimentConfig) -> Result<u64, LabError> {
    let mut set = set_for_run(&config.set, config.seed)?;
    let mut last = 0;
    for _ in 0..config.n {
        last = set.next_index();
    }
    Ok(last)
}
