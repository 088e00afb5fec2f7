//! Explicit constructions: a normal sequence that stays normal along a
//! superficial set, and one that loses simple normality along a set of lower
//! density zero.

use normlab_core::empirics::simple_normality_defect;
use normlab_core::measures::MeasureSpec;
use normlab_core::selectors::{
    characteristic_prefix, indices_up_to, superficial_decomposition, DecompositionParams, SetSpec,
    SUPERFICIAL_THRESHOLD,
};
use normlab_core::sources::{
    build_density_zero_spoiler, build_preserving_pair, Alphabet, SpoilerMode, SymbolStreamExt,
};
use normlab_core::Symbol;

use super::{
    base_config, defect_checks, margin, measure_of, per_seed, set_for_run, sticky_chain, tolerance,
    unsupported, Outcome,
};
use crate::config::ExperimentConfig;
use crate::report::{Comparison, Criterion, Measurement, Predicted, Series};
use crate::LabError;

pub(super) fn preserving_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: Some(sticky_chain()),
        set: SetSpec::GeometricBlocks { base: 4, factor: 2 },
        k: vec![2],
        tolerance: Some(0.01),
        seeds: 3,
        ..base_config("superficial_construction")
    }
}

pub(super) fn spoiler_defaults() -> ExperimentConfig {
    ExperimentConfig {
        set: SetSpec::SparseBlocks { base: 4 },
        k: vec![2],
        tolerance: Some(0.01),
        margin: Some(0.15),
        seeds: 3,
        spoiler_mode: SpoilerMode::Windowed,
        ..base_config("density_zero_spoiler")
    }
}

/// Builds `x` of length `n` from a sample `z` and the decomposition of
/// `𝟙_S ∩ [1, n]`; both `x` and `x|_S` are checked.
pub(super) fn run_preserving_pair(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure = measure_of(config)?.clone();
    per_seed(config, |seed| {
        let mut o = Outcome::default();
        let mut set = set_for_run(&config.set, seed)?;
        let y = characteristic_prefix(&mut *set, config.n);
        let dec = superficial_decomposition(&y, DecompositionParams::default())?;
        o.measure(Measurement::new(
            "set_residual",
            Some(seed),
            config.n,
            dec.residual,
            Predicted::NoPrediction,
        ));
        o.check(Criterion::new(
            "set_superficial",
            Some(seed),
            dec.residual,
            Comparison::Below,
            SUPERFICIAL_THRESHOLD,
        ));
        let x = build_preserving_pair(measure.sample_stream(seed)?, &dec)?.take_prefix(config.n as usize);
        let xs: Vec<Symbol> = x.iter().zip(&y).filter(|(_, &b)| b == 1).map(|(&s, _)| s).collect();
        if xs.len() < config.k.iter().copied().max().unwrap_or(1) {
            return Err(unsupported(config, "too few members of the set in the prefix"));
        }
        defect_checks(&mut o, "built", &x, &measure, &config.k, config, seed)?;
        defect_checks(&mut o, "built_restricted", &xs, &measure, &config.k, config, seed)?;
        o.note(format!(
            "decomposition of the first {} positions: {} A, {} B, {} C intervals",
            config.n,
            dec.a.len(),
            dec.b.len(),
            dec.c.len()
        ));
        Ok(o)
    })
}

/// The symbol of least measure, which the spoiler writes.
fn spoiling_symbol(measure: &MeasureSpec) -> Result<Symbol, LabError> {
    match measure.alphabet() {
        Alphabet::Naturals => Ok(1),
        Alphabet::Finite(n) => {
            let mut best = (0, f64::INFINITY);
            for a in 0..n {
                let m = measure.symbol_measure(a)?;
                if m < best.1 {
                    best = (a, m);
                }
            }
            Ok(best.0)
        }
    }
}

/// Overwrites a density-zero part `S′ ⊂ S` of a sample; the simple defect of
/// `x′|_S` is taken at the last window end, where `S′` makes up at least 2/3
/// of the members seen.
pub(super) fn run_spoiler(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure = measure_of(config)?.clone();
    let a = spoiling_symbol(&measure)?;
    per_seed(config, |seed| {
        let mut o = Outcome::default();
        let mut set = set_for_run(&config.set, seed)?;
        let members = indices_up_to(&mut *set, config.n);
        let mut spoiler =
            build_density_zero_spoiler(measure.sample_stream(seed)?, &members, config.n, a, config.spoiler_mode)?;
        let schedule = spoiler.schedule().clone();
        let x = spoiler.take_prefix(config.n as usize);
        defect_checks(&mut o, "spoiled", &x, &measure, &config.k, config, seed)?;
        let xs: Vec<Symbol> = members.iter().map(|&s| x[(s - 1) as usize]).collect();
        let rank_end = match schedule.windows.last() {
            Some(w) => w.rank_end as usize,
            None if schedule.mode == SpoilerMode::Full => xs.len(),
            None => 0,
        };
        if rank_end == 0 {
            return Err(unsupported(config, "the window schedule produced no window within the horizon"));
        }
        let d = simple_normality_defect(&xs[..rank_end], &measure, config.cap)?;
        let tol = tolerance(config, rank_end as u64);
        o.measure(Measurement::new(
            "spoiled_restricted_simple_defect",
            Some(seed),
            rank_end as u64,
            d,
            Predicted::NoPrediction,
        ));
        o.check(Criterion::new(
            "spoiled_restricted_simple_defect_at_least_margin",
            Some(seed),
            d,
            Comparison::AtLeast,
            margin(config, tol),
        ));
        o.measure(Measurement::new(
            "replaced_fraction",
            Some(seed),
            config.n,
            schedule.replaced.len() as f64 / config.n as f64,
            Predicted::analytic(0.0),
        ));
        let mut points = Vec::new();
        for w in &schedule.windows {
            let r = w.rank_end as usize;
            let hits = xs[..r].iter().filter(|&&s| s == a).count();
            points.push((w.rank_end, hits as f64 / r as f64));
        }
        o.series(Series::new("restricted_spoiled_symbol_frequency", Some(seed), points));
        o.note(format!(
            "spoiler writes symbol {a}; mode {:?}, {} windows, {} of {} members replaced; lower density estimate {:.3e}",
            schedule.mode,
            schedule.windows.len(),
            schedule.replaced.len(),
            members.len(),
            schedule.lower_density_estimate
        ));
        Ok(o)
    })
}
