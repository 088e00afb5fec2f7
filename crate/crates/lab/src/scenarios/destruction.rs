//! Destruction along deterministic non-superficial sets: the frequency of a
//! spread block in `x|_S` against its predicted limit and against its
//! unrestricted measure.

use normlab_core::empirics::{running_frequency_series, WildcardPattern};
use normlab_core::measures::{
    find_witness, gauss_spread_measure, predicted_restricted_frequency, MeasureSpec, PredictionOptions,
    SpreadBlock, DEFAULT_EPS_FLOOR,
};
use normlab_core::selectors::SetSpec;

use super::{
    base_config, checkpoints, defect_checks, margin, measure_of, per_seed, restricted_sample, sticky_chain,
    studied_block, tolerance, Outcome,
};
use crate::config::ExperimentConfig;
use crate::report::{Comparison, Criterion, Measurement, Predicted, Series};
use crate::LabError;

/// Longest block and box searched for a witness.
const WITNESS_K_MAX: usize = 4;
const WITNESS_BOX: u64 = 20;

/// Tolerance of each truncated Gauss sum.
const GAUSS_TOL: f64 = 1e-7;

pub(super) fn heersink_vandehey_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: Some(MeasureSpec::GaussCf),
        set: SetSpec::Progression { start: 2, step: 2 },
        k: vec![1],
        cap: Some(100),
        tolerance: Some(0.003),
        block: Some(vec![1, 1]),
        ..base_config("heersink_vandehey")
    }
}

pub(super) fn markov_destruction_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: Some(sticky_chain()),
        set: SetSpec::Progression { start: 2, step: 2 },
        k: vec![1],
        tolerance: Some(0.005),
        margin: Some(0.01),
        ..base_config("markov_destruction")
    }
}

/// `μ([B^p̄])`, exact except for spread Gauss blocks.
fn unrestricted(measure: &MeasureSpec, sb: &SpreadBlock) -> Result<Predicted, LabError> {
    match measure {
        MeasureSpec::GaussCf if sb.gaps.iter().any(|&g| g > 0) => {
            let (v, e) = gauss_spread_measure(&sb.block, &sb.gaps, GAUSS_TOL)?;
            Ok(Predicted::truncated(v, e))
        }
        MeasureSpec::GaussCf => Ok(Predicted::analytic(measure.cylinder_measure(&sb.block)?)),
        _ => Ok(Predicted::analytic(measure.spread_cylinder_measure(sb)?)),
    }
}

pub(super) fn run_destruction(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure = measure_of(config)?.clone();
    let mut out = Outcome::default();
    // a witness pattern is the only one whose restricted frequency must drop
    let mut from_witness = false;
    let sb = match (&config.block, &measure) {
        (Some(_), _) | (None, MeasureSpec::GaussCf) => {
            studied_block(config, SpreadBlock::contiguous(vec![1, 1])?)?
        }
        (None, _) => {
            from_witness = true;
            let w = find_witness(&measure, WITNESS_K_MAX, WITNESS_BOX, DEFAULT_EPS_FLOOR)?;
            out.note(format!(
                "witness: k = {}, block = {:?}, gaps = {:?}, f = {:.12}",
                w.k, w.block, w.p0, w.f0
            ));
            w.spread_block()
        }
    };
    let f0 = unrestricted(&measure, &sb)?;
    let f0_value = f0.value().expect("unrestricted measure is computed");
    out.note(format!(
        "pattern {:?} with gaps {:?}; unrestricted measure {:.12}",
        sb.block, sb.gaps, f0_value
    ));
    let prediction = match config.set.derived_measure() {
        Some(nu) => {
            let opts = PredictionOptions {
                gauss_tol: GAUSS_TOL,
                ..PredictionOptions::default()
            };
            match predicted_restricted_frequency(&measure, &nu, &sb, opts) {
                Ok(p) => Predicted::truncated(p.value, p.error_bound),
                Err(e) => {
                    out.note(format!("no prediction: {e}"));
                    Predicted::NoPrediction
                }
            }
        }
        None => {
            out.note("no prediction: the set has no finitely described derived measure");
            Predicted::NoPrediction
        }
    };
    let windows = (config.n + 1).saturating_sub(sb.span());
    if let Some(v) = prediction.value() {
        let stat = 4.0 / (windows.max(1) as f64).sqrt();
        out.check(Criterion::new(
            "unrestricted_minus_prediction",
            None,
            f0_value - v,
            Comparison::Above,
            10.0 * stat,
        ));
    }
    let cps = checkpoints(config, config.n);
    let pattern = WildcardPattern::from_spread_block(&sb);
    out.append(per_seed(config, |seed| {
        let mut o = Outcome::default();
        let xs = restricted_sample(&measure, &config.set, seed, config.n)?;
        let series = running_frequency_series(&xs, &pattern, &cps);
        let measured = series.last().map_or(0.0, |p| p.1);
        let tol = tolerance(config, windows);
        o.measure(Measurement::new(
            "pattern_frequency",
            Some(seed),
            windows,
            measured,
            prediction.clone(),
        ));
        if let Some(v) = prediction.value() {
            o.check(Criterion::new(
                "pattern_matches_prediction",
                Some(seed),
                (measured - v).abs(),
                Comparison::Below,
                tol + prediction.error_bound(),
            ));
        }
        o.check(Criterion::new(
            "pattern_differs_from_unrestricted",
            Some(seed),
            (f0_value - measured).abs(),
            Comparison::Above,
            margin(config, tol),
        ));
        if from_witness {
            o.check(Criterion::new(
                "pattern_below_unrestricted",
                Some(seed),
                f0_value - measured,
                Comparison::Above,
                margin(config, tol),
            ));
        }
        defect_checks(&mut o, "restricted", &xs, &measure, &config.k, config, seed)?;
        o.series(Series::new("pattern_frequency", Some(seed), series));
        Ok(o)
    })?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run_scenario;

    #[test]
    fn markov_witness_pattern_on_a_short_run() {
        let mut c = markov_destruction_defaults();
        c.n = 2_000_000;
        c.seeds = 2;
        c.tolerance = Some(0.01);
        let r = run_scenario(&c).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let m = r.measurement("pattern_frequency", Some(1)).unwrap();
        assert!((m.predicted.value().unwrap() - 0.41).abs() < 1e-9);
        assert!(r.notes.iter().any(|n| n.starts_with("witness: k = 2, block = [0, 0], gaps = [0]")));
    }

    #[test]
    fn gauss_pattern_prediction() {
        let mut c = heersink_vandehey_defaults();
        c.n = 100_000;
        c.seeds = 1;
        let r = run_scenario(&c).unwrap();
        let m = r.measurement("pattern_frequency", None).unwrap();
        let v = m.predicted.value().unwrap();
        assert!((v - 0.178_578_869).abs() < 1e-6);
        assert!(m.predicted.error_bound() <= 1e-6);
    }

    #[test]
    fn sets_without_derived_measure_run_measurement_only() {
        let mut c = markov_destruction_defaults();
        c.set = SetSpec::GarciaHedlundSupport;
        c.n = 20_000;
        c.seeds = 1;
        let r = run_scenario(&c).unwrap();
        assert_eq!(r.measurements[0].predicted, Predicted::NoPrediction);
        assert!(r.criteria_named("pattern_matches_prediction").next().is_none());
        assert!(r.notes.iter().any(|n| n.starts_with("no prediction")));
    }
}
