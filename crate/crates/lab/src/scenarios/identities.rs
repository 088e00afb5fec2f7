//! Zero-entropy sequences whose restrictions reproduce them exactly, and
//! their products with a fair coin.

use std::collections::BTreeSet;

use normlab_core::empirics::{block_frequencies, joint_block_frequencies, EmpiricalMeasure};
use normlab_core::measures::MeasureSpec;
use normlab_core::selectors::{restrict, GapRule, SetSpec};
use normlab_core::sources::{
    Alphabet, BernoulliStream, BoxStream, GarciaHedlundStream, ProductStream, SymbolStreamExt,
    ThueMorseStream, Weights,
};
use normlab_core::Symbol;

use super::{
    base_config, defect_checks, measure_of, per_seed, set_for_run, tolerance, unsupported, Outcome,
};
use crate::config::ExperimentConfig;
use crate::report::{Comparison, Criterion, Measurement, Predicted};
use crate::LabError;

pub(super) fn toeplitz_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: None,
        set: SetSpec::Progression { start: 3, step: 3 },
        n: 100_000,
        k: vec![1, 2, 3, 4],
        tolerance: Some(0.01),
        seeds: 1,
        ..base_config("toeplitz_along_multiples_of_three")
    }
}

pub(super) fn thue_morse_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: None,
        set: SetSpec::Progression { start: 1, step: 2 },
        n: 100_000,
        k: vec![1, 2, 3, 4],
        tolerance: Some(0.01),
        seeds: 1,
        ..base_config("thue_morse_along_odds")
    }
}

pub(super) fn toeplitz_product_defaults() -> ExperimentConfig {
    ExperimentConfig {
        n: 1_000_000,
        k: vec![2],
        seeds: 3,
        ..toeplitz_defaults()
    }
    .renamed("toeplitz_coin_product_along_multiples_of_three")
}

pub(super) fn thue_morse_product_defaults() -> ExperimentConfig {
    ExperimentConfig {
        n: 1_000_000,
        k: vec![2],
        seeds: 3,
        ..thue_morse_defaults()
    }
    .renamed("thue_morse_coin_product_along_odds")
}

pub(super) fn random_gaps_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: Some(MeasureSpec::Periodic { pattern: vec![0, 1] }),
        set: SetSpec::Gaps {
            rule: GapRule::IidGaps {
                values: vec![1, 3],
                weights: vec![0.5, 0.5],
            },
            seed: 0,
        },
        n: 100_000,
        k: vec![1, 2, 3],
        ..base_config("alternating_along_random_gaps")
    }
}

pub(super) fn alternating_gaps_defaults() -> ExperimentConfig {
    ExperimentConfig {
        measure: Some(MeasureSpec::Periodic {
            pattern: vec![0, 0, 1, 1],
        }),
        set: SetSpec::Gaps {
            rule: GapRule::AlternatingGaps {
                fixed: 2,
                choices: vec![4, 8],
                choice_first: true,
            },
            seed: 0,
        },
        n: 100_000,
        k: vec![1, 2, 3],
        ..base_config("period_four_along_alternating_gaps")
    }
}

impl ExperimentConfig {
    fn renamed(mut self, name: &str) -> Self {
        self.scenario = name.to_string();
        self
    }
}

/// The deterministic sequence behind a scenario.
fn base_sequence(config: &ExperimentConfig) -> Result<fn() -> BoxStream, LabError> {
    if config.scenario.starts_with("toeplitz") {
        Ok(|| GarciaHedlundStream::new().boxed())
    } else if config.scenario.starts_with("thue_morse") {
        Ok(|| ThueMorseStream::new().boxed())
    } else {
        Err(unsupported(config, "no deterministic base sequence"))
    }
}

fn mismatches(a: &[Symbol], b: impl Iterator<Item = Symbol>) -> u64 {
    a.iter().zip(b).filter(|(x, y)| **x != *y).count() as u64
}

/// `max_B |Fr_a(B) − Fr_b(B)|` over blocks seen in either table.
fn table_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> f64 {
    let blocks: BTreeSet<&Vec<Symbol>> = a.counts.keys().chain(b.counts.keys()).collect();
    blocks
        .into_iter()
        .map(|blk| (a.frequency(blk) - b.frequency(blk)).abs())
        .fold(0.0, f64::max)
}

/// `x|_S = x` exactly; along the other residues of a progression the block
/// statistics of `x` are reproduced (for Thue–Morse along `S + 1`, exactly
/// the negation of `x`).
pub(super) fn run_self_similar(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let make = base_sequence(config)?;
    let n = config.n as usize;
    let mut o = Outcome::default();
    let x = make().take_prefix(n);
    let xs = restrict(make(), set_for_run(&config.set, config.seed)?).take_prefix(n);
    let m = mismatches(&xs, x.iter().copied());
    o.measure(Measurement::new("mismatches_with_x", None, config.n, m as f64, Predicted::analytic(0.0)));
    o.check(Criterion::new("restriction_equals_x", None, m as f64, Comparison::AtMost, 0.0));
    let SetSpec::Progression { start, step } = config.set else {
        return Ok(o);
    };
    for r in 1..step {
        let shifted = SetSpec::Progression { start: start + r, step };
        let xr = restrict(make(), shifted.build()?).take_prefix(n);
        if config.scenario.starts_with("thue_morse") && step == 2 {
            let m = mismatches(&xr, x.iter().map(|&s| 1 - s));
            let name = format!("shift_{r}_mismatches_with_negation");
            o.measure(Measurement::new(&name, None, config.n, m as f64, Predicted::analytic(0.0)));
            o.check(Criterion::new(
                format!("shift_{r}_restriction_equals_negation"),
                None,
                m as f64,
                Comparison::AtMost,
                0.0,
            ));
        }
        for &k in &config.k {
            let d = table_distance(
                &block_frequencies(&xr, Alphabet::binary(), k, None)?,
                &block_frequencies(&x, Alphabet::binary(), k, None)?,
            );
            let windows = (n + 1 - k) as u64;
            let name = format!("shift_{r}_table_distance_k{k}");
            o.measure(Measurement::new(&name, None, windows, d, Predicted::analytic(0.0)));
            o.check(Criterion::new(name, None, d, Comparison::Below, tolerance(config, windows)));
        }
    }
    Ok(o)
}

/// `(z, w)` with `z` the deterministic sequence and `w` a fair coin, along the
/// set: the top row reproduces `z`, the bottom row stays normal, and the rows
/// look independent.
pub(super) fn run_product(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let make = base_sequence(config)?;
    let n = config.n as usize;
    let coin = MeasureSpec::fair_coin();
    let z = make().take_prefix(n);
    per_seed(config, |seed| {
        let mut o = Outcome::default();
        let w = BernoulliStream::new(Weights::Finite(vec![0.5, 0.5]), seed)?.boxed();
        let pair = ProductStream::new(make(), w);
        let code = pair.code();
        let restricted = restrict(pair.boxed(), set_for_run(&config.set, seed)?).take_prefix(n);
        let (top, bottom): (Vec<Symbol>, Vec<Symbol>) = restricted.iter().map(|&c| code.decode(c)).unzip();
        let m = mismatches(&top, z.iter().copied());
        o.measure(Measurement::new("top_row_mismatches_with_z", Some(seed), config.n, m as f64, Predicted::analytic(0.0)));
        o.check(Criterion::new("top_row_equals_z", Some(seed), m as f64, Comparison::AtMost, 0.0));
        defect_checks(&mut o, "bottom_row", &bottom, &coin, &config.k, config, seed)?;
        for &k in &config.k {
            let joint = joint_block_frequencies(&top, Alphabet::binary(), &bottom, Alphabet::binary(), k)?;
            let windows = joint.total;
            let d = joint.independence_defect();
            let name = format!("rows_independence_defect_k{k}");
            o.measure(Measurement::new(&name, Some(seed), windows, d, Predicted::analytic(0.0)));
            o.check(Criterion::new(&name, Some(seed), d, Comparison::Below, tolerance(config, windows)));
            // against z's own statistics times the coin measure
            let reference = block_frequencies(&z, Alphabet::binary(), k, None)?;
            let mut worst = 0.0f64;
            for (bx, by) in joint.counts.keys() {
                let expected = reference.frequency(bx) * coin.cylinder_measure(by)?;
                worst = worst.max((joint.frequency(bx, by) - expected).abs());
            }
            for bx in reference.counts.keys() {
                for by in coin_blocks(k) {
                    if !joint.counts.contains_key(&(bx.clone(), by.clone())) {
                        worst = worst.max(reference.frequency(bx) * coin.cylinder_measure(&by)?);
                    }
                }
            }
            let name = format!("product_defect_k{k}");
            o.measure(Measurement::new(&name, Some(seed), windows, worst, Predicted::analytic(0.0)));
            o.check(Criterion::new(&name, Some(seed), worst, Comparison::Below, tolerance(config, windows)));
        }
        Ok(o)
    })
}

fn coin_blocks(k: usize) -> Vec<Vec<Symbol>> {
    (0..1u64 << k)
        .map(|v| (0..k).rev().map(|i| (v >> i) & 1).collect())
        .collect()
}

/// Periodic sequence along a random set: `x|_S = x` and block defects vanish.
pub(super) fn run_periodic(config: &ExperimentConfig) -> Result<Outcome, LabError> {
    let measure = measure_of(config)?.clone();
    if !matches!(measure, MeasureSpec::Periodic { .. }) {
        return Err(unsupported(config, "the measure must be periodic"));
    }
    let n = config.n as usize;
    per_seed(config, |seed| {
        let mut o = Outcome::default();
        let x = measure.sample_stream(seed)?.take_prefix(n);
        let xs = restrict(measure.sample_stream(seed)?, set_for_run(&config.set, seed)?).take_prefix(n);
        let m = mismatches(&xs, x.iter().copied());
        o.measure(Measurement::new("mismatches_with_x", Some(seed), config.n, m as f64, Predicted::analytic(0.0)));
        o.check(Criterion::new("restriction_equals_x", Some(seed), m as f64, Comparison::AtMost, 0.0));
        defect_checks(&mut o, "restricted", &xs, &measure, &config.k, config, seed)?;
        let mut set = set_for_run(&config.set, seed)?;
        let y = normlab_core::selectors::characteristic_prefix(&mut *set, super::restriction::SET_PREFIX);
        let rates = normlab_core::selectors::determinism_score(&y, 4)?.plugin_entropy_rates;
        let h4 = rates[3];
        o.measure(Measurement::new("set_entropy_rate_k4", Some(seed), y.len() as u64, h4, Predicted::NoPrediction));
        o.check(Criterion::new(
            "set_looks_random",
            Some(seed),
            h4,
            Comparison::AtLeast,
            super::restriction::RANDOM_ENTROPY_RATE,
        ));
        Ok(o)
    })
}
