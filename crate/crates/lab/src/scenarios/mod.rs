//! Registry of scenarios and the helpers they share.
//!
//! Each seed is an independent run; runs go through the rayon pool and their
//! results are assembled in seed order.

mod construction;
mod destruction;
mod identities;
mod restriction;

use std::time::Instant;

use normlab_core::empirics::{normality_defect, running_frequency_series, WildcardPattern};
use normlab_core::measures::{MeasureSpec, SpreadBlock};
use normlab_core::selectors::{geometric_checkpoints, restrict, BoxSet, SetSpec};
use normlab_core::sources::{SpoilerMode, SymbolStreamExt};
use normlab_core::Symbol;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::report::{Comparison, Criterion, ExperimentReport, Measurement, Predicted, Series};
use crate::LabError;

/// One registered scenario.
pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// The statement the scenario exercises.
    pub anchor: &'static str,
    /// Verdict reported when every criterion passes.
    pub verdict: &'static str,
    defaults: fn() -> ExperimentConfig,
    run: fn(&ExperimentConfig) -> Result<Outcome, LabError>,
}

impl ScenarioInfo {
    pub fn default_config(&self) -> ExperimentConfig {
        (self.defaults)()
    }
}

static REGISTRY: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "wall",
        description: "i.i.d. sample restricted to an arithmetic progression; block defects",
        anchor: "arithmetic progressions preserve normality for Bernoulli measures",
        verdict: "consistent with preservation",
        defaults: restriction::wall_defaults,
        run: restriction::run_preservation,
    },
    ScenarioInfo {
        name: "kamae_weiss_toeplitz",
        description: "i.i.d. sample restricted to the support of the Garcia-Hedlund sequence",
        anchor: "deterministic sets of positive lower density preserve Bernoulli normality",
        verdict: "consistent with preservation",
        defaults: restriction::kamae_weiss_defaults,
        run: restriction::run_preservation,
    },
    ScenarioInfo {
        name: "heersink_vandehey",
        description: "continued-fraction digits along a progression; frequency of a digit pair against its predicted limit",
        anchor: "non-superficial deterministic sets destroy continued-fraction normality",
        verdict: "consistent with destruction",
        defaults: destruction::heersink_vandehey_defaults,
        run: destruction::run_destruction,
    },
    ScenarioInfo {
        name: "markov_destruction",
        description: "Markov sample along a set; witness spread-block frequency against its predicted limit",
        anchor: "non-superficial deterministic sets destroy normality for non-spreadable measures",
        verdict: "consistent with destruction",
        defaults: destruction::markov_destruction_defaults,
        run: destruction::run_destruction,
    },
    ScenarioInfo {
        name: "nondeterministic_nonpreservation",
        description: "the indicator of a random set is normal yet constant along the set",
        anchor: "non-deterministic sets do not preserve normality",
        verdict: "consistent with non-preservation",
        defaults: restriction::nondeterministic_defaults,
        run: restriction::run_nondeterministic,
    },
    ScenarioInfo {
        name: "simple_normality_preservation",
        description: "symbol frequencies survive restriction while 2-block frequencies do not",
        anchor: "sets whose derived measures are disjoint from the measure preserve simple normality",
        verdict: "consistent with simple-normality preservation",
        defaults: restriction::simple_normality_defaults,
        run: restriction::run_simple_normality,
    },
    ScenarioInfo {
        name: "superficial_construction",
        description: "explicit normal sequence whose restriction to a superficial set stays normal",
        anchor: "superficial sets do not destroy normality",
        verdict: "consistent with non-destruction",
        defaults: construction::preserving_defaults,
        run: construction::run_preserving_pair,
    },
    ScenarioInfo {
        name: "density_zero_spoiler",
        description: "normal sequence altered on a density-zero subset so its restriction loses simple normality",
        anchor: "sets of lower density zero do not preserve simple normality",
        verdict: "consistent with non-preservation",
        defaults: construction::spoiler_defaults,
        run: construction::run_spoiler,
    },
    ScenarioInfo {
        name: "superficial_positive_density_preservation",
        description: "Markov sample restricted to a superficial set of positive lower density",
        anchor: "superficial sets of positive lower density preserve normality for every ergodic measure",
        verdict: "consistent with preservation",
        defaults: restriction::superficial_preservation_defaults,
        run: restriction::run_superficial_preservation,
    },
    ScenarioInfo {
        name: "toeplitz_along_multiples_of_three",
        description: "Garcia-Hedlund sequence along 3N reproduces itself; shifted progressions keep its block statistics",
        anchor: "a zero-entropy Toeplitz measure preserved by a disjoint periodic set",
        verdict: "preserved (exact)",
        defaults: identities::toeplitz_defaults,
        run: identities::run_self_similar,
    },
    ScenarioInfo {
        name: "thue_morse_along_odds",
        description: "Thue-Morse along the odd positions is itself, along the even positions its negation",
        anchor: "a Thue-Morse measure preserved by a set whose derived measure is a factor of it",
        verdict: "preserved (exact)",
        defaults: identities::thue_morse_defaults,
        run: identities::run_self_similar,
    },
    ScenarioInfo {
        name: "toeplitz_coin_product_along_multiples_of_three",
        description: "product of the Garcia-Hedlund sequence with a fair coin, restricted to 3N",
        anchor: "a positive-entropy product measure without completely positive entropy preserved by 3N",
        verdict: "preserved",
        defaults: identities::toeplitz_product_defaults,
        run: identities::run_product,
    },
    ScenarioInfo {
        name: "thue_morse_coin_product_along_odds",
        description: "product of Thue-Morse with a fair coin, restricted to the odd positions",
        anchor: "a positive-entropy product measure preserved by the odd numbers despite a common factor",
        verdict: "preserved",
        defaults: identities::thue_morse_product_defaults,
        run: identities::run_product,
    },
    ScenarioInfo {
        name: "alternating_along_random_gaps",
        description: "period-2 sequence along a set with i.i.d. gaps 1 or 3",
        anchor: "a non-deterministic set preserving normality for a periodic measure",
        verdict: "preserved",
        defaults: identities::random_gaps_defaults,
        run: identities::run_periodic,
    },
    ScenarioInfo {
        name: "period_four_along_alternating_gaps",
        description: "0011-periodic sequence along gaps alternating between 2 and a random choice of 4 or 8",
        anchor: "a non-deterministic set with a common factor preserving a periodic measure",
        verdict: "preserved (exact)",
        defaults: identities::alternating_gaps_defaults,
        run: identities::run_periodic,
    },
];

pub fn list_scenarios() -> &'static [ScenarioInfo] {
    REGISTRY
}

pub fn names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|s| s.name)
}

pub fn find(name: &str) -> Option<&'static ScenarioInfo> {
    REGISTRY.iter().find(|s| s.name == name)
}

pub fn default_config(name: &str) -> Option<ExperimentConfig> {
    find(name).map(ScenarioInfo::default_config)
}

/// Runs every seed of the configured scenario and assembles the report.
pub fn run_scenario(config: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let info = find(&config.scenario)
        .ok_or_else(|| crate::ConfigError::UnknownScenario(config.scenario.clone()))?;
    config.validate()?;
    let started = Instant::now();
    let outcome = (info.run)(config)?;
    let failed = outcome.criteria.iter().filter(|c| !c.passed).count();
    let verdict = if failed == 0 {
        info.verdict.to_string()
    } else {
        format!("not consistent: {failed} of {} criteria failed", outcome.criteria.len())
    };
    Ok(ExperimentReport {
        scenario: config.scenario.clone(),
        config: config.clone(),
        verdict,
        measurements: outcome.measurements,
        criteria: outcome.criteria,
        series: outcome.series,
        notes: outcome.notes,
        wall_clock_seconds: crate::report::round12(started.elapsed().as_secs_f64()),
    })
}

/// Results of a scenario before the report is assembled.
#[derive(Default)]
pub(crate) struct Outcome {
    measurements: Vec<Measurement>,
    criteria: Vec<Criterion>,
    series: Vec<Series>,
    notes: Vec<String>,
}

impl Outcome {
    fn measure(&mut self, m: Measurement) {
        self.measurements.push(m);
    }

    fn check(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    fn series(&mut self, s: Series) {
        self.series.push(s);
    }

    fn note(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }

    fn append(&mut self, other: Outcome) {
        self.measurements.extend(other.measurements);
        self.criteria.extend(other.criteria);
        self.series.extend(other.series);
        for n in other.notes {
            self.note(n);
        }
    }
}

/// Runs `f` for every seed in parallel and concatenates in seed order.
fn per_seed<F>(config: &ExperimentConfig, f: F) -> Result<Outcome, LabError>
where
    F: Fn(u64) -> Result<Outcome, LabError> + Sync,
{
    let results: Vec<Result<Outcome, LabError>> = config.seed_list().into_par_iter().map(&f).collect();
    let mut out = Outcome::default();
    for r in results {
        out.append(r?);
    }
    Ok(out)
}

fn unsupported(config: &ExperimentConfig, reason: impl Into<String>) -> LabError {
    LabError::Unsupported {
        scenario: config.scenario.clone(),
        reason: reason.into(),
    }
}

fn measure_of(config: &ExperimentConfig) -> Result<&MeasureSpec, LabError> {
    config
        .measure
        .as_ref()
        .ok_or_else(|| unsupported(config, "a measure is required"))
}

/// Configured tolerance, else `4/√windows`.
fn tolerance(config: &ExperimentConfig, windows: u64) -> f64 {
    config.tolerance.unwrap_or(4.0 / (windows.max(1) as f64).sqrt())
}

fn margin(config: &ExperimentConfig, tol: f64) -> f64 {
    config.margin.unwrap_or(tol)
}

/// Seed of a random set in a run: the spec's own seed mixed with the run seed,
/// so that the set and the sampled sequence are independent.
fn set_seed(spec_seed: u64, run_seed: u64) -> u64 {
    spec_seed ^ run_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(23) ^ 0xd1b5_4a32_d192_ed03
}

fn set_for_run(spec: &SetSpec, run_seed: u64) -> Result<BoxSet, LabError> {
    let spec = match spec {
        SetSpec::Gaps { rule, seed } => SetSpec::Gaps {
            rule: rule.clone(),
            seed: set_seed(*seed, run_seed),
        },
        other => other.clone(),
    };
    Ok(spec.build()?)
}

/// The first `n` symbols of `x|_S` for a fresh sample of `measure`.
fn restricted_sample(measure: &MeasureSpec, set: &SetSpec, seed: u64, n: u64) -> Result<Vec<Symbol>, LabError> {
    let x = measure.sample_stream(seed)?;
    Ok(restrict(x, set_for_run(set, seed)?).take_prefix(n as usize))
}

fn checkpoints(config: &ExperimentConfig, n: u64) -> Vec<u64> {
    let mut cps = if config.checkpoints.is_empty() {
        geometric_checkpoints(n, 10)
    } else {
        config.checkpoints.clone()
    };
    cps.push(n);
    cps.sort_unstable();
    cps.dedup();
    cps
}

/// The configured spread block, or `fallback`.
fn studied_block(config: &ExperimentConfig, fallback: SpreadBlock) -> Result<SpreadBlock, LabError> {
    match (&config.block, &config.gaps) {
        (Some(b), Some(g)) => Ok(SpreadBlock::new(b.clone(), g.clone())?),
        (Some(b), None) => Ok(SpreadBlock::contiguous(b.clone())?),
        _ => Ok(fallback),
    }
}

/// Running frequency of a contiguous block at the checkpoints; the last point
/// is the frequency over the whole prefix.
fn block_series(xs: &[Symbol], block: &[Symbol], cps: &[u64]) -> Result<Vec<(u64, f64)>, LabError> {
    let pattern = WildcardPattern::contiguous(block)?;
    Ok(running_frequency_series(xs, &pattern, cps))
}

/// `defect_k{k}` measurements of `xs` against `measure`, each checked below
/// the tolerance.
fn defect_checks(
    out: &mut Outcome,
    label: &str,
    xs: &[Symbol],
    measure: &MeasureSpec,
    ks: &[usize],
    config: &ExperimentConfig,
    seed: u64,
) -> Result<(), LabError> {
    for &k in ks {
        let windows = (xs.len() + 1).saturating_sub(k) as u64;
        let d = normality_defect(xs, measure, k, config.cap)?;
        let name = format!("{label}_defect_k{k}");
        out.measure(Measurement::new(&name, Some(seed), windows, d, Predicted::analytic(0.0)));
        out.check(Criterion::new(
            name,
            Some(seed),
            d,
            Comparison::Below,
            tolerance(config, windows),
        ));
    }
    Ok(())
}

/// Defaults shared by all scenarios.
fn base_config(name: &str) -> ExperimentConfig {
    ExperimentConfig {
        scenario: name.to_string(),
        measure: Some(MeasureSpec::fair_coin()),
        set: SetSpec::Progression { start: 1, step: 1 },
        n: 10_000_000,
        k: vec![2],
        cap: None,
        tolerance: None,
        margin: None,
        seed: 1,
        seeds: 5,
        checkpoints: vec![],
        block: None,
        gaps: None,
        spoiler_mode: SpoilerMode::Windowed,
    }
}

/// The two-state chain flipping with probability 0.1.
fn sticky_chain() -> MeasureSpec {
    MeasureSpec::markov(vec![vec![0.9, 0.1], vec![0.1, 0.9]])
}
