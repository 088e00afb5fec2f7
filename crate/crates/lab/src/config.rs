//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # Markov chain along the even positions
//! scenario = markov_destruction
//! measure  = markov 0.9 0.1; 0.1 0.9
//! set      = progression 2 2
//! n        = 10000000
//! seeds    = 5
//! ```
//!
//! `measure` and `set` take either the compact forms below or a JSON object
//! (the serde form of [`MeasureSpec`] / [`SetSpec`]).
//!
//! Measures: `fair_coin`, `bernoulli w0 w1 …`, `markov r0; r1; …` (rows of
//! whitespace-separated entries), `gauss_cf`, `periodic s0 s1 …`.
//!
//! Sets: `progression START STEP`, `powers BASE`, `geometric_blocks BASE
//! FACTOR`, `growing_blocks BASE`, `sparse_blocks BASE`,
//! `garcia_hedlund_support`, `iid_gaps V1,V2,… [W1,W2,…]`,
//! `alternating_gaps FIXED C1,C2,…`, `coin_membership P`.

use std::collections::BTreeSet;
use std::path::Path;

use normlab_core::measures::MeasureSpec;
use normlab_core::selectors::{GapRule, SetSpec};
use normlab_core::sources::SpoilerMode;
use normlab_core::Symbol;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenarios;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("no `scenario` key")]
    MissingScenario,
    #[error("unknown scenario `{0}` (see `normlab list`)")]
    UnknownScenario(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

pub const KEYS: &[&str] = &[
    "scenario",
    "measure",
    "set",
    "n",
    "k",
    "cap",
    "tolerance",
    "margin",
    "seed",
    "seeds",
    "checkpoints",
    "block",
    "gaps",
    "spoiler_mode",
];

/// A fully resolved experiment: scenario defaults with the file's overrides
/// applied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    /// `None` for scenarios driven by a fixed deterministic sequence.
    pub measure: Option<MeasureSpec>,
    pub set: SetSpec,
    /// Length of the analysed sequence; for restrictions, of `x|_S`.
    pub n: u64,
    pub k: Vec<usize>,
    /// Reporting cap for countable alphabets.
    pub cap: Option<u64>,
    /// Statistical tolerance; `None` means `4/√windows` per frequency.
    pub tolerance: Option<f64>,
    /// Required gap below the unrestricted measure; `None` means the
    /// tolerance.
    pub margin: Option<f64>,
    pub seed: u64,
    /// Number of seeds `seed, seed+1, …` run.
    pub seeds: u64,
    pub checkpoints: Vec<u64>,
    /// Spread-block pattern studied; scenarios pick one when absent.
    pub block: Option<Vec<Symbol>>,
    pub gaps: Option<Vec<u64>>,
    pub spoiler_mode: SpoilerMode,
}

impl ExperimentConfig {
    /// Defaults of a registered scenario.
    pub fn for_scenario(name: &str) -> Result<Self, ConfigError> {
        scenarios::default_config(name).ok_or_else(|| ConfigError::UnknownScenario(name.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            entries.push((key.to_string(), value.to_string()));
        }
        let scenario = entries
            .iter()
            .find(|(k, _)| k == "scenario")
            .map(|(_, v)| v.clone())
            .ok_or(ConfigError::MissingScenario)?;
        let mut config = Self::for_scenario(&scenario)?;
        for (key, value) in entries.iter().filter(|(k, _)| k != "scenario") {
            config.set_key(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Overrides one key from its text form.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::BadValue {
            key: key.to_string(),
            reason,
        };
        match key {
            "scenario" => {
                if value != self.scenario {
                    return Err(bad("the scenario is fixed once defaults are loaded".into()));
                }
            }
            "measure" => {
                self.measure = match value {
                    "none" => None,
                    v => Some(parse_measure(v).map_err(bad)?),
                }
            }
            "set" => self.set = parse_set(value).map_err(bad)?,
            "n" => self.n = parse_num(value).map_err(bad)?,
            "k" => self.k = parse_list(value).map_err(bad)?,
            "cap" => self.cap = parse_optional(value).map_err(bad)?,
            "tolerance" => self.tolerance = parse_optional(value).map_err(bad)?,
            "margin" => self.margin = parse_optional(value).map_err(bad)?,
            "seed" => self.seed = parse_num(value).map_err(bad)?,
            "seeds" => self.seeds = parse_num(value).map_err(bad)?,
            "checkpoints" => self.checkpoints = parse_list(value).map_err(bad)?,
            "block" => self.block = Some(parse_list(value).map_err(bad)?),
            "gaps" => self.gaps = Some(parse_list(value).map_err(bad)?),
            "spoiler_mode" => {
                self.spoiler_mode = match value {
                    "auto" => SpoilerMode::Auto,
                    "full" => SpoilerMode::Full,
                    "windowed" => SpoilerMode::Windowed,
                    other => return Err(bad(format!("expected auto, full or windowed, got `{other}`"))),
                }
            }
            other => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: other.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| ConfigError::Invalid(m);
        if let Some(m) = &self.measure {
            m.validate().map_err(|e| invalid(e.to_string()))?;
        }
        self.set.validate().map_err(|e| invalid(e.to_string()))?;
        if self.k.contains(&0) {
            return Err(invalid("block lengths must be at least 1".into()));
        }
        let kmax = self.k.iter().copied().max().unwrap_or(1) as u64;
        if self.n < kmax {
            return Err(invalid(format!("n = {} is shorter than the largest k = {kmax}", self.n)));
        }
        if self.seeds == 0 {
            return Err(invalid("seeds must be at least 1".into()));
        }
        for (name, v) in [("tolerance", self.tolerance), ("margin", self.margin)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(invalid(format!("{name} must be a nonnegative number, got {v}")));
                }
            }
        }
        match (&self.block, &self.gaps) {
            (Some(b), Some(g)) if b.len() != g.len() + 1 => Err(invalid(format!(
                "a block of length {} needs {} gaps, got {}",
                b.len(),
                b.len().saturating_sub(1),
                g.len()
            ))),
            (Some(b), _) if b.is_empty() => Err(invalid("block must be non-empty".into())),
            (None, Some(_)) => Err(invalid("`gaps` given without `block`".into())),
            _ => Ok(()),
        }
    }

    /// Seeds of the individual runs.
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds).map(|i| self.seed.wrapping_add(i)).collect()
    }

    /// Renders the config in the flat format; `parse` reads it back.
    pub fn to_text(&self) -> String {
        let list = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("scenario", self.scenario.clone());
        line(
            "measure",
            self.measure.as_ref().map_or("none".into(), |m| {
                serde_json::to_string(m).expect("measure serializes")
            }),
        );
        line("set", serde_json::to_string(&self.set).expect("set serializes"));
        line("n", self.n.to_string());
        line("k", list(&self.k.iter().map(|&k| k as u64).collect::<Vec<_>>()));
        line("cap", self.cap.map_or("none".into(), |c| c.to_string()));
        line("tolerance", self.tolerance.map_or("none".into(), |c| format!("{c:e}")));
        line("margin", self.margin.map_or("none".into(), |c| format!("{c:e}")));
        line("seed", self.seed.to_string());
        line("seeds", self.seeds.to_string());
        line("checkpoints", list(&self.checkpoints));
        if let Some(b) = &self.block {
            line("block", list(b));
        }
        if let Some(g) = &self.gaps {
            line("gaps", list(g));
        }
        let mode = match self.spoiler_mode {
            SpoilerMode::Auto => "auto",
            SpoilerMode::Full => "full",
            SpoilerMode::Windowed => "windowed",
        };
        line("spoiler_mode", mode.into());
        out
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    let cleaned = s.replace('_', "");
    if let Ok(v) = cleaned.parse::<T>() {
        return Ok(v);
    }
    // integers written as 1e7
    match cleaned.parse::<f64>() {
        Ok(f) if f.fract() == 0.0 && (0.0..1.8e19).contains(&f) => {
            format!("{}", f as u64).parse::<T>().map_err(|_| format!("cannot parse `{s}`"))
        }
        _ => Err(format!("cannot parse `{s}`")),
    }
}

fn parse_optional<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String> {
    if s == "none" {
        Ok(None)
    } else {
        parse_num(s).map(Some)
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_num)
        .collect()
}

/// Compact or JSON measure specification.
pub fn parse_measure(s: &str) -> Result<MeasureSpec, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    let spec = match head {
        "fair_coin" => MeasureSpec::fair_coin(),
        "gauss_cf" => MeasureSpec::GaussCf,
        "bernoulli" => MeasureSpec::bernoulli(parse_list(rest)?),
        "periodic" => MeasureSpec::Periodic {
            pattern: parse_list(rest)?,
        },
        "markov" => {
            let rows = rest
                .split(';')
                .map(parse_list)
                .collect::<Result<Vec<Vec<f64>>, _>>()?;
            MeasureSpec::markov(rows)
        }
        other => return Err(format!("unknown measure kind `{other}`")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// Compact or JSON set specification. Gap sets get seed 0 here; runs mix in
/// their own seed.
pub fn parse_set(s: &str) -> Result<SetSpec, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| e.to_string());
    }
    let words: Vec<&str> = s.split_whitespace().collect();
    let arg = |i: usize| -> Result<u64, String> {
        words
            .get(i)
            .ok_or_else(|| format!("`{}` needs {i} argument(s)", words[0]))
            .and_then(|w| parse_num(w))
    };
    let arity = |n: usize| -> Result<(), String> {
        if words.len() == n + 1 {
            Ok(())
        } else {
            Err(format!("`{}` takes {n} argument(s)", words[0]))
        }
    };
    let spec = match words.first().copied().unwrap_or("") {
        "progression" => {
            arity(2)?;
            SetSpec::Progression {
                start: arg(1)?,
                step: arg(2)?,
            }
        }
        "powers" => {
            arity(1)?;
            SetSpec::Powers { base: arg(1)? }
        }
        "geometric_blocks" => {
            arity(2)?;
            SetSpec::GeometricBlocks {
                base: arg(1)?,
                factor: arg(2)?,
            }
        }
        "growing_blocks" => {
            arity(1)?;
            SetSpec::GrowingBlocks { base: arg(1)? }
        }
        "sparse_blocks" => {
            arity(1)?;
            SetSpec::SparseBlocks { base: arg(1)? }
        }
        "garcia_hedlund_support" => {
            arity(0)?;
            SetSpec::GarciaHedlundSupport
        }
        "iid_gaps" => {
            if words.len() != 2 && words.len() != 3 {
                return Err("`iid_gaps` takes gap values and optional weights".into());
            }
            let values: Vec<u64> = parse_list(words[1])?;
            let weights = match words.get(2) {
                Some(w) => parse_list(w)?,
                None => vec![1.0 / values.len().max(1) as f64; values.len()],
            };
            SetSpec::Gaps {
                rule: GapRule::IidGaps { values, weights },
                seed: 0,
            }
        }
        "alternating_gaps" => {
            arity(2)?;
            SetSpec::Gaps {
                rule: GapRule::AlternatingGaps {
                    fixed: arg(1)?,
                    choices: parse_list(words[2])?,
                    choice_first: true,
                },
                seed: 0,
            }
        }
        "coin_membership" => {
            arity(1)?;
            SetSpec::Gaps {
                rule: GapRule::CoinMembership {
                    p: parse_num(words[1])?,
                },
                seed: 0,
            }
        }
        other => return Err(format!("unknown set kind `{other}`")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}
