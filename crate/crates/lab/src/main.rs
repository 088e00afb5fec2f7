use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use normlab::config::{parse_list, parse_measure, parse_set};
use normlab::{emit_report, list_scenarios, run_scenario, workers_from_env, ExperimentConfig, Format};
use normlab_core::measures::{
    find_witness, gauss_spread_measure, predicted_restricted_frequency, MeasureSpec, PredictionOptions,
    SpreadBlock, DEFAULT_EPS_FLOOR,
};
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "normlab", version, about = "Normality along subsequences: experiments and predictions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered scenarios.
    List,
    /// Run one or more experiment configs.
    Run {
        /// Config file; repeat to run several scenarios in parallel.
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Override the first seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report files; without it only a summary is printed.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Cylinder measures and restricted-frequency predictions.
    Predict {
        /// Measure, e.g. `fair_coin`, `gauss_cf`, `markov 0.9 0.1; 0.1 0.9`.
        #[arg(long)]
        measure: String,
        /// Block symbols, e.g. `0,0`.
        #[arg(long)]
        block: String,
        /// Stars between consecutive symbols; defaults to none.
        #[arg(long)]
        gaps: Option<String>,
        /// Set whose derived measure gives the restricted prediction.
        #[arg(long)]
        set: Option<String>,
        /// Truncation tolerance for Gauss sums.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Search a measure for a destruction witness.
    Witness {
        /// File holding `measure = ...` (and optionally `k_max`, `box`) or a JSON measure.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long = "box")]
        search_box: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = workers_from_env() {
        // a second call only fails if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::List => {
            let mut out = std::io::stdout().lock();
            for s in list_scenarios() {
                // a closed pipe (e.g. `| head`) is not an error
                if writeln!(out, "{:<46} {}  [{}]", s.name, s.description, s.anchor).is_err() {
                    break;
                }
            }
            Ok(true)
        }
        Command::Run {
            configs,
            seed,
            out,
            format,
        } => run(&configs, seed, out.as_deref(), format),
        Command::Predict {
            measure,
            block,
            gaps,
            set,
            tol,
        } => {
            predict(&measure, &block, gaps.as_deref(), set.as_deref(), tol)?;
            Ok(true)
        }
        Command::Witness {
            spec,
            k_max,
            search_box,
        } => {
            witness(&spec, k_max, search_box)?;
            Ok(true)
        }
    }
}

fn run(paths: &[PathBuf], seed: Option<u64>, out: Option<&Path>, format: Format) -> Result<bool> {
    let mut configs = Vec::new();
    for p in paths {
        let mut c = ExperimentConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?;
        if let Some(s) = seed {
            c.seed = s;
        }
        configs.push(c);
    }
    let reports: Vec<_> = configs.par_iter().map(run_scenario).collect();
    let mut all_passed = true;
    for (c, r) in configs.iter().zip(reports) {
        let r = r.with_context(|| format!("running {}", c.scenario))?;
        print!("{}", r.summary());
        all_passed &= r.passed();
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
            for f in emit_report(&r, format, dir)? {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(all_passed)
}

fn predict(measure: &str, block: &str, gaps: Option<&str>, set: Option<&str>, tol: f64) -> Result<()> {
    let mu = parse_measure(measure).map_err(anyhow::Error::msg)?;
    mu.validate()?;
    let block = parse_list(block).map_err(anyhow::Error::msg)?;
    let sb = match gaps {
        Some(g) => SpreadBlock::new(block, parse_list(g).map_err(anyhow::Error::msg)?)?,
        None => SpreadBlock::contiguous(block)?,
    };
    let mut report = json!({
        "block": sb.block,
        "gaps": sb.gaps,
        "product_of_symbols": sb.block.iter().map(|&a| mu.symbol_measure(a)).product::<Result<f64, _>>()?,
    });
    let spread = match mu {
        MeasureSpec::GaussCf if sb.gaps.iter().any(|&g| g > 0) => {
            let (v, e) = gauss_spread_measure(&sb.block, &sb.gaps, tol)?;
            json!({"value": v, "error_bound": e})
        }
        _ => json!({"value": mu.spread_cylinder_measure(&sb)?, "error_bound": 0.0}),
    };
    report["spread_measure"] = spread;
    if let Some(s) = set {
        let set = parse_set(s).map_err(anyhow::Error::msg)?;
        set.validate()?;
        let Some(nu) = set.derived_measure() else {
            bail!("the set has no finitely described derived measure");
        };
        let opts = PredictionOptions {
            gauss_tol: tol,
            ..PredictionOptions::default()
        };
        report["restricted"] = serde_json::to_value(predicted_restricted_frequency(&mu, &nu, &sb, opts)?)?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn witness(path: &Path, k_max: Option<usize>, search_box: Option<u64>) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (mu, file_k, file_box) = parse_witness_spec(&text)?;
    let w = find_witness(
        &mu,
        k_max.or(file_k).unwrap_or(4),
        search_box.or(file_box).unwrap_or(20),
        DEFAULT_EPS_FLOOR,
    )?;
    println!("{}", w.to_json());
    Ok(())
}

fn parse_witness_spec(text: &str) -> Result<(MeasureSpec, Option<usize>, Option<u64>)> {
    if text.trim_start().starts_with('{') {
        return Ok((serde_json::from_str(text)?, None, None));
    }
    let (mut mu, mut k, mut b) = (None, None, None);
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("expected `key = value`, got `{line}`");
        };
        let value = value.trim();
        match key.trim() {
            "measure" => mu = Some(parse_measure(value).map_err(anyhow::Error::msg)?),
            "k_max" => k = Some(value.parse()?),
            "box" => b = Some(value.parse()?),
            other => bail!("unknown key `{other}`"),
        }
    }
    let mu = mu.context("the spec names no measure")?;
    mu.validate()?;
    Ok((mu, k, b))
}
