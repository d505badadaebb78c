//! `f1bench` command line.
//!
//! Exit codes: 0 success, 1 validation error (bad flags, unreadable or
//! malformed input), 2 numeric self-check failure.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analytic_probs::{
    aggregate_from_bins, aggregate_probability, position_distribution, Aggregate,
};
use crate::benchmark::{
    classify_season, ingest_results, render_csv, render_json, render_markdown, team_records,
    SEASON_2025_CSV,
};
use crate::calibration::{make_params, residuals, DriverClass, ModelParams, Scenario};
use crate::error::{Error, Result};
use crate::season_sim::{
    rookie_benchmark, summarize, Category, Entity, SeasonConfig, SimulationSummary,
    DEFAULT_RACES_FULL, DEFAULT_RACES_SPRINT, DEFAULT_SEED, DEFAULT_SIMS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

pub const SEED_ENV: &str = "F1BENCH_SEED";
const RESIDUAL_LIMIT: f64 = 1e-9;
const SUM_CHECK_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Md,
}

#[derive(Debug, Parser)]
#[command(
    name = "f1bench",
    version,
    about = "Normal-model benchmarks for F1 season points"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Master seed for the simulation streams.
    #[arg(long, global = true, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Simulated seasons per category.
    #[arg(long, global = true, default_value_t = DEFAULT_SIMS)]
    sims: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_RACES_FULL)]
    races_full: u32,
    #[arg(long, global = true, default_value_t = DEFAULT_RACES_SPRINT)]
    races_sprint: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    format: Format,
    /// baseline, dominant or rookie.
    #[arg(long, global = true, default_value = "baseline")]
    scenario: String,
    /// Worker threads; 0 uses every core. Never changes results.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Directory for cached simulation summaries.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Print calibrated model parameters and the residuals of their defining equations.
    Calibrate,
    /// Print closed-form finishing-position probabilities.
    Probs,
    /// Simulate seasons and print mean points with 95% intervals.
    Simulate {
        /// Also print the halved elite-driver benchmark for a rookie.
        #[arg(long)]
        rookie: bool,
    },
    /// Classify actual season points against simulated intervals.
    Benchmark {
        /// CSV with header name,team,class,points,entity. Defaults to the bundled 2025 season.
        #[arg(long)]
        results: Option<PathBuf>,
    },
    /// Re-run the command recorded in a manifest.
    Replay { manifest: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Calibrate => "calibrate",
            Command::Probs => "probs",
            Command::Simulate { .. } => "simulate",
            Command::Benchmark { .. } => "benchmark",
            Command::Replay { .. } => "replay",
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Arguments after the program name, minus `--manifest`.
    pub args: Vec<String>,
    pub config: SeasonConfig,
    pub params: ModelParams<f64>,
    pub format: Format,
    pub workers: usize,
    pub timestamp: String,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numeric(m) => m,
        }
    }
}

/// Runs the CLI with `args` (program name first). Returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_VALIDATION
                }
            };
        }
    };

    if let Command::Replay { manifest } = &cli.command {
        return match load_manifest(manifest) {
            Ok(m) => {
                let mut replay = vec![args.first().cloned().unwrap_or_else(|| "f1bench".into())];
                replay.extend(m.args);
                if let Some(path) = &cli.common.manifest {
                    replay.push("--manifest".into());
                    replay.push(path.display().to_string());
                }
                run(replay, out, err)
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_VALIDATION
            }
        };
    }

    match execute(&cli, &args, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn load_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Drops `--manifest X` / `--manifest=X` so a replayed run does not
/// overwrite the file it was loaded from.
fn replayable_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--manifest" {
            skip = true;
            continue;
        }
        if a.starts_with("--manifest=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn execute(
    cli: &Cli,
    args: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let common = &cli.common;
    let scenario: Scenario = common.scenario.parse()?;
    let config = SeasonConfig {
        races_full: common.races_full,
        races_sprint: common.races_sprint,
        n_sims: common.sims,
        master_seed: common.seed,
        scenario,
    };
    config.validate()?;
    let params = make_params::<f64>(scenario);

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: cli.command.name().into(),
        args: replayable_args(args),
        config,
        params,
        format: common.format,
        workers: common.workers,
        timestamp: chrono::Utc::now().to_rfc3339(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
    match &common.manifest {
        Some(path) => fs::write(path, manifest_json + "\n").map_err(Error::from)?,
        None => {
            let _ = writeln!(err, "manifest: {}", manifest_json.replace('\n', " "));
        }
    }

    let text = match &cli.command {
        Command::Calibrate => cmd_calibrate(&params, common.format)?,
        Command::Probs => cmd_probs(&params, common.format)?,
        Command::Simulate { rookie } => cmd_simulate(common, &config, *rookie)?,
        Command::Benchmark { results } => cmd_benchmark(common, &config, results.as_deref())?,
        Command::Replay { .. } => unreachable!("handled before execute"),
    };
    out.write_all(text.as_bytes()).map_err(Error::from)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ParamRow {
    name: &'static str,
    value: f64,
}

fn cmd_calibrate(
    params: &ModelParams<f64>,
    format: Format,
) -> std::result::Result<String, Failure> {
    let res = residuals(params)?;
    let rows = [
        ParamRow {
            name: "mu_elite",
            value: params.mu_elite,
        },
        ParamRow {
            name: "mu_nonelite",
            value: params.mu_nonelite,
        },
        ParamRow {
            name: "sigma_elite",
            value: params.sigma_elite,
        },
        ParamRow {
            name: "sigma_nonelite",
            value: params.sigma_nonelite,
        },
        ParamRow {
            name: "cov_elite_pair",
            value: params.cov_elite_pair,
        },
        ParamRow {
            name: "cov_nonelite_pair",
            value: params.cov_nonelite_pair,
        },
        ParamRow {
            name: "rho_elite_pair",
            value: params.pair_correlation(DriverClass::Elite),
        },
        ParamRow {
            name: "rho_nonelite_pair",
            value: params.pair_correlation(DriverClass::Nonelite),
        },
        ParamRow {
            name: "z_table_limit",
            value: params.z_table_limit,
        },
        ParamRow {
            name: "residual_win_equation",
            value: res.win_equation,
        },
        ParamRow {
            name: "residual_top_nine_equation",
            value: res.top_nine_equation,
        },
        ParamRow {
            name: "residual_elite_pair_sum",
            value: res.elite_pair_sum,
        },
        ParamRow {
            name: "residual_nonelite_pair_sum",
            value: res.nonelite_pair_sum,
        },
    ];
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rows).map_err(Error::from)? + "\n",
        Format::Csv => {
            let mut s = String::from("name,value\n");
            for r in &rows {
                s.push_str(&format!("{},{}\n", r.name, r.value));
            }
            s
        }
        Format::Md => {
            let mut s = String::from("| Parameter | Value |\n|---|--:|\n");
            for r in &rows {
                let v = if r.name.starts_with("residual") {
                    format!("{:.3e}", r.value)
                } else {
                    format!("{:.6}", r.value)
                };
                s.push_str(&format!("| {} | {} |\n", r.name, v));
            }
            s
        }
    };
    if res.max_abs() > RESIDUAL_LIMIT {
        return Err(Failure::Numeric(format!(
            "calibration residual {:.3e} exceeds {RESIDUAL_LIMIT:e}",
            res.max_abs()
        )));
    }
    Ok(text)
}

#[derive(Debug, Serialize)]
struct ProbRow {
    outcome: String,
    elite: f64,
    nonelite: f64,
}

const PLACE_NAMES: [&str; 10] = [
    "win", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
];

fn cmd_probs(params: &ModelParams<f64>, format: Format) -> std::result::Result<String, Failure> {
    let elite = position_distribution(params, DriverClass::Elite);
    let nonelite = position_distribution(params, DriverClass::Nonelite);
    for d in [&elite, &nonelite] {
        let total = d.total();
        if (total - 1.0).abs() > SUM_CHECK_LIMIT {
            return Err(Failure::Numeric(format!(
                "{} position probabilities sum to {total}",
                d.class
            )));
        }
    }
    let mut rows: Vec<ProbRow> = PLACE_NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| ProbRow {
            outcome: (*name).into(),
            elite: elite.probs[i],
            nonelite: nonelite.probs[i],
        })
        .collect();
    for kind in Aggregate::ALL {
        let mut row = ProbRow {
            outcome: kind.to_string(),
            elite: 0.0,
            nonelite: 0.0,
        };
        for class in [DriverClass::Elite, DriverClass::Nonelite] {
            let closed = aggregate_probability(params, class, kind).value();
            let summed = aggregate_from_bins(params, class, kind).value();
            if (closed - summed).abs() > SUM_CHECK_LIMIT {
                return Err(Failure::Numeric(format!(
                    "{class} {kind}: closed form {closed} vs bin sum {summed}"
                )));
            }
            match class {
                DriverClass::Elite => row.elite = closed,
                DriverClass::Nonelite => row.nonelite = closed,
            }
        }
        rows.push(row);
    }
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&rows).map_err(Error::from)? + "\n",
        Format::Csv => {
            let mut s = String::from("outcome,elite,nonelite\n");
            for r in &rows {
                s.push_str(&format!("{},{},{}\n", r.outcome, r.elite, r.nonelite));
            }
            s
        }
        Format::Md => {
            let mut s = String::from(
                "| Probability | Elite-team driver | Non-elite team driver |\n|---|--:|--:|\n",
            );
            for r in &rows {
                s.push_str(&format!(
                    "| {} | {:.6} | {:.6} |\n",
                    r.outcome, r.elite, r.nonelite
                ));
            }
            s
        }
    })
}

fn cache_path(dir: &Path, category: Category, config: &SeasonConfig) -> PathBuf {
    dir.join(format!(
        "{}_{}_seed{}_sims{}_full{}_sprint{}.json",
        config.scenario,
        category,
        config.master_seed,
        config.n_sims,
        config.races_full,
        config.races_sprint
    ))
}

/// Summary for one category, through the cache when one is configured.
fn cached_summary(
    common: &CommonArgs,
    category: Category,
    config: &SeasonConfig,
) -> Result<SimulationSummary<f64>> {
    if let Some(dir) = &common.cache_dir {
        let path = cache_path(dir, category, config);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(s) = serde_json::from_str::<SimulationSummary<f64>>(&text) {
                return Ok(s);
            }
        }
        let s = summarize(category, config, common.workers)?;
        fs::create_dir_all(dir)?;
        fs::write(&path, serde_json::to_string(&s)?)?;
        Ok(s)
    } else {
        summarize(category, config, common.workers)
    }
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    category: Category,
    scenario: Scenario,
    mean_points: f64,
    ci_low: f64,
    ci_high: f64,
    n_sims: u64,
}

impl From<&SimulationSummary<f64>> for SummaryRow {
    fn from(s: &SimulationSummary<f64>) -> Self {
        Self {
            category: s.category,
            scenario: s.scenario,
            mean_points: s.mean_points,
            ci_low: s.ci_low,
            ci_high: s.ci_high,
            n_sims: s.n_sims,
        }
    }
}

fn fmt_bound(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x}")
    }
}

pub fn render_summaries(summaries: &[SimulationSummary<f64>], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => {
            let rows: Vec<SummaryRow> = summaries.iter().map(SummaryRow::from).collect();
            serde_json::to_string_pretty(&rows)? + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for s in summaries {
                w.serialize(SummaryRow::from(s))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            String::from_utf8(bytes).expect("csv output is utf-8")
        }
        Format::Md => {
            let mut s = String::from(
                "| Category | Scenario | Mean points | 95% CI | Simulations |\n|---|---|--:|---|--:|\n",
            );
            for row in summaries {
                s.push_str(&format!(
                    "| {} | {} | {:.3} | ({}–{}) | {} |\n",
                    row.category.label(),
                    row.scenario,
                    row.mean_points,
                    fmt_bound(row.ci_low),
                    fmt_bound(row.ci_high),
                    row.n_sims
                ));
            }
            s
        }
    })
}

fn cmd_simulate(
    common: &CommonArgs,
    config: &SeasonConfig,
    rookie: bool,
) -> std::result::Result<String, Failure> {
    let categories: &[Category] = if config.scenario == Scenario::Rookie {
        &[Category::EliteDriver]
    } else {
        &Category::ALL
    };
    if rookie && config.scenario != Scenario::Baseline {
        return Err(Failure::Validation(
            "--rookie needs the baseline scenario".into(),
        ));
    }
    let mut summaries = categories
        .iter()
        .map(|&c| cached_summary(common, c, config))
        .collect::<Result<Vec<_>>>()?;
    if rookie {
        let base = summaries
            .iter()
            .find(|s| s.category == Category::EliteDriver)
            .copied()
            .expect("baseline run includes elite drivers");
        summaries.push(rookie_benchmark(&base)?);
    }
    Ok(render_summaries(&summaries, common.format)?)
}

fn cmd_benchmark(
    common: &CommonArgs,
    config: &SeasonConfig,
    results: Option<&Path>,
) -> std::result::Result<String, Failure> {
    let mut records = match results {
        Some(path) => {
            let file = fs::File::open(path)
                .map_err(|e| Failure::Validation(format!("cannot open {}: {e}", path.display())))?;
            ingest_results(file)?
        }
        None => ingest_results(SEASON_2025_CSV.as_bytes())?,
    };
    if !records.iter().any(|r| r.entity == Entity::Team) {
        let teams = team_records(&records)?;
        records.extend(teams);
    }

    let mut benchmarks = HashMap::new();
    for category in Category::ALL {
        let summary = if config.scenario == Scenario::Rookie {
            let base_cfg = SeasonConfig {
                scenario: Scenario::Baseline,
                ..*config
            };
            let base = cached_summary(common, category, &base_cfg)?;
            if category == Category::EliteDriver {
                rookie_benchmark(&base)?
            } else {
                base
            }
        } else {
            cached_summary(common, category, config)?
        };
        benchmarks.insert(category, summary);
    }
    let verdicts = classify_season(&records, &benchmarks)?;
    Ok(match common.format {
        Format::Md => render_markdown(&verdicts),
        Format::Json => render_json(&verdicts)? + "\n",
        Format::Csv => render_csv(&verdicts)?,
    })
}
