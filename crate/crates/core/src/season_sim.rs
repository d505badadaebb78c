//! Monte Carlo season simulation.
//!
//! Each race a finishing position is drawn from the class's normal model,
//! rounded half away from zero, clamped to `1..=20` and scored. Teams draw
//! both drivers jointly from the bivariate model with the calibrated
//! (negative) teammate covariance. Positions are marginal: two simulated
//! entrants may share a place.
//!
//! Season totals are integers bounded by the points table, so summaries are
//! built from a histogram of totals. Per-chunk histograms merge by integer
//! addition, which makes the summary independent of how simulations are
//! split across threads.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{make_params, DriverClass, ModelParams, Scenario};
use crate::error::{Error, Result};
use crate::points::{PointsTable, RaceKind, GRID_SIZE};
use crate::rng::{DrawStream, SLOTS_PER_RACE};
use crate::scalar::Real;
use crate::special_fn::quantile_open;

pub const DEFAULT_RACES_FULL: u32 = 24;
pub const DEFAULT_RACES_SPRINT: u32 = 6;
pub const DEFAULT_SIMS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 20_250_101;
/// Smallest simulation count for which a 2.5% tail holds a whole season.
pub const MIN_SIMS_FOR_CI: u64 = 40;

/// Simulations handed to a worker at a time. Fixed so that chunking never
/// depends on the worker count.
const CHUNK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeasonConfig {
    pub races_full: u32,
    pub races_sprint: u32,
    pub n_sims: u64,
    pub master_seed: u64,
    pub scenario: Scenario,
}

impl Default for SeasonConfig {
    fn default() -> Self {
        Self {
            races_full: DEFAULT_RACES_FULL,
            races_sprint: DEFAULT_RACES_SPRINT,
            n_sims: DEFAULT_SIMS,
            master_seed: DEFAULT_SEED,
            scenario: Scenario::Baseline,
        }
    }
}

impl SeasonConfig {
    pub fn races(&self) -> u64 {
        u64::from(self.races_full) + u64::from(self.races_sprint)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sims == 0 {
            return Err(Error::InvalidConfig("n_sims must be at least 1".into()));
        }
        Ok(())
    }

    /// Race `i` is a full race for `i < races_full`, then sprints follow.
    #[inline]
    fn race_kind(&self, race_index: u64) -> RaceKind {
        if race_index < u64::from(self.races_full) {
            RaceKind::Full
        } else {
            RaceKind::Sprint
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entity {
    Driver,
    Team,
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entity::Driver => "driver",
            Entity::Team => "team",
        })
    }
}

impl std::str::FromStr for Entity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "driver" => Ok(Entity::Driver),
            "team" => Ok(Entity::Team),
            other => Err(format!("expected driver or team, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    EliteDriver,
    EliteTeam,
    NoneliteDriver,
    NoneliteTeam,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::EliteDriver,
        Category::EliteTeam,
        Category::NoneliteDriver,
        Category::NoneliteTeam,
    ];

    pub fn new(class: DriverClass, entity: Entity) -> Self {
        match (class, entity) {
            (DriverClass::Elite, Entity::Driver) => Category::EliteDriver,
            (DriverClass::Elite, Entity::Team) => Category::EliteTeam,
            (DriverClass::Nonelite, Entity::Driver) => Category::NoneliteDriver,
            (DriverClass::Nonelite, Entity::Team) => Category::NoneliteTeam,
        }
    }

    pub fn class(self) -> DriverClass {
        match self {
            Category::EliteDriver | Category::EliteTeam => DriverClass::Elite,
            Category::NoneliteDriver | Category::NoneliteTeam => DriverClass::Nonelite,
        }
    }

    pub fn entity(self) -> Entity {
        match self {
            Category::EliteDriver | Category::NoneliteDriver => Entity::Driver,
            Category::EliteTeam | Category::NoneliteTeam => Entity::Team,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::EliteDriver => "elite_driver",
            Category::EliteTeam => "elite_team",
            Category::NoneliteDriver => "nonelite_driver",
            Category::NoneliteTeam => "nonelite_team",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::EliteDriver => "Elite driver",
            Category::EliteTeam => "Elite team",
            Category::NoneliteDriver => "Non-elite driver",
            Category::NoneliteTeam => "Non-elite team",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary<F> {
    pub category: Category,
    pub scenario: Scenario,
    pub mean_points: F,
    pub ci_low: F,
    pub ci_high: F,
    pub n_sims: u64,
}

/// Nearest position, halves rounded away from zero, clamped to the grid.
#[inline]
#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN maps to P1
pub fn round_clamp<F: Real>(rank: F) -> u8 {
    let r = rank.round();
    if !(r >= F::one()) {
        1
    } else if r >= F::lit(GRID_SIZE as f64) {
        GRID_SIZE as u8
    } else {
        r.to_u8().unwrap_or(GRID_SIZE as u8)
    }
}

/// Scores a season from per-race continuous ranks. `draw(race_index)` gives
/// the rank for that race; full races come first, then sprints.
pub fn score_season<F: Real>(
    table: &PointsTable,
    config: &SeasonConfig,
    mut draw: impl FnMut(u64) -> F,
) -> u32 {
    (0..config.races())
        .map(|race| table.points(config.race_kind(race), round_clamp(draw(race))))
        .sum()
}

#[inline]
fn uniform_as<F: Real>(u: f64) -> F {
    let v = F::lit(u);
    // Only reachable in single precision, where 1 - 2^-53 rounds up to 1.
    if v >= F::one() {
        F::one() - F::epsilon() / F::lit(2.0)
    } else {
        v
    }
}

/// Lower-triangular factor of the teammate covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSampler<F> {
    mean: F,
    sigma: F,
    /// `ρσ`
    cross: F,
    /// `σ√(1-ρ²)`
    residual: F,
}

impl<F: Real> PairSampler<F> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN inputs are rejected
    pub fn new(mean: F, sigma: F, covariance: F) -> Result<Self> {
        let var = sigma * sigma;
        if !(sigma > F::zero()) || !(covariance.abs() < var) || !mean.is_finite() {
            return Err(Error::NotPositiveDefinite {
                variance: var.to_f64_lossy(),
                covariance: covariance.to_f64_lossy(),
            });
        }
        let cross = covariance / sigma;
        let residual = (var - cross * cross).sqrt();
        Ok(Self {
            mean,
            sigma,
            cross,
            residual,
        })
    }

    pub fn for_class(params: &ModelParams<F>, class: DriverClass) -> Result<Self> {
        Self::new(
            params.mean(class),
            params.sigma(class),
            params.pair_covariance(class),
        )
    }

    /// Correlated ranks from two independent standard normals.
    #[inline]
    pub fn transform(&self, z1: F, z2: F) -> (F, F) {
        (
            self.mean + self.sigma * z1,
            self.mean + self.cross * z1 + self.residual * z2,
        )
    }

    #[inline]
    fn sample(&self, stream: &mut DrawStream) -> (F, F) {
        let z1 = quantile_open(uniform_as::<F>(stream.next_open01()));
        let z2 = quantile_open(uniform_as::<F>(stream.next_open01()));
        self.transform(z1, z2)
    }
}

/// Univariate rank sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DriverSampler<F> {
    mean: F,
    sigma: F,
}

impl<F: Real> DriverSampler<F> {
    fn for_class(params: &ModelParams<F>, class: DriverClass) -> Self {
        Self {
            mean: params.mean(class),
            sigma: params.sigma(class),
        }
    }

    /// Reads slot 0 and skips slot 1 so the draw sits at its
    /// `(race, driver 0)` address.
    #[inline]
    fn sample(&self, stream: &mut DrawStream) -> F {
        let z = quantile_open(uniform_as::<F>(stream.next_open01()));
        for _ in 1..SLOTS_PER_RACE {
            stream.next_open01();
        }
        self.mean + self.sigma * z
    }
}

/// Season points for one simulated driver. Pure in
/// `(config.master_seed, sim_index)`.
pub fn simulate_driver_season<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    config: &SeasonConfig,
    sim_index: u64,
) -> u32 {
    let table = PointsTable::season_2025();
    driver_season(
        &table,
        &DriverSampler::for_class(params, class),
        config,
        sim_index,
    )
}

fn driver_season<F: Real>(
    table: &PointsTable,
    sampler: &DriverSampler<F>,
    config: &SeasonConfig,
    sim_index: u64,
) -> u32 {
    let mut stream = DrawStream::new(config.master_seed, sim_index);
    score_season(table, config, |_| sampler.sample(&mut stream))
}

/// Combined season points for one simulated two-driver team.
pub fn simulate_team_season<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    config: &SeasonConfig,
    sim_index: u64,
) -> Result<u32> {
    let table = PointsTable::season_2025();
    let sampler = PairSampler::for_class(params, class)?;
    Ok(team_season(&table, &sampler, config, sim_index))
}

fn team_season<F: Real>(
    table: &PointsTable,
    sampler: &PairSampler<F>,
    config: &SeasonConfig,
    sim_index: u64,
) -> u32 {
    let mut stream = DrawStream::new(config.master_seed, sim_index);
    (0..config.races())
        .map(|race| {
            let kind = config.race_kind(race);
            let (a, b) = sampler.sample(&mut stream);
            table.points(kind, round_clamp(a)) + table.points(kind, round_clamp(b))
        })
        .sum()
}

#[derive(Debug, Clone, Copy)]
enum Sampler<F> {
    Driver(DriverSampler<F>),
    Team(PairSampler<F>),
}

impl<F: Real> Sampler<F> {
    fn new(params: &ModelParams<F>, category: Category) -> Result<Self> {
        let class = category.class();
        Ok(match category.entity() {
            Entity::Driver => Sampler::Driver(DriverSampler::for_class(params, class)),
            Entity::Team => Sampler::Team(PairSampler::for_class(params, class)?),
        })
    }

    fn season(&self, table: &PointsTable, config: &SeasonConfig, sim_index: u64) -> u32 {
        match self {
            Sampler::Driver(s) => driver_season(table, s, config, sim_index),
            Sampler::Team(s) => team_season(table, s, config, sim_index),
        }
    }
}

/// Counts of simulated season totals; `counts[t]` seasons scored `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(max_total: u32) -> Self {
        Self {
            counts: vec![0; max_total as usize + 1],
        }
    }

    #[inline]
    pub fn record(&mut self, total: u32) {
        self.counts[total as usize] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn len(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sum(&self) -> u128 {
        self.counts
            .iter()
            .enumerate()
            .map(|(t, &c)| t as u128 * u128::from(c))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.len() as f64
    }

    /// Smallest total whose cumulative count reaches `rank` (1-based).
    fn value_at_rank(&self, rank: u64) -> u32 {
        let mut seen = 0;
        for (t, &c) in self.counts.iter().enumerate() {
            seen += c;
            if seen >= rank {
                return t as u32;
            }
        }
        (self.counts.len() - 1) as u32
    }

    /// Nearest-rank percentile, `q` in parts per thousand.
    pub fn percentile_per_mille(&self, q: u64) -> u32 {
        let n = self.len();
        let rank = ((n * q).div_ceil(1000)).max(1);
        self.value_at_rank(rank)
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

fn chunks(range: Range<u64>) -> Vec<Range<u64>> {
    let mut out = Vec::new();
    let mut start = range.start;
    while start < range.end {
        let end = (start + CHUNK).min(range.end);
        out.push(start..end);
        start = end;
    }
    out
}

/// Histogram of season totals for simulations `sims` (any sub-range of
/// `0..n_sims`). `workers == 0` uses every available core.
pub fn season_histogram<F: Real>(
    params: &ModelParams<F>,
    category: Category,
    config: &SeasonConfig,
    sims: Range<u64>,
    workers: usize,
) -> Result<Histogram> {
    let table = PointsTable::season_2025();
    let sampler = Sampler::new(params, category)?;
    let per_driver = table.max_season_points(config.races_full, config.races_sprint);
    let max_total = match category.entity() {
        Entity::Driver => per_driver,
        Entity::Team => 2 * per_driver,
    };
    let run = || {
        chunks(sims.clone())
            .into_par_iter()
            .map(|chunk| {
                let mut h = Histogram::new(max_total);
                for sim in chunk {
                    h.record(sampler.season(&table, config, sim));
                }
                h
            })
            .reduce(
                || Histogram::new(max_total),
                |mut a, b| {
                    a.merge(&b);
                    a
                },
            )
    };
    Ok(pool(workers)?.install(run))
}

fn summary_from_histogram<F: Real>(
    category: Category,
    scenario: Scenario,
    hist: &Histogram,
) -> SimulationSummary<F> {
    SimulationSummary {
        category,
        scenario,
        mean_points: F::lit(hist.mean()),
        ci_low: F::lit(f64::from(hist.percentile_per_mille(25))),
        ci_high: F::lit(f64::from(hist.percentile_per_mille(975))),
        n_sims: hist.len(),
    }
}

/// Mean and empirical 95% interval (2.5th / 97.5th nearest-rank
/// percentiles) of season totals under the config's scenario.
///
/// The rookie scenario simulates the baseline elite driver and halves it;
/// other categories are rejected under that scenario.
pub fn summarize<F: Real>(
    category: Category,
    config: &SeasonConfig,
    workers: usize,
) -> Result<SimulationSummary<F>> {
    match config.scenario {
        Scenario::Rookie => {
            if category != Category::EliteDriver {
                return Err(Error::RookieNotApplicable(category.to_string()));
            }
            let base_cfg = SeasonConfig {
                scenario: Scenario::Baseline,
                ..*config
            };
            let base = summarize(category, &base_cfg, workers)?;
            rookie_benchmark(&base)
        }
        scenario => {
            let params = make_params::<F>(scenario);
            summarize_with_params(&params, category, config, workers)
        }
    }
}

/// As [`summarize`], with explicit parameters.
pub fn summarize_with_params<F: Real>(
    params: &ModelParams<F>,
    category: Category,
    config: &SeasonConfig,
    workers: usize,
) -> Result<SimulationSummary<F>> {
    config.validate()?;
    if config.n_sims < MIN_SIMS_FOR_CI {
        return Err(Error::TooFewSimulations {
            min: MIN_SIMS_FOR_CI as usize,
            got: config.n_sims as usize,
        });
    }
    let hist = season_histogram(params, category, config, 0..config.n_sims, workers)?;
    Ok(summary_from_histogram(category, config.scenario, &hist))
}

/// Halves a baseline elite-driver benchmark for a first-season driver.
pub fn rookie_benchmark<F: Real>(base: &SimulationSummary<F>) -> Result<SimulationSummary<F>> {
    if base.category != Category::EliteDriver || base.scenario != Scenario::Baseline {
        return Err(Error::RookieNotApplicable(format!(
            "{} ({})",
            base.category, base.scenario
        )));
    }
    let two = F::lit(2.0);
    Ok(SimulationSummary {
        category: base.category,
        scenario: Scenario::Rookie,
        mean_points: base.mean_points / two,
        ci_low: base.ci_low / two,
        ci_high: base.ci_high / two,
        n_sims: base.n_sims,
    })
}

/// Per-race behaviour of the single-driver model over `n_draws` draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawDiagnostics {
    pub n_draws: u64,
    /// Relative frequency of each rounded, clamped position.
    pub frequencies: [f64; GRID_SIZE],
    /// Mean of the continuous ranks before rounding.
    pub raw_mean: f64,
}

/// Per-race behaviour of the teammate model over `n_pairs` draws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiagnostics {
    pub n_pairs: u64,
    /// Pairs whose continuous ranks sum to at most the threshold.
    pub sum_at_or_below: u64,
    pub threshold: f64,
    /// Correlation of the continuous ranks.
    pub correlation: f64,
    /// Correlation after rounding and clamping.
    pub rounded_correlation: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Moments {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    fn add(mut self, o: Moments) -> Self {
        self.n += o.n;
        self.sx += o.sx;
        self.sy += o.sy;
        self.sxx += o.sxx;
        self.syy += o.syy;
        self.sxy += o.sxy;
        self
    }

    fn correlation(&self) -> f64 {
        let cov = self.sxy / self.n - (self.sx / self.n) * (self.sy / self.n);
        let vx = self.sxx / self.n - (self.sx / self.n).powi(2);
        let vy = self.syy / self.n - (self.sy / self.n).powi(2);
        cov / (vx * vy).sqrt()
    }
}

/// Draw `j` is race 0 of simulation `j` under `master_seed`.
pub fn draw_diagnostics<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    master_seed: u64,
    n_draws: u64,
    workers: usize,
) -> Result<DrawDiagnostics> {
    let sampler = DriverSampler::for_class(params, class);
    let parts: Vec<([u64; GRID_SIZE], f64)> = pool(workers)?.install(|| {
        chunks(0..n_draws)
            .into_par_iter()
            .map(|chunk| {
                let mut counts = [0u64; GRID_SIZE];
                let mut raw = 0.0;
                for j in chunk {
                    let mut stream = DrawStream::new(master_seed, j);
                    let r = sampler.sample(&mut stream);
                    counts[usize::from(round_clamp(r)) - 1] += 1;
                    raw += r.to_f64_lossy();
                }
                (counts, raw)
            })
            .collect()
    });
    let mut counts = [0u64; GRID_SIZE];
    let mut raw = 0.0;
    for (c, r) in parts {
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
        raw += r;
    }
    let n = n_draws as f64;
    Ok(DrawDiagnostics {
        n_draws,
        frequencies: counts.map(|c| c as f64 / n),
        raw_mean: raw / n,
    })
}

/// Pair draw `j` is race 0 of simulation `j` under `master_seed`.
pub fn pair_diagnostics<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    master_seed: u64,
    n_pairs: u64,
    sum_threshold: f64,
    workers: usize,
) -> Result<PairDiagnostics> {
    let sampler = PairSampler::for_class(params, class)?;
    let parts: Vec<(u64, Moments, Moments)> = pool(workers)?.install(|| {
        chunks(0..n_pairs)
            .into_par_iter()
            .map(|chunk| {
                let mut below = 0;
                let mut raw = Moments::default();
                let mut rounded = Moments::default();
                for j in chunk {
                    let mut stream = DrawStream::new(master_seed, j);
                    let (a, b) = sampler.sample(&mut stream);
                    let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
                    if a + b <= sum_threshold {
                        below += 1;
                    }
                    raw.push(a, b);
                    rounded.push(f64::from(round_clamp(a)), f64::from(round_clamp(b)));
                }
                (below, raw, rounded)
            })
            .collect()
    });
    let (below, raw, rounded) = parts.into_iter().fold(
        (0, Moments::default(), Moments::default()),
        |(n, r, q), (n2, r2, q2)| (n + n2, r.add(r2), q.add(q2)),
    );
    Ok(PairDiagnostics {
        n_pairs,
        sum_at_or_below: below,
        threshold: sum_threshold,
        correlation: raw.correlation(),
        rounded_correlation: rounded.correlation(),
    })
}
