//! Normal-model benchmarks for Formula 1 season points.
//!
//! Finishing positions of elite and non-elite drivers are modelled as
//! rounded normal draws; teammates are jointly normal with a negative
//! covariance. From there the crate gives closed-form position
//! probabilities, seeded Monte Carlo season simulations with percentile
//! intervals, and an above / meets / below verdict for real season totals.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix it to double precision, which is what the CLI uses.

pub mod analytic_probs;
pub mod benchmark;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod points;
pub mod rng;
pub mod scalar;
pub mod season_sim;
pub mod special_fn;

pub use analytic_probs::{
    aggregate_probability, expected_season_points, position_distribution, position_probability,
    Aggregate, PositionDistribution,
};
pub use benchmark::{
    classify, classify_season, ingest_results, team_records, Outcome, SeasonRecord, Verdict,
};
pub use calibration::{
    calibrate_cov_elite, calibrate_cov_nonelite, calibrate_sigma_elite, calibrate_sigma_nonelite,
    make_params, DriverClass, ModelParams, Scenario,
};
pub use error::{Error, Result};
pub use points::{PointsTable, RaceKind};
pub use scalar::Real;
pub use season_sim::{
    rookie_benchmark, simulate_driver_season, simulate_team_season, summarize, Category, Entity,
    SeasonConfig, SimulationSummary,
};
pub use special_fn::{std_normal_cdf, std_normal_quantile, Probability};

pub type ModelParams64 = ModelParams<f64>;
pub type ModelParams32 = ModelParams<f32>;
pub type SimulationSummary64 = SimulationSummary<f64>;
pub type SimulationSummary32 = SimulationSummary<f32>;
pub type PositionDistribution64 = PositionDistribution<f64>;
pub type Probability64 = Probability<f64>;
pub type Verdict64 = Verdict<f64>;
