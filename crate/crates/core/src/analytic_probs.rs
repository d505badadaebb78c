//! Closed-form finishing-position probabilities.
//!
//! A draw `r ~ N(μ, σ²)` is rounded to the nearest position and clamped to
//! `1..=20`, so position `k` collects the mass on `[k - 1/2, k + 1/2)`, with
//! P1 taking the whole lower tail and P20 the whole upper tail. For P1–P10
//! these bins reproduce the familiar table expressions, e.g. an elite
//! driver's second place is `Φ(-2/σ_E) - Φ(-3/σ_E)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calibration::{DriverClass, ModelParams};
use crate::error::{Error, Result};
use crate::points::{PointsTable, RaceKind, GRID_SIZE};
use crate::scalar::Real;
use crate::season_sim::SeasonConfig;
use crate::special_fn::{phi, Probability};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionDistribution<F> {
    pub class: DriverClass,
    /// `probs[k - 1]` is the probability of finishing in position `k`.
    pub probs: [F; GRID_SIZE],
}

impl<F: Real> PositionDistribution<F> {
    pub fn get(&self, position: u8) -> Result<Probability<F>> {
        check_position(position)?;
        Ok(Probability::new_unchecked(
            self.probs[usize::from(position) - 1],
        ))
    }

    pub fn total(&self) -> F {
        self.probs.iter().copied().sum()
    }

    /// Expected points from one race of the given kind.
    pub fn expected_points(&self, table: &PointsTable, kind: RaceKind) -> F {
        self.probs
            .iter()
            .zip(table.row(kind))
            .map(|(&p, &pts)| p * F::lit(f64::from(pts)))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Podium,
    Top8,
    Top10,
}

impl Aggregate {
    pub const ALL: [Aggregate; 3] = [Aggregate::Podium, Aggregate::Top8, Aggregate::Top10];

    /// Last position counted by the aggregate.
    pub fn last_position(self) -> u8 {
        match self {
            Aggregate::Podium => 3,
            Aggregate::Top8 => 8,
            Aggregate::Top10 => 10,
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregate::Podium => "podium",
            Aggregate::Top8 => "top8",
            Aggregate::Top10 => "top10",
        })
    }
}

fn check_position(position: u8) -> Result<()> {
    if (1..=GRID_SIZE as u8).contains(&position) {
        Ok(())
    } else {
        Err(Error::Position(i64::from(position)))
    }
}

/// `Φ((x - μ)/σ)` for the class.
#[inline]
fn class_cdf<F: Real>(params: &ModelParams<F>, class: DriverClass, x: F) -> F {
    phi((x - params.mean(class)) / params.sigma(class))
}

fn bin<F: Real>(params: &ModelParams<F>, class: DriverClass, position: u8) -> F {
    let half = F::lit(0.5);
    let k = F::lit(f64::from(position));
    let upper = if usize::from(position) == GRID_SIZE {
        F::one()
    } else {
        class_cdf(params, class, k + half)
    };
    let lower = if position == 1 {
        F::zero()
    } else {
        class_cdf(params, class, k - half)
    };
    (upper - lower).max(F::zero())
}

/// Probability of finishing in `position` (1..=20).
pub fn position_probability<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    position: u8,
) -> Result<Probability<F>> {
    check_position(position)?;
    Ok(Probability::new_unchecked(bin(params, class, position)))
}

pub fn position_distribution<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
) -> PositionDistribution<F> {
    let mut probs = [F::zero(); GRID_SIZE];
    for (i, p) in probs.iter_mut().enumerate() {
        *p = bin(params, class, i as u8 + 1);
    }
    PositionDistribution { class, probs }
}

/// Closed form for podium / top-8 / top-10: `Φ((k + 1/2 - μ)/σ)`.
pub fn aggregate_probability<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    kind: Aggregate,
) -> Probability<F> {
    let edge = F::lit(f64::from(kind.last_position()) + 0.5);
    Probability::new_unchecked(class_cdf(params, class, edge))
}

/// The same aggregate as a sum of position bins.
pub fn aggregate_from_bins<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    kind: Aggregate,
) -> Probability<F> {
    let s = (1..=kind.last_position())
        .map(|k| bin(params, class, k))
        .sum::<F>();
    Probability::new_unchecked(s.min(F::one()))
}

/// Exact expected season points for one driver of `class`.
pub fn expected_season_points<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    config: &SeasonConfig,
) -> F {
    expected_season_points_with(params, class, config, &PointsTable::season_2025())
}

pub fn expected_season_points_with<F: Real>(
    params: &ModelParams<F>,
    class: DriverClass,
    config: &SeasonConfig,
    table: &PointsTable,
) -> F {
    let dist = position_distribution(params, class);
    F::lit(f64::from(config.races_full)) * dist.expected_points(table, RaceKind::Full)
        + F::lit(f64::from(config.races_sprint)) * dist.expected_points(table, RaceKind::Sprint)
}
