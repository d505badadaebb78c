//! Model parameters for elite and non-elite finishing positions.
//!
//! Means come from discrete uniforms over the positions each class is
//! expected to occupy. Standard deviations are fixed by requiring that one of
//! the eight elite drivers wins (`8 Φ(-3/σ_E) = 1`) and one of the twelve
//! non-elite drivers makes the top nine (`12 Φ(-5/σ_N) = 1`). Teammate
//! covariances come from pinning the tail of the pair-sum distribution at the
//! printed-table limit `z = 4.9`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special_fn::{quantile_open, std_normal_cdf};

/// Elite drivers share positions 1..=8: mean of U{1,8}.
pub const ELITE_MEAN: f64 = 4.5;
/// With one dominant manufacturer the rest of the elite fight over 3..=8.
pub const DOMINANT_ELITE_MEAN: f64 = 5.5;
/// Non-elite drivers share positions 9..=20: mean of U{9,20}.
pub const NONELITE_MEAN: f64 = 14.5;
/// Largest |z| at which a 4-decimal normal table still prints 0 or 1.
pub const Z_TABLE_LIMIT: f64 = 4.9;

pub const ELITE_DRIVERS: u32 = 8;
pub const NONELITE_DRIVERS: u32 = 12;

/// Rank a driver must beat to win.
pub const WIN_THRESHOLD: f64 = 1.5;
/// Rank at or below which a non-elite driver is in the top nine.
pub const TOP_NINE_THRESHOLD: f64 = 9.5;

/// Pair-sum bound an elite team cannot reach (1 + 2 = 3 is the best pair).
pub const ELITE_PAIR_SUM_FLOOR: f64 = 3.0;
/// Pair-sum bound a non-elite team always respects (19 + 20 = 39).
pub const NONELITE_PAIR_SUM_CEILING: f64 = 39.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriverClass {
    Elite,
    Nonelite,
}

impl DriverClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DriverClass::Elite => "elite",
            DriverClass::Nonelite => "nonelite",
        }
    }
}

impl fmt::Display for DriverClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DriverClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "elite" => Ok(DriverClass::Elite),
            "nonelite" | "non-elite" | "non_elite" => Ok(DriverClass::Nonelite),
            other => Err(format!("expected elite or nonelite, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    #[default]
    Baseline,
    /// One constructor takes the top two places; the other elite drivers
    /// average U{3,8}.
    DominantManufacturer,
    /// First-season elite driver: baseline benchmarks halved after simulation.
    Rookie,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::DominantManufacturer => "dominant",
            Scenario::Rookie => "rookie",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "baseline" => Ok(Scenario::Baseline),
            "dominant" | "dominant_manufacturer" | "dominant-manufacturer" => {
                Ok(Scenario::DominantManufacturer)
            }
            "rookie" => Ok(Scenario::Rookie),
            _ => Err(Error::UnknownScenario(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<F> {
    pub mu_elite: F,
    pub mu_nonelite: F,
    pub sigma_elite: F,
    pub sigma_nonelite: F,
    pub cov_elite_pair: F,
    pub cov_nonelite_pair: F,
    pub z_table_limit: F,
}

impl<F: Real> ModelParams<F> {
    pub fn mean(&self, class: DriverClass) -> F {
        match class {
            DriverClass::Elite => self.mu_elite,
            DriverClass::Nonelite => self.mu_nonelite,
        }
    }

    pub fn sigma(&self, class: DriverClass) -> F {
        match class {
            DriverClass::Elite => self.sigma_elite,
            DriverClass::Nonelite => self.sigma_nonelite,
        }
    }

    pub fn pair_covariance(&self, class: DriverClass) -> F {
        match class {
            DriverClass::Elite => self.cov_elite_pair,
            DriverClass::Nonelite => self.cov_nonelite_pair,
        }
    }

    /// Teammate correlation `cov / σ²`.
    pub fn pair_correlation(&self, class: DriverClass) -> F {
        let s = self.sigma(class);
        self.pair_covariance(class) / (s * s)
    }

    /// Checks every invariant the models rely on.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.mu_elite,
            self.mu_nonelite,
            self.sigma_elite,
            self.sigma_nonelite,
            self.cov_elite_pair,
            self.cov_nonelite_pair,
            self.z_table_limit,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite field".into()));
        }
        if self.sigma_elite <= F::zero() || self.sigma_nonelite <= F::zero() {
            return Err(Error::InvalidParams(
                "standard deviations must be positive".into(),
            ));
        }
        if self.sigma_nonelite <= self.sigma_elite {
            return Err(Error::InvalidParams(
                "non-elite positions must be more variable than elite".into(),
            ));
        }
        for class in [DriverClass::Elite, DriverClass::Nonelite] {
            let var = self.sigma(class).powi(2);
            let cov = self.pair_covariance(class);
            if cov >= F::zero() {
                return Err(Error::InvalidParams(format!(
                    "{class} teammate covariance must be negative"
                )));
            }
            if cov.abs() >= var {
                return Err(Error::NotPositiveDefinite {
                    variance: var.to_f64_lossy(),
                    covariance: cov.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}

/// `σ_E = -3 / Φ⁻¹(1/8)`.
pub fn calibrate_sigma_elite<F: Real>() -> F {
    let gap = F::lit(WIN_THRESHOLD - ELITE_MEAN);
    gap / quantile_open(F::one() / F::lit(ELITE_DRIVERS as f64))
}

/// `σ_N = -5 / Φ⁻¹(1/12)`.
pub fn calibrate_sigma_nonelite<F: Real>() -> F {
    let gap = F::lit(TOP_NINE_THRESHOLD - NONELITE_MEAN);
    gap / quantile_open(F::one() / F::lit(NONELITE_DRIVERS as f64))
}

/// Covariance that makes `(r₁+r₂ - 2μ)` hit `-z_limit` standard deviations
/// exactly at `gap`: `σ_pair = gap²/(2 z²) - σ²`.
// Negated comparisons so that NaN is rejected too.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn pair_covariance<F: Real>(gap: F, sigma: F) -> Result<F> {
    if !(sigma > F::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidParams(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let z = F::lit(Z_TABLE_LIMIT);
    Ok(gap * gap / (F::lit(2.0) * z * z) - sigma * sigma)
}

/// `σ_EE = 36 / (2 · 4.9²) - σ_E²`, from `Pr(r₁ + r₂ ≤ 3) = Φ(-4.9)`.
pub fn calibrate_cov_elite<F: Real>(sigma_elite: F) -> Result<F> {
    let gap = F::lit(2.0 * ELITE_MEAN - ELITE_PAIR_SUM_FLOOR);
    pair_covariance(gap, sigma_elite)
}

/// `σ_NN = 100 / (2 · 4.9²) - σ_N²`, from `Pr(r₁ + r₂ ≤ 39) = Φ(4.9)`.
pub fn calibrate_cov_nonelite<F: Real>(sigma_nonelite: F) -> Result<F> {
    let gap = F::lit(NONELITE_PAIR_SUM_CEILING - 2.0 * NONELITE_MEAN);
    pair_covariance(gap, sigma_nonelite)
}

/// Parameters for a scenario. Only the elite mean moves between scenarios.
pub fn make_params<F: Real>(scenario: Scenario) -> ModelParams<F> {
    let sigma_elite = calibrate_sigma_elite::<F>();
    let sigma_nonelite = calibrate_sigma_nonelite::<F>();
    let mu_elite = match scenario {
        Scenario::Baseline | Scenario::Rookie => ELITE_MEAN,
        Scenario::DominantManufacturer => DOMINANT_ELITE_MEAN,
    };
    ModelParams {
        mu_elite: F::lit(mu_elite),
        mu_nonelite: F::lit(NONELITE_MEAN),
        sigma_elite,
        sigma_nonelite,
        cov_elite_pair: calibrate_cov_elite(sigma_elite).expect("calibrated sigma is positive"),
        cov_nonelite_pair: calibrate_cov_nonelite(sigma_nonelite)
            .expect("calibrated sigma is positive"),
        z_table_limit: F::lit(Z_TABLE_LIMIT),
    }
}

/// Residuals of the defining equations, in the order
/// `8Φ(-3/σ_E) - 1`, `12Φ(-5/σ_N) - 1`, elite pair-sum z + 4.9,
/// non-elite pair-sum z - 4.9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals<F> {
    pub win_equation: F,
    pub top_nine_equation: F,
    pub elite_pair_sum: F,
    pub nonelite_pair_sum: F,
}

impl<F: Real> Residuals<F> {
    pub fn max_abs(&self) -> F {
        self.win_equation
            .abs()
            .max(self.top_nine_equation.abs())
            .max(self.elite_pair_sum.abs())
            .max(self.nonelite_pair_sum.abs())
    }
}

pub fn residuals<F: Real>(params: &ModelParams<F>) -> Result<Residuals<F>> {
    let two = F::lit(2.0);
    let win = F::lit(ELITE_DRIVERS as f64)
        * std_normal_cdf(F::lit(WIN_THRESHOLD - ELITE_MEAN) / params.sigma_elite)?.value()
        - F::one();
    let top9 = F::lit(NONELITE_DRIVERS as f64)
        * std_normal_cdf(F::lit(TOP_NINE_THRESHOLD - NONELITE_MEAN) / params.sigma_nonelite)?
            .value()
        - F::one();
    let elite_sd = (two * params.sigma_elite.powi(2) + two * params.cov_elite_pair).sqrt();
    let nonelite_sd = (two * params.sigma_nonelite.powi(2) + two * params.cov_nonelite_pair).sqrt();
    let elite_z = F::lit(ELITE_PAIR_SUM_FLOOR - 2.0 * ELITE_MEAN) / elite_sd;
    let nonelite_z = F::lit(NONELITE_PAIR_SUM_CEILING - 2.0 * NONELITE_MEAN) / nonelite_sd;
    Ok(Residuals {
        win_equation: win,
        top_nine_equation: top9,
        elite_pair_sum: elite_z + params.z_table_limit,
        nonelite_pair_sum: nonelite_z - params.z_table_limit,
    })
}
