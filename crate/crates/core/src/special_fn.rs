//! Standard normal CDF and quantile.
//!
//! `Φ` goes through W. J. Cody's rational Chebyshev approximation of `erfc`
//! (Math. Comp. 1969; the Netlib SPECFUN `CALERF` packet), which is good to
//! close to machine precision in `f64`. `Φ⁻¹` starts from Acklam's rational
//! approximation (relative error about 1.15e-9) and takes one Newton step
//! against `Φ`.

// Coefficients are kept exactly as published.
#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Probability<F>(F);

impl<F: Real> Probability<F> {
    pub fn new(value: F) -> Result<Self> {
        if value >= F::zero() && value <= F::one() {
            Ok(Self(value))
        } else {
            Err(Error::NotAProbability(value.to_f64_lossy()))
        }
    }

    /// Caller guarantees `0 <= value <= 1`.
    pub(crate) fn new_unchecked(value: F) -> Self {
        debug_assert!(value >= F::zero() && value <= F::one());
        Self(value)
    }

    #[inline]
    pub fn value(self) -> F {
        self.0
    }

    /// `1 - p`.
    pub fn complement(self) -> Self {
        Self(F::one() - self.0)
    }
}

impl<F: Real> From<Probability<F>> for f64 {
    fn from(p: Probability<F>) -> f64 {
        p.0.to_f64_lossy()
    }
}

const CODY_A: [f64; 5] = [
    3.16112374387056560e00,
    1.13864154151050156e02,
    3.77485237685302021e02,
    3.20937758913846947e03,
    1.85777706184603153e-1,
];
const CODY_B: [f64; 4] = [
    2.36012909523441209e01,
    2.44024637934444173e02,
    1.28261652607737228e03,
    2.84423683343917062e03,
];
const CODY_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e01,
    2.98635138197400131e02,
    8.81952221241769090e02,
    1.71204761263407058e03,
    2.05107837782607147e03,
    1.23033935479799725e03,
    2.15311535474403846e-8,
];
const CODY_D: [f64; 8] = [
    1.57449261107098347e01,
    1.17693950891312499e02,
    5.37181101862009858e02,
    1.62138957456669019e03,
    3.29079923573345963e03,
    4.36261909014324716e03,
    3.43936767414372164e03,
    1.23033935480374942e03,
];
const CODY_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const CODY_Q: [f64; 5] = [
    2.56852019228982242e00,
    1.87295284992346047e00,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

/// 1/sqrt(pi)
const FRAC_1_SQRT_PI: f64 = 5.6418958354775628695e-1;
const ERFC_XBIG: f64 = 26.543;

/// `exp(-y*y)` with the argument split so the square does not lose bits.
#[inline]
fn exp_neg_sq<F: Real>(y: F) -> F {
    let sixteen = F::lit(16.0);
    let ysq = (y * sixteen).trunc() / sixteen;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Complementary error function.
pub fn erfc<F: Real>(x: F) -> F {
    let y = x.abs();
    let result = if y <= F::lit(0.46875) {
        let ysq = if y > F::epsilon() { y * y } else { F::zero() };
        let mut num = F::lit(CODY_A[4]) * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + F::lit(CODY_A[i])) * ysq;
            den = (den + F::lit(CODY_B[i])) * ysq;
        }
        let erf = x * (num + F::lit(CODY_A[3])) / (den + F::lit(CODY_B[3]));
        return F::one() - erf;
    } else if y <= F::lit(4.0) {
        let mut num = F::lit(CODY_C[8]) * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + F::lit(CODY_C[i])) * y;
            den = (den + F::lit(CODY_D[i])) * y;
        }
        let r = (num + F::lit(CODY_C[7])) / (den + F::lit(CODY_D[7]));
        exp_neg_sq(y) * r
    } else if y >= F::lit(ERFC_XBIG) {
        F::zero()
    } else {
        let ysq = F::one() / (y * y);
        let mut num = F::lit(CODY_P[5]) * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + F::lit(CODY_P[i])) * ysq;
            den = (den + F::lit(CODY_Q[i])) * ysq;
        }
        let r = ysq * (num + F::lit(CODY_P[4])) / (den + F::lit(CODY_Q[4]));
        let r = (F::lit(FRAC_1_SQRT_PI) - r) / y;
        exp_neg_sq(y) * r
    };
    if x < F::zero() {
        F::lit(2.0) - result
    } else {
        result
    }
}

/// Standard normal density.
#[inline]
pub fn std_normal_pdf<F: Real>(z: F) -> F {
    let inv_sqrt_2pi = F::one() / (F::TAU()).sqrt();
    inv_sqrt_2pi * (-(z * z) / F::lit(2.0)).exp()
}

#[inline]
pub(crate) fn phi<F: Real>(z: F) -> F {
    erfc(-z * F::FRAC_1_SQRT_2()) / F::lit(2.0)
}

/// Standard normal CDF `Φ(z)`.
pub fn std_normal_cdf<F: Real>(z: F) -> Result<Probability<F>> {
    if !z.is_finite() {
        return Err(Error::NonFinite(z.to_f64_lossy()));
    }
    Ok(Probability::new_unchecked(
        phi(z).min(F::one()).max(F::zero()),
    ))
}

const ACKLAM_A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const ACKLAM_B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const ACKLAM_C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const ACKLAM_D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const ACKLAM_P_LOW: f64 = 0.02425;

/// Quantile for `0 < p <= 0.5`.
fn lower_quantile<F: Real>(p: F) -> F {
    let lit = F::lit;
    let z = if p < lit(ACKLAM_P_LOW) {
        let q = (lit(-2.0) * p.ln()).sqrt();
        let num = ((((lit(ACKLAM_C[0]) * q + lit(ACKLAM_C[1])) * q + lit(ACKLAM_C[2])) * q
            + lit(ACKLAM_C[3]))
            * q
            + lit(ACKLAM_C[4]))
            * q
            + lit(ACKLAM_C[5]);
        let den = (((lit(ACKLAM_D[0]) * q + lit(ACKLAM_D[1])) * q + lit(ACKLAM_D[2])) * q
            + lit(ACKLAM_D[3]))
            * q
            + F::one();
        num / den
    } else {
        let q = p - lit(0.5);
        let r = q * q;
        let num = (((((lit(ACKLAM_A[0]) * r + lit(ACKLAM_A[1])) * r + lit(ACKLAM_A[2])) * r
            + lit(ACKLAM_A[3]))
            * r
            + lit(ACKLAM_A[4]))
            * r
            + lit(ACKLAM_A[5]))
            * q;
        let den = ((((lit(ACKLAM_B[0]) * r + lit(ACKLAM_B[1])) * r + lit(ACKLAM_B[2])) * r
            + lit(ACKLAM_B[3]))
            * r
            + lit(ACKLAM_B[4]))
            * r
            + F::one();
        num / den
    };
    // Newton on Φ(z) - p. Skipped where the density underflows.
    let density = std_normal_pdf(z);
    if density > F::min_positive_value() {
        z - (phi(z) - p) / density
    } else {
        z
    }
}

/// `Φ⁻¹(p)` for `p` already known to lie in `(0, 1)`.
#[inline]
pub(crate) fn quantile_open<F: Real>(p: F) -> F {
    let half = F::lit(0.5);
    if p <= half {
        lower_quantile(p)
    } else {
        // 1 - p is exact for p in [0.5, 1], so q(1-p) = -q(p) holds bitwise.
        -lower_quantile(F::one() - p)
    }
}

/// Standard normal quantile `Φ⁻¹(p)`, defined on the open interval `(0, 1)`.
pub fn std_normal_quantile<F: Real>(p: Probability<F>) -> Result<F> {
    let v = p.value();
    if v <= F::zero() || v >= F::one() {
        return Err(Error::QuantileDomain(v.to_f64_lossy()));
    }
    Ok(quantile_open(v))
}
