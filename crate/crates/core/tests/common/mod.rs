//! Reference computations that share no code with the crate.

#![allow(dead_code)]

/// erf by its Maclaurin series. Loses roughly `x²/ln 10` digits to
/// cancellation, so keep `|x| <= 3`.
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..400 {
        term *= -x2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-300 || add.abs() < sum.abs() * 1e-18 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// Φ through the series, valid for `|z| <= 4`.
pub fn phi_series(z: f64) -> f64 {
    0.5 * (1.0 + erf_series(z / std::f64::consts::SQRT_2))
}

/// Solves `phi_series(z) = p` by bisection to `tol`.
pub fn quantile_bisect(p: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (-4.0_f64, 4.0_f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if phi_series(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn normal_density(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        left + right + diff / 15.0
    } else {
        adaptive(f, a, m, left, tol / 2.0, depth - 1)
            + adaptive(f, m, b, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adaptive(f, a, b, simpson(f, a, b), tol, 50)
}

/// Mass of N(mean, sd²) that rounds and clamps to `position` on a 20-car grid.
pub fn bin_by_quadrature(mean: f64, sd: f64, position: u8) -> f64 {
    let k = f64::from(position);
    let lo = if position == 1 {
        mean - 14.0 * sd
    } else {
        k - 0.5
    };
    let hi = if position == 20 {
        mean + 14.0 * sd
    } else {
        k + 0.5
    };
    if hi <= lo {
        return 0.0;
    }
    integrate(&|x| normal_density(x, mean, sd), lo, hi, 1e-13)
}

/// -3 / z with z found by bisection.
pub fn sigma_elite_oracle() -> f64 {
    -3.0 / quantile_bisect(1.0 / 8.0, 1e-14)
}

pub fn sigma_nonelite_oracle() -> f64 {
    -5.0 / quantile_bisect(1.0 / 12.0, 1e-14)
}
