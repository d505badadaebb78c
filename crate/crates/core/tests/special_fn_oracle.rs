mod common;

use common::{phi_series, quantile_bisect};
use f1bench::{std_normal_cdf, std_normal_quantile, Probability};

fn cdf(z: f64) -> f64 {
    std_normal_cdf(z).unwrap().value()
}

fn quantile(p: f64) -> f64 {
    std_normal_quantile(Probability::new(p).unwrap()).unwrap()
}

#[test]
fn oracle_freezes_calibration_quantiles() {
    let q8 = quantile_bisect(1.0 / 8.0, 1e-13);
    let q12 = quantile_bisect(1.0 / 12.0, 1e-13);
    assert!((q8 + 1.150349).abs() < 1e-6, "{q8}");
    assert!((q12 + 1.382994).abs() < 1e-6, "{q12}");
    assert!((quantile(1.0 / 8.0) - q8).abs() < 1e-11);
    assert!((quantile(1.0 / 12.0) - q12).abs() < 1e-11);
    // σ_N = 5 / 1.382994
    assert!((5.0 / -q12 - 3.615344).abs() < 1e-6);
}

#[test]
fn cdf_matches_series() {
    for i in -400..=400 {
        let z = f64::from(i) * 0.01;
        let want = phi_series(z);
        assert!(
            (cdf(z) - want).abs() <= 1e-12,
            "z={z}: {} vs {want}",
            cdf(z)
        );
    }
    assert!((cdf(-1.150349) - 0.125).abs() < 1e-6);
}

#[test]
fn round_trip_grid() {
    for i in 1..1000 {
        let p = f64::from(i) / 1000.0;
        let back = cdf(quantile(p));
        assert!((back - p).abs() <= 1e-9, "p={p} back={back}");
    }
}

#[test]
fn antisymmetry_grid() {
    for i in 1..1000 {
        let p = f64::from(i) / 1000.0;
        assert!((quantile(1.0 - p) + quantile(p)).abs() <= 1e-9, "p={p}");
    }
}

#[test]
fn symmetry_and_monotonicity_grid() {
    let mut prev = 0.0;
    for i in -8000..=8000 {
        let z = f64::from(i) * 1e-3;
        let v = cdf(z);
        assert!((v + cdf(-z) - 1.0).abs() <= 1e-12, "z={z}");
        // Above z ≈ 5 the gaps between grid values drop below one ulp of 1.
        if i > -8000 && z <= 5.0 {
            assert!(v > prev, "not increasing at {z}");
        } else {
            assert!(v >= prev, "decreasing at {z}");
        }
        prev = v;
    }
}
