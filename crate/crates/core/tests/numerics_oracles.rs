// SPDX-License-Identifier: Apache-2.0

mod common;

use cpval_core::numerics::{
    draw_normal, std_normal_cdf, std_normal_quantile, std_normal_sf, student_t_cdf, student_t_sf,
    RngStream,
};

#[test]
fn phi_matches_series_and_continued_fraction() {
    let mut x = -8.0;
    while x <= 8.0 {
        let want = common::phi(x);
        let got = std_normal_cdf(x);
        assert!((got - want).abs() < 1e-12, "x={x}: {got} vs {want}");
        if x < -3.0 {
            assert!(((got - want) / want).abs() < 1e-12, "relative, x={x}");
        }
        x += 0.01;
    }
}

#[test]
fn phi_frozen_values() {
    // scipy.stats.norm.cdf
    let table = [
        (-8.0, 6.22096057427174e-16),
        (-5.0, 2.866515718791933e-07),
        (-3.5, 0.00023262907903552502),
        (-1.0, 0.15865525393145707),
        (0.3, 0.6179114221889526),
        (2.5, 0.9937903346742238),
        (6.0, 0.9999999990134123),
    ];
    for (x, want) in table {
        let got = std_normal_cdf(x);
        assert!(
            ((got - want) / want).abs() < 1e-13,
            "x={x}: {got} vs {want}"
        );
    }
    assert!((std_normal_sf(8.0) - 6.22096057427174e-16).abs() < 1e-28);
}

#[test]
fn quantile_frozen_values() {
    // scipy.stats.norm.ppf
    let table = [
        (1e-300, -37.0470962993612),
        (1e-10, -6.361340902404056),
        (0.025, -1.9599639845400545),
        (0.3, -0.5244005127080409),
        (0.975, 1.959963984540054),
    ];
    for (p, want) in table {
        let got = std_normal_quantile(p).unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "p={p}: {got} vs {want}"
        );
    }
}

#[test]
fn quantile_inverts_phi() {
    // Exact inversion is possible only while Φ(x) still resolves x; past
    // x ≈ 5.4 the spacing of doubles near 1 dominates, so the positive side
    // is checked at the precision Φ(x) can carry.
    let mut x = -6.0;
    while x <= 6.0 {
        let back = std_normal_quantile(std_normal_cdf(x)).unwrap();
        let tol = if x <= 0.0 {
            1e-9
        } else {
            1e-9_f64.max(f64::EPSILON / common::phi(-x) * 2.0)
        };
        assert!((back - x).abs() < tol, "x={x}: {back}");
        x += 0.005;
    }
    let mut p = 1e-12;
    while p < 1.0 {
        let q = std_normal_quantile(p).unwrap();
        assert!(((common::phi(q) - p) / p).abs() < 1e-11, "p={p}");
        p *= 1.7;
    }
}

#[test]
fn student_t_matches_quadrature() {
    for df in [1u32, 2, 3, 5, 10, 30, 100] {
        let mut t = -10.0;
        while t <= 10.0 {
            let want = common::t_cdf(t, df);
            let got = student_t_cdf(t, df).unwrap();
            assert!((got - want).abs() < 1e-10, "df={df} t={t}: {got} vs {want}");
            t += 0.25;
        }
    }
}

#[test]
fn student_t_frozen_values() {
    // scipy.stats.t.cdf
    let table = [
        (0.5, 1, 0.6475836176504333),
        (-2.0, 3, 0.06966298427942155),
        (1.7, 10, 0.9400153270454898),
        (-4.0, 30, 0.0001909228180418782),
        (2.0, 100, 0.9758939106344332),
    ];
    for (t, df, want) in table {
        let got = student_t_cdf(t, df).unwrap();
        assert!(((got - want) / want).abs() < 1e-12, "t={t} df={df}: {got}");
    }
    assert_eq!(
        student_t_sf(-1.3, 7).unwrap(),
        student_t_cdf(1.3, 7).unwrap()
    );
}

#[test]
fn student_t_large_df_approaches_phi() {
    let mut t = -5.0;
    while t <= 5.0 {
        let diff = (student_t_cdf(t, 1_000_000).unwrap() - std_normal_cdf(t)).abs();
        assert!(diff < 1e-6, "t={t}: {diff}");
        t += 0.1;
    }
}

#[test]
fn normal_draws_have_unit_moments() {
    let n = 1_000_000;
    let v = draw_normal(&RngStream::new(2024), 0.0, 1.0, n).unwrap();
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    // Five standard errors.
    assert!(mean.abs() < 5.0 / (n as f64).sqrt(), "mean {mean}");
    assert!(
        (var - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt(),
        "var {var}"
    );
    let u: Vec<f64> = v.iter().take(100_000).map(|&x| common::phi(x)).collect();
    assert!(common::ks_uniform(&u) < common::ks_critical_1pct(u.len()));
}

#[test]
fn streams_are_reproducible_and_distinct() {
    let base = RngStream::new(5);
    let a = draw_normal(&base.at(3, 1), 0.0, 1.0, 8).unwrap();
    assert_eq!(
        a,
        draw_normal(&RngStream::new(5).at(3, 1), 0.0, 1.0, 8).unwrap()
    );
    assert_ne!(a, draw_normal(&base.at(3, 0), 0.0, 1.0, 8).unwrap());
    assert_ne!(a, draw_normal(&base.at(4, 1), 0.0, 1.0, 8).unwrap());
}
