// SPDX-License-Identifier: Apache-2.0

//! Reference implementations that share no code with the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// erf(z) from its Maclaurin series. Accurate to ~1e-14 for |z| <= 2.2.
fn erf_series(z: f64) -> f64 {
    let mut term = z;
    let mut sum = z;
    let z2 = z * z;
    for n in 1..200 {
        term *= -z2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    2.0 / PI.sqrt() * sum
}

/// Upper normal tail for x > 0 from the Laplace continued fraction
/// Q(x) = φ(x) / (x + 1/(x + 2/(x + 3/(x + …)))), evaluated backwards.
fn upper_tail_cf(x: f64) -> f64 {
    let mut frac = x;
    for k in (1..=2000).rev() {
        frac = x + k as f64 / frac;
    }
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt() / frac
}

/// Reference Φ(x).
pub fn phi(x: f64) -> f64 {
    if x.abs() <= 3.0 {
        0.5 * (1.0 + erf_series(x / 2f64.sqrt()))
    } else if x < 0.0 {
        upper_tail_cf(-x)
    } else {
        1.0 - upper_tail_cf(x)
    }
}

/// Γ((ν+1)/2) / Γ(ν/2) by the recurrence c(ν+2) = c(ν)(ν+1)/ν.
fn t_norm_ratio(df: u32) -> f64 {
    let (mut c, mut nu) = if df % 2 == 1 {
        (1.0 / PI.sqrt(), 1)
    } else {
        (PI.sqrt() / 2.0, 2)
    };
    while nu < df {
        c *= (nu + 1) as f64 / nu as f64;
        nu += 2;
    }
    c
}

/// Reference Student-t CDF by composite Simpson quadrature of the density on [0, |t|].
pub fn t_cdf(t: f64, df: u32) -> f64 {
    let nu = f64::from(df);
    let k = t_norm_ratio(df) / (nu * PI).sqrt();
    let f = |x: f64| k * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0);
    let n = 20_000;
    let a = t.abs();
    let h = a / n as f64;
    let mut s = f(0.0) + f(a);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half = s * h / 3.0;
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// One-sample Kolmogorov–Smirnov statistic against U(0, 1).
pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}
