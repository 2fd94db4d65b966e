// SPDX-License-Identifier: Apache-2.0

//! Closed-form power of the two-sided simple test and the Oracle test, and
//! the λ² boundary below which the Oracle test is the more powerful one.

use crate::error::{Error, Result};
use crate::numerics::{std_normal_cdf, std_normal_quantile, std_normal_sf, Probability};

/// Bisection tolerance on λ² used by [`region_boundary`].
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    Simple,
    Oracle,
}

/// One (μ, λ², η) evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerQuery {
    pub mu: f64,
    pub lambda2: f64,
    pub eta: f64,
}

impl PowerQuery {
    pub fn new(mu: f64, lambda2: f64, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        check_lambda2(lambda2)?;
        Ok(PowerQuery { mu, lambda2, eta })
    }

    pub fn power(&self, kind: PowerKind) -> f64 {
        match kind {
            PowerKind::Simple => simple_power(self.mu, self.eta),
            PowerKind::Oracle => oracle_power(self.mu, self.lambda2, self.eta),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("size {eta} outside (0, 1)")));
    }
    Ok(())
}

fn check_lambda2(lambda2: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda2) {
        return Err(Error::Domain(format!("lambda2 = {lambda2} outside [0, 1)")));
    }
    Ok(())
}

fn quantile(p: f64) -> f64 {
    std_normal_quantile(p).expect("argument checked to lie in [0, 1]")
}

fn simple_power(mu: f64, eta: f64) -> f64 {
    let lower = quantile(eta / 2.0);
    let upper = -lower;
    std_normal_cdf(lower - mu) + std_normal_sf(upper - mu)
}

fn oracle_power(mu: f64, lambda2: f64, eta: f64) -> f64 {
    let h = if mu <= 0.0 { 1.0 } else { 0.0 };
    let lower = quantile(eta * h);
    let upper = -quantile(eta * (1.0 - h));
    let shift = (1.0 - lambda2).sqrt() * mu;
    std_normal_cdf(lower - shift) + std_normal_sf(upper - shift)
}

/// Power Φ(l − μ) + 1 − Φ(u − μ) of the two-sided test with l = Φ⁻¹(η/2), u = −l.
pub fn power_simple(mu: f64, eta: Probability) -> Result<f64> {
    check_eta(eta.value())?;
    Ok(simple_power(mu, eta.value()))
}

/// Power of the Oracle test, whose full size goes to the tail picked by
/// I(μ ≤ 0), with effect size √(1 − λ²)·μ.
pub fn power_oracle(mu: f64, lambda2: f64, eta: Probability) -> Result<f64> {
    check_eta(eta.value())?;
    check_lambda2(lambda2)?;
    Ok(oracle_power(mu, lambda2, eta.value()))
}

/// Mean per-hypothesis power over `alt_index`.
pub fn average_power(
    mu: &[f64],
    lambda2: f64,
    eta: Probability,
    alt_index: &[usize],
    kind: PowerKind,
) -> Result<f64> {
    if alt_index.is_empty() {
        return Err(Error::EmptyIndex);
    }
    let mut total = 0.0;
    for &m in alt_index {
        let &mu_m = mu.get(m).ok_or_else(|| {
            Error::DimensionMismatch(format!("index {m} beyond {} means", mu.len()))
        })?;
        total += PowerQuery::new(mu_m, lambda2, eta.value())?.power(kind);
    }
    Ok(total / alt_index.len() as f64)
}

/// Type II error of the simple test minus that of the Oracle test.
/// Positive exactly where the Oracle test is more powerful. Both are
/// computed as tail probabilities, so the sign survives for large |μ|.
fn miss_gap(abs_mu: f64, lambda2: f64, eta: f64) -> f64 {
    let l_simple = quantile(eta / 2.0);
    let miss_simple = std_normal_sf(l_simple + abs_mu) - std_normal_sf(-l_simple + abs_mu);
    let miss_oracle = std_normal_sf(quantile(eta) + (1.0 - lambda2).sqrt() * abs_mu);
    miss_simple - miss_oracle
}

/// For each μ, the λ² where the Oracle test stops beating the simple test.
///
/// Oracle power is strictly decreasing in λ², so the set of λ² where it
/// dominates is an interval [0, λ²*). Returns 0 when the Oracle test never
/// dominates (including when both powers saturate in floating point).
pub fn region_boundary(mu_grid: &[f64], eta: Probability) -> Result<Vec<f64>> {
    let eta = eta.value();
    check_eta(eta)?;
    mu_grid
        .iter()
        .map(|&mu| {
            if mu == 0.0 || !mu.is_finite() {
                return Err(Error::Domain(format!("boundary undefined at mu = {mu}")));
            }
            let abs_mu = mu.abs();
            if miss_gap(abs_mu, 0.0, eta) <= 0.0 {
                return Ok(0.0);
            }
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            while hi - lo > BOUNDARY_TOL {
                let mid = 0.5 * (lo + hi);
                if miss_gap(abs_mu, mid, eta) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn size_at_null() {
        for e in [0.05, 0.01, 1e-5] {
            assert!((power_simple(0.0, eta(e)).unwrap() - e).abs() < 1e-15);
            for l2 in [0.0, 0.3, 0.9] {
                assert!((power_oracle(0.0, l2, eta(e)).unwrap() - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn worked_example() {
        // Φ(−1.96 + 1) + 1 − Φ(1.96 + 1)
        let s = power_simple(-1.0, eta(0.05)).unwrap();
        assert!((s - 0.170_075_045_753_087_5).abs() < 1e-12);
        assert_eq!(s, power_simple(1.0, eta(0.05)).unwrap());
        // Φ(−1.645 + 1)
        let o = power_oracle(-1.0, 0.0, eta(0.05)).unwrap();
        assert!((o - 0.259_511_022_841_444).abs() < 1e-12);
        let o4 = power_oracle(-1.0, 0.4, eta(0.05)).unwrap();
        assert!((o4 - 0.192_079_997_688_748).abs() < 1e-12);
        assert!(o4 < o);
    }

    #[test]
    fn average_power_cases() {
        let e = eta(0.05);
        let single = average_power(&[0.0, -1.0], 0.0, e, &[1], PowerKind::Oracle).unwrap();
        assert_eq!(single, power_oracle(-1.0, 0.0, e).unwrap());
        let pair = average_power(&[-1.0, 1.0], 0.0, e, &[0, 1], PowerKind::Oracle).unwrap();
        assert!((pair - 0.259_511_022_841_444).abs() < 1e-12);
        let same = average_power(&[2.0; 3], 0.0, e, &[0, 1, 2], PowerKind::Simple).unwrap();
        assert!((same - power_simple(2.0, e).unwrap()).abs() < 1e-15);
        assert!(matches!(
            average_power(&[1.0], 0.0, e, &[], PowerKind::Simple),
            Err(Error::EmptyIndex)
        ));
    }

    #[test]
    fn boundary_worked_example() {
        // Root of Φ(Φ⁻¹(.05) + √(1 − λ²)) = β_simple(−1, .05)
        let b = region_boundary(&[-1.0, 1.0], eta(0.05)).unwrap();
        assert!((b[0] - 0.522_539_878_153_749_5).abs() < 2e-6);
        assert_eq!(b[0], b[1]);
        assert!(region_boundary(&[0.0], eta(0.05)).is_err());
    }

    #[test]
    fn boundary_grows_toward_zero_mean() {
        let b = region_boundary(&[-3.0, -2.0, -1.0, -0.5], eta(0.01)).unwrap();
        assert!(b.windows(2).all(|w| w[0] < w[1]), "{b:?}");
        assert!(b.iter().all(|&v| v > 0.0));
    }
}
