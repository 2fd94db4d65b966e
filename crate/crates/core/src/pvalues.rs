// SPDX-License-Identifier: Apache-2.0

//! Simple, Oracle and compound p-values for the normal location problem,
//! and the two-sample T statistics used on real expression data.
//!
//! A compound p-value for hypothesis m splits its size between the lower
//! tail (mass η·h_m) and the upper tail (mass η·(1 − h_m)):
//!
//! ```text
//! P_m = min{ Φ(z'_m) / h_m, (1 − Φ(z'_m)) / (1 − h_m) },   a/0 = ∞
//! ```
//!
//! where z'_m is the test statistic on the standard normal scale. The
//! weights only depend on the training data, so P_m stays uniform under
//! its null. Values above 1 are reported as 1.

use crate::datamodel::{DataMatrix, GroupLabels};
use crate::error::{Error, Result};
use crate::estimators::{oracle_weights, PriorMode, ShrinkageWeights};
use crate::numerics::{
    extended_ratio, std_normal_cdf, std_normal_quantile, std_normal_sf, student_t_cdf, student_t_sf,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PValueKind {
    Simple,
    Oracle,
    Compound,
}

impl std::fmt::Display for PValueKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PValueKind::Simple => "simple",
            PValueKind::Oracle => "oracle",
            PValueKind::Compound => "compound",
        })
    }
}

/// How the test statistic was brought to the standard normal scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatScale {
    /// Test-data sum Z with variance 1 − λ²; z' = Z / √(1 − λ²).
    SplitFraction { lambda2: f64 },
    /// Already N(0, 1) under the null (e.g. probability-transformed T).
    Standardized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValueMeta {
    pub scale: Option<StatScale>,
    /// Prior mode that produced the weights (compound only).
    pub prior: Option<PriorMode>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PValueSet {
    values: Vec<f64>,
    kind: PValueKind,
    meta: PValueMeta,
}

impl PValueSet {
    pub fn new(values: Vec<f64>, kind: PValueKind, meta: PValueMeta) -> Result<Self> {
        if let Some(k) = values.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain(format!(
                "p-value {} at index {k} outside [0, 1]",
                values[k]
            )));
        }
        Ok(PValueSet { values, kind, meta })
    }

    /// Unlabelled p-values, e.g. from an external source.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(
            values,
            PValueKind::Simple,
            PValueMeta {
                scale: None,
                prior: None,
            },
        )
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> PValueKind {
        self.kind
    }

    pub fn meta(&self) -> &PValueMeta {
        &self.meta
    }

    pub fn with_prior(mut self, prior: PriorMode) -> Self {
        self.meta.prior = Some(prior);
        self
    }

    /// Overwrites the flagged positions with 1.
    pub fn force_one(mut self, flags: &[bool]) -> Self {
        for (p, &flag) in self.values.iter_mut().zip(flags) {
            if flag {
                *p = 1.0;
            }
        }
        self
    }
}

/// Standard-normal-scale statistics, with the T degrees of freedom when
/// they come from [`t_to_z`].
#[derive(Debug, Clone, PartialEq)]
pub struct TestStatistics {
    pub z: Vec<f64>,
    pub df_used: Option<u32>,
}

fn check_lambda2(lambda2: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda2) {
        return Err(Error::Domain(format!("lambda2 = {lambda2} outside [0, 1)")));
    }
    Ok(())
}

fn tail_ratio(mass: f64, weight: f64) -> f64 {
    // A zero-weight tail never rejects, including the 0/0 case where Φ
    // underflows.
    extended_ratio(mass, weight).unwrap_or(f64::INFINITY)
}

#[inline]
fn weighted_p(z: f64, h: f64) -> f64 {
    let lower = tail_ratio(std_normal_cdf(z), h);
    let upper = tail_ratio(std_normal_sf(z), 1.0 - h);
    lower.min(upper).min(1.0)
}

/// Two-sided p-values 2[1 − Φ(|w_m|)] from full-data statistics.
pub fn simple_p(w: &[f64]) -> PValueSet {
    let values = w
        .iter()
        .map(|&x| (2.0 * std_normal_sf(x.abs())).min(1.0))
        .collect();
    PValueSet {
        values,
        kind: PValueKind::Simple,
        meta: PValueMeta {
            scale: Some(StatScale::Standardized),
            prior: None,
        },
    }
}

/// Compound p-values from standard-normal-scale statistics and weights.
pub fn compound_p_standardized(z: &[f64], weights: &ShrinkageWeights) -> Result<PValueSet> {
    if z.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} statistics but {} weights",
            z.len(),
            weights.len()
        )));
    }
    let values = z
        .iter()
        .zip(weights.as_slice())
        .map(|(&zm, &h)| weighted_p(zm, h))
        .collect();
    Ok(PValueSet {
        values,
        kind: PValueKind::Compound,
        meta: PValueMeta {
            scale: Some(StatScale::Standardized),
            prior: None,
        },
    })
}

/// Compound p-values from test-data sums Z ~ N((1 − λ²)μ, 1 − λ²).
pub fn compound_p(z: &[f64], weights: &ShrinkageWeights, lambda2: f64) -> Result<PValueSet> {
    check_lambda2(lambda2)?;
    let scale = (1.0 - lambda2).sqrt();
    let standardized: Vec<f64> = z.iter().map(|v| v / scale).collect();
    let mut set = compound_p_standardized(&standardized, weights)?;
    set.meta.scale = Some(StatScale::SplitFraction { lambda2 });
    Ok(set)
}

/// Oracle p-values: compound p-values with weights I(μ_m ≤ 0).
pub fn oracle_p(z: &[f64], mu: &[f64], lambda2: f64) -> Result<PValueSet> {
    let mut set = compound_p(z, &oracle_weights(mu), lambda2)?;
    set.kind = PValueKind::Oracle;
    Ok(set)
}

/// The compound decision function in cutoff form:
/// reject iff z' ≤ Φ⁻¹(ηh) or z' ≥ Φ⁻¹(1 − η(1 − h)).
pub fn compound_decision(z_std: f64, h: f64, eta: f64) -> Result<bool> {
    let lower = std_normal_quantile(eta * h)?;
    // Φ⁻¹(1 − a) = −Φ⁻¹(a) without rounding 1 − a.
    let upper = -std_normal_quantile(eta * (1.0 - h))?;
    Ok(z_std <= lower || z_std >= upper)
}

/// Pooled-SD two-sample T statistics for every row.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleT {
    /// (mean₂ − mean₁) / (s_p √(1/n₁ + 1/n₂)); 0 on degenerate rows.
    pub t: Vec<f64>,
    pub df: u32,
    /// Rows whose pooled standard deviation is zero.
    pub degenerate: Vec<bool>,
}

fn mean_ss(row: &[f64], cols: &[usize]) -> (f64, f64) {
    let n = cols.len() as f64;
    let mean = cols.iter().map(|&c| row[c]).sum::<f64>() / n;
    let ss = cols.iter().map(|&c| (row[c] - mean).powi(2)).sum::<f64>();
    (mean, ss)
}

pub fn two_sample_t(matrix: &DataMatrix, cols1: &[usize], cols2: &[usize]) -> Result<TwoSampleT> {
    for (g, cols) in [(1, cols1), (2, cols2)] {
        if cols.len() < 2 {
            return Err(Error::InsufficientColumns {
                group: g,
                found: cols.len(),
                needed: 2,
            });
        }
        if let Some(&c) = cols.iter().find(|&&c| c >= matrix.cols()) {
            return Err(Error::DimensionMismatch(format!(
                "column {c} out of range for {} columns",
                matrix.cols()
            )));
        }
    }
    let (n1, n2) = (cols1.len() as f64, cols2.len() as f64);
    let dof = cols1.len() + cols2.len() - 2;
    let scale = (1.0 / n1 + 1.0 / n2).sqrt();
    let mut t = Vec::with_capacity(matrix.rows());
    let mut degenerate = Vec::with_capacity(matrix.rows());
    for m in 0..matrix.rows() {
        let row = matrix.row(m);
        let (mean1, ss1) = mean_ss(row, cols1);
        let (mean2, ss2) = mean_ss(row, cols2);
        let sp = ((ss1 + ss2) / dof as f64).sqrt();
        if sp > 0.0 {
            t.push((mean2 - mean1) / (sp * scale));
            degenerate.push(false);
        } else {
            t.push(0.0);
            degenerate.push(true);
        }
    }
    Ok(TwoSampleT {
        t,
        df: u32::try_from(dof).map_err(|_| Error::Domain("too many columns".into()))?,
        degenerate,
    })
}

/// Probability-integral transform z = Φ⁻¹(T_df(t)).
///
/// The tail on the side of `t` is transformed directly, floored at the
/// smallest normal double so every finite `t` maps to a finite `z`.
pub fn t_to_z(t: &[f64], df: u32) -> Result<TestStatistics> {
    let z = t
        .iter()
        .map(|&tm| {
            let tail = student_t_cdf(-tm.abs(), df)?.max(f64::MIN_POSITIVE);
            let q = std_normal_quantile(tail)?;
            Ok(if tm > 0.0 { -q } else { q })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TestStatistics {
        z,
        df_used: Some(df),
    })
}

/// Two-sided T p-values 2[1 − T_{N−2}(|t_m|)] on all columns.
/// Rows with zero pooled SD get p = 1.
pub fn simple_t_p(matrix: &DataMatrix, groups: &GroupLabels) -> Result<PValueSet> {
    if groups.len() != matrix.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} group labels for {} columns",
            groups.len(),
            matrix.cols()
        )));
    }
    let stats = two_sample_t(matrix, &groups.columns(1), &groups.columns(2))?;
    let values = stats
        .t
        .iter()
        .map(|&t| Ok((2.0 * student_t_sf(t.abs(), stats.df)?).min(1.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PValueSet {
        values,
        kind: PValueKind::Simple,
        meta: PValueMeta {
            scale: None,
            prior: None,
        },
    }
    .force_one(&stats.degenerate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_p_fixed_points() {
        let p = simple_p(&[0.0, 1.959964, 60.0, -1.959964]);
        assert_eq!(p.values()[0], 1.0);
        assert!((p.values()[1] - 0.05).abs() < 1e-5);
        assert_eq!(p.values()[2], 0.0);
        assert_eq!(p.values()[1], p.values()[3]);
        assert_eq!(p.kind(), PValueKind::Simple);
    }

    #[test]
    fn compound_p_hand_values() {
        let w = ShrinkageWeights::new(vec![0.0, 0.9]).unwrap();
        let p = compound_p_standardized(&[-1.5, -1.5], &w).unwrap();
        assert!((p.values()[0] - 0.933_192_798_731_141_9).abs() < 1e-12);
        assert!((p.values()[1] - 0.074_230_223_632_064_52).abs() < 1e-12);
    }

    #[test]
    fn compound_p_half_weights_is_two_sided() {
        let z = [-3.1, -0.2, 0.0, 0.7, 2.5];
        let p = compound_p_standardized(&z, &ShrinkageWeights::symmetric(5)).unwrap();
        assert_eq!(p.values(), simple_p(&z).values());
    }

    #[test]
    fn compound_p_scales_by_test_fraction() {
        let w = ShrinkageWeights::new(vec![1.0]).unwrap();
        let a = compound_p(&[-0.9], &w, 0.19).unwrap();
        let b = compound_p_standardized(&[-1.0], &w).unwrap();
        assert!((a.values()[0] - b.values()[0]).abs() < 1e-15);
        assert!(compound_p(&[0.0], &w, 1.0).is_err());
        assert!(compound_p(&[0.0, 1.0], &w, 0.1).is_err());
    }

    #[test]
    fn compound_p_extreme_statistic_with_zero_weight() {
        // Φ(−40) underflows; with h = 0 the lower tail is simply closed.
        let w = ShrinkageWeights::new(vec![0.0, 1.0]).unwrap();
        let p = compound_p_standardized(&[-40.0, 40.0], &w).unwrap();
        assert_eq!(p.values(), &[1.0, 1.0]);
    }

    #[test]
    fn oracle_p_examples() {
        let p = oracle_p(&[0.3], &[0.0], 0.0).unwrap();
        assert_eq!(p.values()[0], std_normal_cdf(0.3));
        let p = oracle_p(&[2.0], &[1.0], 0.0).unwrap();
        assert!((p.values()[0] - 0.022_750_131_948_179_195).abs() < 1e-14);
        let p = oracle_p(&[-1.645], &[-1.0], 0.0).unwrap();
        assert!((p.values()[0] - 0.05).abs() < 1e-4);
        assert_eq!(p.kind(), PValueKind::Oracle);
    }

    #[test]
    fn decision_matches_p_value() {
        assert!(compound_decision(-2.0, 1.0, 0.05).unwrap());
        assert!(!compound_decision(2.0, 1.0, 0.05).unwrap());
        assert!(compound_decision(2.0, 0.0, 0.05).unwrap());
        assert!(!compound_decision(0.0, 0.5, 0.05).unwrap());
    }

    #[test]
    fn two_sample_t_cases() {
        let x = DataMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0, 3.0, 4.0, 5.0],
            vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0],
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        ])
        .unwrap();
        let r = two_sample_t(&x, &[0, 1, 2], &[3, 4, 5]).unwrap();
        assert_eq!(r.df, 4);
        assert!((r.t[0] - 2.449_489_742_783_178).abs() < 1e-12);
        assert_eq!(r.t[1], 0.0);
        assert!(!r.degenerate[1]);
        assert!(r.degenerate[2]);
        assert!(matches!(
            two_sample_t(&x, &[0], &[3, 4]),
            Err(Error::InsufficientColumns { group: 1, .. })
        ));
    }

    #[test]
    fn t_to_z_values() {
        let s = t_to_z(&[0.0, 2.0, -2.0, 1e6], 100).unwrap();
        assert_eq!(s.z[0], 0.0);
        assert!((s.z[1] - 1.975_493_436_442_257).abs() < 1e-9);
        assert_eq!(s.z[1], -s.z[2]);
        assert!(s.z[3].is_finite() && s.z[3] > 30.0);
        assert!(t_to_z(&[1.0], 0).is_err());
    }

    #[test]
    fn simple_t_p_values() {
        let x = DataMatrix::from_rows(&[
            vec![1.0, 2.0, 3.0, 1.0, 2.0, 3.0],
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            vec![1.0, 2.0, 3.0, 3.0, 4.0, 5.0],
            vec![3.0, 4.0, 5.0, 1.0, 2.0, 3.0],
        ])
        .unwrap();
        let g = GroupLabels::contiguous(3, 3).unwrap();
        let p = simple_t_p(&x, &g).unwrap();
        assert_eq!(p.values()[0], 1.0);
        assert_eq!(p.values()[1], 1.0);
        assert_eq!(p.values()[2], p.values()[3]);
        assert!(simple_t_p(&x, &GroupLabels::contiguous(1, 5).unwrap()).is_err());
    }

    #[test]
    fn p_value_set_rejects_out_of_range() {
        assert!(PValueSet::from_values(vec![0.2, 1.2]).is_err());
        assert!(PValueSet::from_values(vec![f64::NAN]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn p_values_in_unit_interval(z in -60.0f64..60.0, h in 0.0f64..=1.0) {
                let w = ShrinkageWeights::new(vec![h]).unwrap();
                let p = compound_p_standardized(&[z], &w).unwrap().values()[0];
                prop_assert!((0.0..=1.0).contains(&p));
            }

            #[test]
            fn oracle_equals_compound_with_oracle_weights(
                z in proptest::collection::vec(-6.0f64..6.0, 1..20),
                lambda2 in 0.0f64..0.9,
            ) {
                let mu: Vec<f64> = z.iter().map(|v| (v * 7.0).sin()).collect();
                let a = oracle_p(&z, &mu, lambda2).unwrap();
                let b = compound_p(&z, &oracle_weights(&mu), lambda2).unwrap();
                prop_assert_eq!(a.values(), b.values());
            }

            #[test]
            fn t_to_z_is_monotone(a in -30.0f64..30.0, gap in 1e-6f64..5.0, df in 1u32..200) {
                let s = t_to_z(&[a, a + gap], df).unwrap();
                prop_assert!(s.z[0] < s.z[1]);
            }
        }
    }
}
