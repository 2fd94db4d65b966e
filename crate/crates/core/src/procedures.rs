// SPDX-License-Identifier: Apache-2.0

//! FDR-controlling procedures: Benjamini–Hochberg and the Storey q-value
//! procedure with a fixed-λ estimate of the null proportion.

use crate::error::{Error, Result};
use crate::numerics::Probability;
use crate::pvalues::PValueSet;

/// Tuning value for the null-proportion estimate when none is given.
pub const DEFAULT_QVALUE_LAMBDA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Procedure {
    Bh,
    QValue,
}

impl Procedure {
    pub const ALL: [Procedure; 2] = [Procedure::Bh, Procedure::QValue];
}

impl std::fmt::Display for Procedure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Procedure::Bh => "BH",
            Procedure::QValue => "Q",
        })
    }
}

impl std::str::FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bh" => Ok(Procedure::Bh),
            "q" | "qvalue" | "q-value" => Ok(Procedure::QValue),
            other => Err(Error::Config(format!("unknown procedure '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSet {
    pub reject: Vec<bool>,
    /// BH: α·J/M. Q-value: the largest rejected p-value (0 if none).
    pub threshold_used: f64,
    pub procedure: Procedure,
    pub alpha: f64,
    pub qvalues: Option<Vec<f64>>,
}

impl DecisionSet {
    pub fn count(&self) -> usize {
        self.reject.iter().filter(|&&r| r).count()
    }

    pub fn rejected(&self) -> Vec<usize> {
        (0..self.reject.len()).filter(|&m| self.reject[m]).collect()
    }
}

fn ascending_order(p: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_unstable_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    order
}

/// Benjamini–Hochberg: with J the largest rank such that p_(J) ≤ αJ/M,
/// reject every hypothesis with p ≤ αJ/M.
pub fn bh(p: &PValueSet, alpha: Probability) -> DecisionSet {
    let values = p.values();
    let m = values.len();
    let alpha = alpha.value();
    let cutoff = |rank: usize| alpha * rank as f64 / m as f64;
    let order = ascending_order(values);
    let j = (1..=m)
        .rev()
        .find(|&rank| values[order[rank - 1]] <= cutoff(rank))
        .unwrap_or(0);
    let threshold = cutoff(j);
    let reject = if j == 0 {
        vec![false; m]
    } else {
        values.iter().map(|&v| v <= threshold).collect()
    };
    DecisionSet {
        reject,
        threshold_used: threshold,
        procedure: Procedure::Bh,
        alpha,
        qvalues: None,
    }
}

fn check_lambda_s(lambda_s: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda_s) {
        return Err(Error::Domain(format!(
            "q-value lambda {lambda_s} outside [0, 1)"
        )));
    }
    Ok(())
}

/// π̂₀ = #{p > λ} / (M(1 − λ)), clamped to [1/M, 1].
pub fn storey_pi0(p: &PValueSet, lambda_s: f64) -> Result<Probability> {
    check_lambda_s(lambda_s)?;
    let m = p.len();
    if m == 0 {
        return Err(Error::EmptyIndex);
    }
    let above = p.values().iter().filter(|&&v| v > lambda_s).count();
    let raw = above as f64 / (m as f64 * (1.0 - lambda_s));
    Probability::new(raw.clamp(1.0 / m as f64, 1.0))
}

/// Estimated pFDR of the rule "reject p ≤ γ":
/// π̂₀·γ·M / (#{p ≤ γ} · (1 − (1 − γ)^M)).
fn pfdr_hat(pi0: f64, gamma: f64, at_or_below: usize, m: usize) -> f64 {
    let m_f = m as f64;
    let count = at_or_below.max(1) as f64;
    if gamma == 0.0 {
        // γ / (1 − (1 − γ)^M) → 1/M
        return pi0 / count;
    }
    let reject_any = -(m_f * (-gamma).ln_1p()).exp_m1();
    pi0 * gamma * m_f / (count * reject_any)
}

/// q-values q̂_m = inf_{γ ≥ p_m} pFDR̂(γ), capped at 1.
pub fn qvalues(p: &PValueSet, lambda_s: f64) -> Result<Vec<f64>> {
    let pi0 = storey_pi0(p, lambda_s)?.value();
    let values = p.values();
    let m = values.len();
    let order = ascending_order(values);
    let mut q = vec![0.0; m];
    let mut running = 1.0_f64;
    let mut i = m;
    while i > 0 {
        // [start, i) is one block of tied p-values in sorted order.
        let gamma = values[order[i - 1]];
        let mut start = i - 1;
        while start > 0 && values[order[start - 1]] == gamma {
            start -= 1;
        }
        running = running.min(pfdr_hat(pi0, gamma, i, m));
        for &idx in &order[start..i] {
            q[idx] = running;
        }
        i = start;
    }
    Ok(q)
}

/// Rejects every hypothesis with q̂ ≤ α.
pub fn qvalue_procedure(p: &PValueSet, alpha: Probability, lambda_s: f64) -> Result<DecisionSet> {
    let q = qvalues(p, lambda_s)?;
    let alpha = alpha.value();
    let reject: Vec<bool> = q.iter().map(|&v| v <= alpha).collect();
    let threshold_used = p
        .values()
        .iter()
        .zip(&reject)
        .filter(|(_, &r)| r)
        .map(|(&v, _)| v)
        .fold(0.0, f64::max);
    Ok(DecisionSet {
        reject,
        threshold_used,
        procedure: Procedure::QValue,
        alpha,
        qvalues: Some(q),
    })
}

/// Runs `procedure` at level `alpha`.
pub fn apply(
    procedure: Procedure,
    p: &PValueSet,
    alpha: Probability,
    lambda_s: f64,
) -> Result<DecisionSet> {
    match procedure {
        Procedure::Bh => Ok(bh(p, alpha)),
        Procedure::QValue => qvalue_procedure(p, alpha, lambda_s),
    }
}
