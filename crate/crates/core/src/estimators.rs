// SPDX-License-Identifier: Apache-2.0

//! Method-of-moments empirical-Bayes estimates from the training
//! statistics, and the shrinkage weights h_m that estimate I(μ_m ≤ 0).
//!
//! Under the working model, a false null has μ_m ~ N(θ, τ²) and occurs
//! with probability p, and Y_m | μ_m ~ N(λ²μ_m, λ²). The weight is the
//! posterior probability P(μ_m ≤ 0 | Y_m = y_m, μ_m ≠ 0) with θ, τ² (and
//! optionally p) replaced by moment estimates.

use crate::error::{Error, Result};
use crate::numerics::{std_normal_cdf, std_normal_sf, Probability};

/// Lower clamp applied to p-hat before it is used in θ-hat and τ-hat².
pub const P_FLOOR: f64 = 1e-6;

/// How the proportion of false nulls `p` enters the estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorMode {
    /// Estimate p from the fraction of |y_m| ≤ ε.
    Estimated { epsilon: f64 },
    /// Use a fixed p in (0, 1]. `Fixed(1.0)` is the approximate minimax choice.
    Fixed(f64),
}

impl PriorMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorMode::Estimated { epsilon } if !(epsilon > 0.0 && epsilon.is_finite()) => Err(
                Error::Domain(format!("epsilon must be positive, got {epsilon}")),
            ),
            PriorMode::Fixed(p) if !(p > 0.0 && p <= 1.0) => Err(Error::Domain(format!(
                "fixed p must lie in (0, 1], got {p}"
            ))),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for PriorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PriorMode::Estimated { epsilon } => write!(f, "eps={epsilon}"),
            PriorMode::Fixed(p) => write!(f, "p={p}"),
        }
    }
}

/// Raw and clamped moment estimates of p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PEstimate {
    /// The formula value; may be negative.
    pub raw: f64,
    /// `raw` clamped to `[P_FLOOR, 1]`.
    pub clamped: Probability,
}

/// p-hat(y; ε) = 1 − (1/M)·#{|y_m| ≤ ε} / (Φ(ε/λ) − Φ(−ε/λ)).
pub fn estimate_p(y: &[f64], epsilon: f64, lambda: f64) -> Result<PEstimate> {
    if !(epsilon > 0.0) || !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "estimate_p needs epsilon > 0 and lambda > 0, got {epsilon}, {lambda}"
        )));
    }
    if y.is_empty() {
        return Err(Error::EmptyIndex);
    }
    let inside = y.iter().filter(|v| v.abs() <= epsilon).count();
    let band = 1.0 - 2.0 * std_normal_sf(epsilon / lambda);
    let raw = 1.0 - (inside as f64 / y.len() as f64) / band;
    Ok(PEstimate {
        raw,
        clamped: Probability::new(raw.clamp(P_FLOOR, 1.0))?,
    })
}

fn mean_and_variance(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let ss = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Moment estimates θ-hat = ȳ/(λ²p) and
/// τ-hat² = max{(s² − λ² − ȳ²(1−p)/p) / (pλ⁴), 0}, s² the unbiased sample variance.
pub fn estimate_theta_tau(y: &[f64], p_hat: f64, lambda2: f64) -> Result<(f64, f64)> {
    if !(p_hat > 0.0 && p_hat <= 1.0) {
        return Err(Error::Degenerate(format!(
            "p-hat = {p_hat} must lie in (0, 1]"
        )));
    }
    if !(lambda2 > 0.0) {
        return Err(Error::Domain(format!(
            "lambda2 = {lambda2} must be positive"
        )));
    }
    if y.len() < 2 {
        return Err(Error::Degenerate(
            "sample variance needs at least 2 values".into(),
        ));
    }
    let (ybar, s2) = mean_and_variance(y);
    let theta = ybar / (lambda2 * p_hat);
    let excess = s2 - lambda2 - ybar * ybar * (1.0 - p_hat) / p_hat;
    let tau2 = (excess / (p_hat * lambda2 * lambda2)).max(0.0);
    Ok((theta, tau2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorEstimate {
    pub p_hat: Probability,
    /// Unclamped p-hat; `None` for fixed-p modes.
    pub p_raw: Option<f64>,
    pub theta_hat: f64,
    pub tau2_hat: f64,
    pub mode: PriorMode,
    pub lambda2: f64,
}

/// Runs the full moment fit for one prior mode.
pub fn fit_prior(y: &[f64], lambda2: f64, mode: PriorMode) -> Result<PriorEstimate> {
    mode.validate()?;
    if !(lambda2 > 0.0 && lambda2 <= 1.0) {
        return Err(Error::Domain(format!("lambda2 = {lambda2} outside (0, 1]")));
    }
    let (p_hat, p_raw) = match mode {
        PriorMode::Estimated { epsilon } => {
            let est = estimate_p(y, epsilon, lambda2.sqrt())?;
            (est.clamped, Some(est.raw))
        }
        PriorMode::Fixed(p) => (Probability::new(p)?, None),
    };
    let (theta_hat, tau2_hat) = estimate_theta_tau(y, p_hat.value(), lambda2)?;
    Ok(PriorEstimate {
        p_hat,
        p_raw,
        theta_hat,
        tau2_hat,
        mode,
        lambda2,
    })
}

/// Per-hypothesis weights in `[0, 1]` splitting the test size between the
/// lower tail (weight h) and the upper tail (weight 1 − h).
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageWeights(Vec<f64>);

impl ShrinkageWeights {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if let Some(k) = h.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain(format!(
                "weight {} at index {k} outside [0, 1]",
                h[k]
            )));
        }
        Ok(ShrinkageWeights(h))
    }

    /// Equal tail split, which reproduces the two-sided test.
    pub fn symmetric(m: usize) -> Self {
        ShrinkageWeights(vec![0.5; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// h_m(y) = Φ(−(y_m τ² + θ) / √(τ²(λ²τ² + 1))).
///
/// At τ-hat² = 0 the weight takes its limit as τ² ↓ 0: I(θ < 0), or ½ when θ = 0.
pub fn shrinkage_weights(y: &[f64], prior: &PriorEstimate) -> ShrinkageWeights {
    let tau2 = prior.tau2_hat;
    let theta = prior.theta_hat;
    if tau2 > 0.0 {
        let scale = (tau2 * (prior.lambda2 * tau2 + 1.0)).sqrt();
        ShrinkageWeights(
            y.iter()
                .map(|&ym| std_normal_cdf(-(ym * tau2 + theta) / scale))
                .collect(),
        )
    } else {
        let h = if theta < 0.0 {
            1.0
        } else if theta > 0.0 {
            0.0
        } else {
            0.5
        };
        ShrinkageWeights(vec![h; y.len()])
    }
}

/// The Oracle weights I(μ_m ≤ 0).
pub fn oracle_weights(mu: &[f64]) -> ShrinkageWeights {
    ShrinkageWeights(
        mu.iter()
            .map(|&m| if m <= 0.0 { 1.0 } else { 0.0 })
            .collect(),
    )
}
