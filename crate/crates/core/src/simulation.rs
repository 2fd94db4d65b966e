// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo power study at the sufficient-statistic level.
//!
//! Replicate k draws two standard normal vectors e₁, e₂ from substreams
//! (k, 0) and (k, 1) and sets
//!
//! ```text
//! Y = λ²μ + λ·e₁          ~ N(λ²μ, λ²I)
//! Z = (1 − λ²)μ + √(1 − λ²)·e₂   ~ N((1 − λ²)μ, (1 − λ²)I)
//! W = Y + Z
//! ```
//!
//! Every p-value family in a replicate sees the same draws. Replicates run
//! in parallel and are reduced in replicate order, so a report depends on
//! the configuration and seed only.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{fit_prior, shrinkage_weights, PriorMode};
use crate::numerics::{draw_normal, std_normal_quantile, Probability, RngStream};
use crate::procedures::{apply, DecisionSet, Procedure, DEFAULT_QVALUE_LAMBDA};
use crate::pvalues::{compound_p, oracle_p, simple_p, PValueSet};

/// How the compound family obtains p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompoundMode {
    /// Estimated p with ε = multiple·λ.
    EpsilonMultiple(f64),
    FixedP(f64),
}

impl CompoundMode {
    pub fn prior_mode(&self, lambda2: f64) -> PriorMode {
        match *self {
            CompoundMode::EpsilonMultiple(k) => PriorMode::Estimated {
                epsilon: k * lambda2.sqrt(),
            },
            CompoundMode::FixedP(p) => PriorMode::Fixed(p),
        }
    }

    /// ε = λ, ε = 2λ and p ≡ 1.
    pub fn defaults() -> Vec<CompoundMode> {
        vec![
            CompoundMode::EpsilonMultiple(1.0),
            CompoundMode::EpsilonMultiple(2.0),
            CompoundMode::FixedP(1.0),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Simple,
    Oracle,
    Compound(CompoundMode),
}

impl Family {
    /// Short label; for estimated p it names the actual ε used.
    pub fn label(&self, lambda2: f64) -> String {
        match self {
            Family::Simple => "simple".into(),
            Family::Oracle => "oracle".into(),
            Family::Compound(mode) => format!("compound({})", mode.prior_mode(lambda2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub m: usize,
    pub m1: usize,
    pub theta: f64,
    pub tau: f64,
    pub lambda2: f64,
    pub compound_modes: Vec<CompoundMode>,
    pub alpha: Probability,
    pub replicates: usize,
    pub seed: u64,
    pub qvalue_lambda: f64,
}

impl SimConfig {
    /// A Table-1-sized cell: M = 5000, M₁ = 1000, α = 0.05, default compound modes.
    pub fn study_cell(theta: f64, tau: f64, lambda2: f64, replicates: usize, seed: u64) -> Self {
        SimConfig {
            m: 5000,
            m1: 1000,
            theta,
            tau,
            lambda2,
            compound_modes: CompoundMode::defaults(),
            alpha: Probability::new(0.05).expect("constant"),
            replicates,
            seed,
            qvalue_lambda: DEFAULT_QVALUE_LAMBDA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m1 < 1 || self.m1 > self.m {
            return Err(Error::Config(format!(
                "need 1 <= M1 <= M, got M1={}, M={}",
                self.m1, self.m
            )));
        }
        if self.m < 2 {
            return Err(Error::Config("need M >= 2".into()));
        }
        if self.replicates < 1 {
            return Err(Error::Config("need at least one replicate".into()));
        }
        if !(self.tau >= 0.0) || !self.theta.is_finite() || !self.tau.is_finite() {
            return Err(Error::Config(format!(
                "bad (theta, tau) = ({}, {})",
                self.theta, self.tau
            )));
        }
        if !(self.lambda2 > 0.0 && self.lambda2 < 1.0) {
            return Err(Error::Config(format!(
                "lambda2 = {} outside (0, 1)",
                self.lambda2
            )));
        }
        if !(0.0..1.0).contains(&self.qvalue_lambda) {
            return Err(Error::Config(format!(
                "q-value lambda {} outside [0, 1)",
                self.qvalue_lambda
            )));
        }
        for mode in &self.compound_modes {
            mode.prior_mode(self.lambda2).validate()?;
        }
        Ok(())
    }

    pub fn families(&self) -> Vec<Family> {
        let mut f = vec![Family::Simple, Family::Oracle];
        f.extend(self.compound_modes.iter().map(|&m| Family::Compound(m)));
        f
    }

    /// Means of all M hypotheses: the first M₁ from [`mu_grid`], the rest 0.
    pub fn means(&self) -> Vec<f64> {
        let mut mu = mu_grid(self.theta, self.tau, self.m1);
        mu.resize(self.m, 0.0);
        mu
    }
}

/// μ_m = θ + τ·Φ⁻¹(m / (M₁ + 1)), m = 1..M₁.
pub fn mu_grid(theta: f64, tau: f64, m1: usize) -> Vec<f64> {
    (1..=m1)
        .map(|m| {
            let q = std_normal_quantile(m as f64 / (m1 + 1) as f64).expect("interior probability");
            theta + tau * q
        })
        .collect()
}

/// Sample error and power of one decision set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMetrics {
    pub power: f64,
    pub fdr: f64,
    /// V/R, defined only when R > 0.
    pub pfdr: Option<f64>,
    pub discoveries: usize,
}

impl SampleMetrics {
    pub fn from_decisions(decisions: &DecisionSet, mu: &[f64], m1: usize) -> Self {
        let mut true_hits = 0usize;
        let mut false_hits = 0usize;
        let mut total = 0usize;
        for (m, &r) in decisions.reject.iter().enumerate() {
            if r {
                total += 1;
                if mu[m] == 0.0 {
                    false_hits += 1;
                }
                if m < m1 {
                    true_hits += 1;
                }
            }
        }
        let v = false_hits as f64;
        SampleMetrics {
            power: true_hits as f64 / m1 as f64,
            fdr: v / total.max(1) as f64,
            pfdr: (total > 0).then(|| v / total as f64),
            discoveries: total,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOutcome {
    pub family: Family,
    /// Raw p-hat for estimated-p compound families.
    pub p_raw: Option<f64>,
    pub decisions: Vec<DecisionSet>,
    pub metrics: Vec<(Procedure, SampleMetrics)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub families: Vec<FamilyOutcome>,
}

/// Draws (Y, Z) for replicate `k`.
pub fn replicate_data(config: &SimConfig, mu: &[f64], k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let base = RngStream::new(config.seed);
    let e1 = draw_normal(&base.at(k as u64, 0), 0.0, 1.0, config.m)?;
    let e2 = draw_normal(&base.at(k as u64, 1), 0.0, 1.0, config.m)?;
    let l2 = config.lambda2;
    let (sd_y, sd_z) = (l2.sqrt(), (1.0 - l2).sqrt());
    let y = mu
        .iter()
        .zip(&e1)
        .map(|(&u, &e)| l2 * u + sd_y * e)
        .collect();
    let z = mu
        .iter()
        .zip(&e2)
        .map(|(&u, &e)| (1.0 - l2) * u + sd_z * e)
        .collect();
    Ok((y, z))
}

/// p-values of every family for one replicate, with raw p-hat where estimated.
pub fn replicate_pvalues(
    config: &SimConfig,
    mu: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<Vec<(Family, PValueSet, Option<f64>)>> {
    let l2 = config.lambda2;
    config
        .families()
        .into_iter()
        .map(|family| {
            Ok(match family {
                Family::Simple => {
                    let w: Vec<f64> = y.iter().zip(z).map(|(a, b)| a + b).collect();
                    (family, simple_p(&w), None)
                }
                Family::Oracle => (family, oracle_p(z, mu, l2)?, None),
                Family::Compound(mode) => {
                    let prior_mode = mode.prior_mode(l2);
                    let prior = fit_prior(y, l2, prior_mode)?;
                    let weights = shrinkage_weights(y, &prior);
                    let p = compound_p(z, &weights, l2)?.with_prior(prior_mode);
                    (family, p, prior.p_raw)
                }
            })
        })
        .collect()
}

pub fn run_replicate(config: &SimConfig, k: usize) -> Result<ReplicateOutcome> {
    let mu = config.means();
    run_replicate_with_means(config, &mu, k)
}

fn run_replicate_with_means(config: &SimConfig, mu: &[f64], k: usize) -> Result<ReplicateOutcome> {
    let (y, z) = replicate_data(config, mu, k)?;
    let families = replicate_pvalues(config, mu, &y, &z)?
        .into_iter()
        .map(|(family, p, p_raw)| {
            let decisions = Procedure::ALL
                .iter()
                .map(|&proc| apply(proc, &p, config.alpha, config.qvalue_lambda))
                .collect::<Result<Vec<_>>>()?;
            let metrics = decisions
                .iter()
                .map(|d| (d.procedure, SampleMetrics::from_decisions(d, mu, config.m1)))
                .collect();
            Ok(FamilyOutcome {
                family,
                p_raw,
                decisions,
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicateOutcome {
        replicate: k,
        families,
    })
}

/// Replicate averages for one (family, procedure) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub family: Family,
    pub label: String,
    pub procedure: Procedure,
    /// ε actually used, for estimated-p compound families.
    pub epsilon: Option<f64>,
    pub fixed_p: Option<f64>,
    pub avg_power: f64,
    pub avg_fdr: f64,
    /// Monte Carlo standard error of `avg_fdr`.
    pub fdr_se: f64,
    /// Mean sample pFDR over replicates with R > 0.
    pub avg_pfdr: Option<f64>,
    pub pfdr_se: Option<f64>,
    pub replicates_no_rejection: usize,
    pub avg_discoveries: f64,
    /// Mean raw p-hat (estimated-p compound families only).
    pub avg_p_raw: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub config: SimConfig,
    pub rows: Vec<FamilyRow>,
}

impl CellReport {
    pub fn row(&self, label: &str, procedure: Procedure) -> Option<&FamilyRow> {
        self.rows
            .iter()
            .find(|r| r.label == label && r.procedure == procedure)
    }

    pub fn row_for(&self, family: Family, procedure: Procedure) -> Option<&FamilyRow> {
        self.rows
            .iter()
            .find(|r| r.family == family && r.procedure == procedure)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub cells: Vec<CellReport>,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn summarize(config: &SimConfig, outcomes: &[ReplicateOutcome]) -> CellReport {
    let mut rows = Vec::new();
    for (fi, family) in config.families().into_iter().enumerate() {
        let p_raws: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| o.families[fi].p_raw)
            .collect();
        for (pi, &procedure) in Procedure::ALL.iter().enumerate() {
            let metrics: Vec<SampleMetrics> = outcomes
                .iter()
                .map(|o| o.families[fi].metrics[pi].1)
                .collect();
            let powers: Vec<f64> = metrics.iter().map(|s| s.power).collect();
            let fdrs: Vec<f64> = metrics.iter().map(|s| s.fdr).collect();
            let pfdrs: Vec<f64> = metrics.iter().filter_map(|s| s.pfdr).collect();
            let discoveries: Vec<f64> = metrics.iter().map(|s| s.discoveries as f64).collect();
            let (avg_fdr, fdr_se) = mean_and_se(&fdrs);
            let pfdr = (!pfdrs.is_empty()).then(|| mean_and_se(&pfdrs));
            let (epsilon, fixed_p) = match family {
                Family::Compound(mode) => match mode.prior_mode(config.lambda2) {
                    PriorMode::Estimated { epsilon } => (Some(epsilon), None),
                    PriorMode::Fixed(p) => (None, Some(p)),
                },
                _ => (None, None),
            };
            rows.push(FamilyRow {
                family,
                label: family.label(config.lambda2),
                procedure,
                epsilon,
                fixed_p,
                avg_power: mean_and_se(&powers).0,
                avg_fdr,
                fdr_se,
                avg_pfdr: pfdr.map(|p| p.0),
                pfdr_se: pfdr.map(|p| p.1),
                replicates_no_rejection: metrics.len() - pfdrs.len(),
                avg_discoveries: mean_and_se(&discoveries).0,
                avg_p_raw: (!p_raws.is_empty()).then(|| mean_and_se(&p_raws).0),
            });
        }
    }
    CellReport {
        config: config.clone(),
        rows,
    }
}

/// Runs every configuration for its replicate count and averages the
/// sample metrics.
pub fn run_study(configs: &[SimConfig]) -> Result<SimulationReport> {
    if configs.is_empty() {
        return Err(Error::Config("empty simulation grid".into()));
    }
    let cells = configs
        .iter()
        .map(|config| {
            config.validate()?;
            let mu = config.means();
            let outcomes = (0..config.replicates)
                .into_par_iter()
                .map(|k| {
                    let mut out = run_replicate_with_means(config, &mu, k)?;
                    for f in &mut out.families {
                        f.decisions.clear();
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(summarize(config, &outcomes))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationReport { cells })
}

/// The (θ, τ) cells of the published study: τ = 0 with θ ∈ {2, 4}, and
/// τ = 2 with θ ∈ {0, 2, 4}.
pub const STUDY_CELLS: [(f64, f64); 5] =
    [(2.0, 0.0), (4.0, 0.0), (0.0, 2.0), (2.0, 2.0), (4.0, 2.0)];

/// Training fractions of the published study.
pub const STUDY_LAMBDA2: [f64; 4] = [0.01, 0.05, 0.10, 0.20];

/// Full study grid, one config per (θ, τ, λ²).
pub fn study_grid(replicates: usize, seed: u64) -> Vec<SimConfig> {
    STUDY_CELLS
        .iter()
        .flat_map(|&(theta, tau)| {
            STUDY_LAMBDA2
                .iter()
                .map(move |&l2| SimConfig::study_cell(theta, tau, l2, replicates, seed))
        })
        .collect()
}
