// SPDX-License-Identifier: Apache-2.0

//! Two-group real-data pipeline.
//!
//! The training columns give per-row T statistics that are mapped to the
//! normal scale and pooled to fit the prior. The test columns give the
//! statistics whose compound p-values are computed. The simple family is
//! the ordinary two-sided T test on all columns.

use crate::datamodel::{random_split, DataMatrix, GroupLabels, SplitPlan};
use crate::error::{Error, Result};
use crate::estimators::{fit_prior, shrinkage_weights, PriorMode};
use crate::numerics::{Probability, RngStream};
use crate::procedures::{apply, Procedure, DEFAULT_QVALUE_LAMBDA};
use crate::pvalues::{compound_p_standardized, simple_t_p, t_to_z, PValueKind, PValueSet};

/// Training statistics are already standard normal under the null, so the
/// prior is fitted with unit training variance.
const TRAINING_LAMBDA2: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub enum TrainingSpec {
    /// Random split of this fraction of the columns, stratified by group.
    Fraction(f64),
    /// Explicit 0-based training columns.
    Columns(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub training: TrainingSpec,
    pub epsilons: Vec<f64>,
    pub fixed_p: Vec<f64>,
    pub procedures: Vec<Procedure>,
    pub alphas: Vec<f64>,
    pub qvalue_lambda: f64,
    /// Seeds the random split; unused with explicit columns.
    pub seed: u64,
}

/// α = .01, .02, …, .20.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=20).map(|i| f64::from(i) / 100.0).collect()
}

impl AnalysisConfig {
    pub fn new(training: TrainingSpec) -> Self {
        AnalysisConfig {
            training,
            epsilons: vec![1.0, 2.0],
            fixed_p: vec![0.1, 1.0],
            procedures: Procedure::ALL.to_vec(),
            alphas: default_alpha_grid(),
            qvalue_lambda: DEFAULT_QVALUE_LAMBDA,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.procedures.is_empty() {
            return Err(Error::Config("no procedure selected".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::Config("no alpha level given".into()));
        }
        if let Some(a) = self.alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::Config(format!("alpha {a} outside (0, 1]")));
        }
        if !(0.0..1.0).contains(&self.qvalue_lambda) {
            return Err(Error::Config(format!(
                "q-value lambda {} outside [0, 1)",
                self.qvalue_lambda
            )));
        }
        for mode in self.modes() {
            mode.validate()?;
        }
        Ok(())
    }

    fn modes(&self) -> Vec<PriorMode> {
        self.epsilons
            .iter()
            .map(|&epsilon| PriorMode::Estimated { epsilon })
            .chain(self.fixed_p.iter().map(|&p| PriorMode::Fixed(p)))
            .collect()
    }

    pub fn plan(&self, groups: &GroupLabels) -> Result<SplitPlan> {
        let n = groups.len();
        match &self.training {
            TrainingSpec::Columns(cols) => SplitPlan::with_groups(n, cols.clone(), groups),
            TrainingSpec::Fraction(f) => {
                random_split(n, *f, &RngStream::new(self.seed), Some(groups))
            }
        }
    }
}

/// Fit summary of one p-value family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyFit {
    pub label: String,
    pub kind: PValueKind,
    pub mode: Option<PriorMode>,
    pub p_raw: Option<f64>,
    pub p_hat: Option<f64>,
    pub theta_hat: Option<f64>,
    pub tau2_hat: Option<f64>,
    /// Set when the raw p-hat is not positive; the family is not tested.
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub family: String,
    pub procedure: Procedure,
    pub alpha: f64,
    pub count: usize,
    pub rejected_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryReport {
    pub seed: u64,
    pub training: Vec<usize>,
    pub training_ids: Vec<String>,
    pub qvalue_lambda: f64,
    pub degenerate_training_rows: usize,
    pub degenerate_test_rows: usize,
    pub families: Vec<FamilyFit>,
    pub discoveries: Vec<Discovery>,
}

impl DiscoveryReport {
    pub fn count(&self, family: &str, procedure: Procedure, alpha: f64) -> Option<usize> {
        self.discoveries
            .iter()
            .find(|d| d.family == family && d.procedure == procedure && d.alpha == alpha)
            .map(|d| d.count)
    }
}

pub fn family_label(mode: Option<PriorMode>) -> String {
    match mode {
        None => "simple".into(),
        Some(m) => format!("compound({m})"),
    }
}

pub fn analyze(
    matrix: &DataMatrix,
    groups: &GroupLabels,
    config: &AnalysisConfig,
) -> Result<DiscoveryReport> {
    config.validate()?;
    if groups.len() != matrix.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{} group labels for {} columns",
            groups.len(),
            matrix.cols()
        )));
    }
    let plan = config.plan(groups)?;
    let train = [plan.training_in_group(1), plan.training_in_group(2)];
    if let Some(g) = train.iter().position(|c| c.len() < 2) {
        return Err(Error::InfeasibleSplit(format!(
            "training T statistic needs two columns per group, group {} has {}",
            g + 1,
            train[g].len()
        )));
    }
    let test = [plan.test_in_group(1), plan.test_in_group(2)];

    let train_t = crate::pvalues::two_sample_t(matrix, &train[0], &train[1])?;
    // Degenerate rows have t = 0 and so y = 0.
    let y = t_to_z(&train_t.t, train_t.df)?.z;
    let test_t = crate::pvalues::two_sample_t(matrix, &test[0], &test[1])?;
    let z = t_to_z(&test_t.t, test_t.df)?.z;

    let mut sets: Vec<(String, PValueSet)> = Vec::new();
    let mut families = vec![FamilyFit {
        label: family_label(None),
        kind: PValueKind::Simple,
        mode: None,
        p_raw: None,
        p_hat: None,
        theta_hat: None,
        tau2_hat: None,
        skipped: false,
    }];
    sets.push((family_label(None), simple_t_p(matrix, groups)?));

    for mode in config.modes() {
        let prior = fit_prior(&y, TRAINING_LAMBDA2, mode)?;
        let label = family_label(Some(mode));
        let skipped = prior.p_raw.is_some_and(|p| p <= 0.0);
        families.push(FamilyFit {
            label: label.clone(),
            kind: PValueKind::Compound,
            mode: Some(mode),
            p_raw: prior.p_raw,
            p_hat: Some(prior.p_hat.value()),
            theta_hat: Some(prior.theta_hat),
            tau2_hat: Some(prior.tau2_hat),
            skipped,
        });
        if !skipped {
            let weights = shrinkage_weights(&y, &prior);
            let p = compound_p_standardized(&z, &weights)?
                .with_prior(mode)
                .force_one(&test_t.degenerate);
            sets.push((label, p));
        }
    }

    let mut discoveries = Vec::new();
    for (label, p) in &sets {
        for &procedure in &config.procedures {
            for &alpha in &config.alphas {
                let d = apply(procedure, p, Probability::new(alpha)?, config.qvalue_lambda)?;
                let rejected_ids = d
                    .rejected()
                    .into_iter()
                    .map(|m| matrix.row_ids()[m].clone())
                    .collect();
                discoveries.push(Discovery {
                    family: label.clone(),
                    procedure,
                    alpha,
                    count: d.count(),
                    rejected_ids,
                });
            }
        }
    }

    let count = |flags: &[bool]| flags.iter().filter(|&&f| f).count();
    Ok(DiscoveryReport {
        seed: config.seed,
        training: plan.training().to_vec(),
        training_ids: plan
            .training()
            .iter()
            .map(|&n| matrix.col_ids()[n].clone())
            .collect(),
        qvalue_lambda: config.qvalue_lambda,
        degenerate_training_rows: count(&train_t.degenerate),
        degenerate_test_rows: count(&test_t.degenerate),
        families,
        discoveries,
    })
}
