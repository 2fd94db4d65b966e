// SPDX-License-Identifier: Apache-2.0

//! The M×N data matrix, training/test column splits and the per-row
//! sufficient statistics computed from them.
//!
//! Rows index hypotheses, columns index samples. Storage is row-major.
//! Column indices are 0-based throughout the library; only the CLI speaks
//! 1-based column numbers.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    row_ids: Vec<String>,
    col_ids: Vec<String>,
}

impl DataMatrix {
    /// Builds a matrix from row-major `values` with generated ids
    /// (`row1..`, `col1..`).
    pub fn new(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        let row_ids = (1..=rows).map(|i| format!("row{i}")).collect();
        let col_ids = (1..=cols).map(|j| format!("col{j}")).collect();
        Self::with_ids(values, row_ids, col_ids)
    }

    pub fn with_ids(values: Vec<f64>, row_ids: Vec<String>, col_ids: Vec<String>) -> Result<Self> {
        let rows = row_ids.len();
        let cols = col_ids.len();
        if rows < 1 || cols < 2 {
            return Err(Error::DimensionMismatch(format!(
                "need at least 1 row and 2 columns, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite entry at row {}, column {}",
                k / cols + 1,
                k % cols + 1
            )));
        }
        Ok(DataMatrix {
            rows,
            cols,
            values,
            row_ids,
            col_ids,
        })
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {} has {} entries, expected {cols}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Self::new(rows.concat(), rows.len(), cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    #[inline]
    pub fn row(&self, m: usize) -> &[f64] {
        &self.values[m * self.cols..(m + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[m * self.cols + n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn select_columns(&self, cols: &[usize]) -> DataMatrix {
        let mut values = Vec::with_capacity(self.rows * cols.len());
        for m in 0..self.rows {
            let row = self.row(m);
            values.extend(cols.iter().map(|&n| row[n]));
        }
        DataMatrix {
            rows: self.rows,
            cols: cols.len(),
            values,
            row_ids: self.row_ids.clone(),
            col_ids: cols.iter().map(|&n| self.col_ids[n].clone()).collect(),
        }
    }
}

/// Assignment of every column to group 1 or group 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupLabels {
    assignment: Vec<u8>,
}

impl GroupLabels {
    pub fn new(assignment: Vec<u8>) -> Result<Self> {
        if let Some(k) = assignment.iter().position(|&g| g != 1 && g != 2) {
            return Err(Error::Domain(format!(
                "group label {} at column {} is not 1 or 2",
                assignment[k],
                k + 1
            )));
        }
        for g in [1, 2] {
            if !assignment.contains(&g) {
                return Err(Error::Domain(format!("group {g} is empty")));
            }
        }
        Ok(GroupLabels { assignment })
    }

    /// Columns `0..n1` in group 1, the next `n2` in group 2.
    pub fn contiguous(n1: usize, n2: usize) -> Result<Self> {
        let mut a = vec![1u8; n1];
        a.resize(n1 + n2, 2);
        Self::new(a)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn group_of(&self, col: usize) -> u8 {
        self.assignment[col]
    }

    pub fn columns(&self, group: u8) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&n| self.assignment[n] == group)
            .collect()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.assignment
    }
}

/// A training/test partition of the columns `0..n_cols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    n_cols: usize,
    training: Vec<usize>,
    groups: Option<GroupLabels>,
}

impl SplitPlan {
    /// `training` must be a nonempty proper subset of `0..n_cols` without
    /// duplicates. Order is irrelevant.
    pub fn new(n_cols: usize, mut training: Vec<usize>) -> Result<Self> {
        training.sort_unstable();
        if training.is_empty() {
            return Err(Error::InvalidPlan("training set is empty".into()));
        }
        if training.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPlan("duplicate training column".into()));
        }
        if let Some(&last) = training.last() {
            if last >= n_cols {
                return Err(Error::InvalidPlan(format!(
                    "column index {last} out of range for {n_cols} columns"
                )));
            }
        }
        if training.len() == n_cols {
            return Err(Error::InvalidPlan("training set uses every column".into()));
        }
        Ok(SplitPlan {
            n_cols,
            training,
            groups: None,
        })
    }

    /// As [`SplitPlan::new`], additionally requiring that every group
    /// contributes a training column and keeps at least two test columns.
    pub fn with_groups(n_cols: usize, training: Vec<usize>, groups: &GroupLabels) -> Result<Self> {
        if groups.len() != n_cols {
            return Err(Error::DimensionMismatch(format!(
                "{} group labels for {n_cols} columns",
                groups.len()
            )));
        }
        let mut plan = Self::new(n_cols, training)?;
        plan.groups = Some(groups.clone());
        for g in [1u8, 2] {
            if plan.training_in_group(g).is_empty() {
                return Err(Error::InvalidPlan(format!(
                    "no training column in group {g}"
                )));
            }
            let kept = plan.test_in_group(g).len();
            if kept < 2 {
                return Err(Error::InvalidPlan(format!(
                    "group {g} keeps {kept} test column(s), need 2"
                )));
            }
        }
        Ok(plan)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn training(&self) -> &[usize] {
        &self.training
    }

    pub fn test(&self) -> Vec<usize> {
        (0..self.n_cols)
            .filter(|n| self.training.binary_search(n).is_err())
            .collect()
    }

    /// Training fraction λ² = |T| / N.
    pub fn lambda2(&self) -> f64 {
        self.training.len() as f64 / self.n_cols as f64
    }

    pub fn groups(&self) -> Option<&GroupLabels> {
        self.groups.as_ref()
    }

    /// Training columns in `group`; empty when the plan has no groups.
    pub fn training_in_group(&self, group: u8) -> Vec<usize> {
        match &self.groups {
            Some(g) => self
                .training
                .iter()
                .copied()
                .filter(|&n| g.group_of(n) == group)
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn test_in_group(&self, group: u8) -> Vec<usize> {
        match &self.groups {
            Some(g) => self
                .test()
                .into_iter()
                .filter(|&n| g.group_of(n) == group)
                .collect(),
            None => Vec::new(),
        }
    }

    fn check_against(&self, matrix: &DataMatrix) -> Result<()> {
        if self.n_cols != matrix.cols() {
            return Err(Error::InvalidPlan(format!(
                "plan covers {} columns, matrix has {}",
                self.n_cols,
                matrix.cols()
            )));
        }
        Ok(())
    }
}

/// Training, test and full-data sums per row.
#[derive(Debug, Clone, PartialEq)]
pub struct StatVectors {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub lambda2: f64,
}

/// Splits `matrix` into its training and test columns, preserving row order.
pub fn split(matrix: &DataMatrix, plan: &SplitPlan) -> Result<(DataMatrix, DataMatrix)> {
    plan.check_against(matrix)?;
    Ok((
        matrix.select_columns(plan.training()),
        matrix.select_columns(&plan.test()),
    ))
}

pub fn sufficient_stats(matrix: &DataMatrix, plan: &SplitPlan) -> Result<StatVectors> {
    plan.check_against(matrix)?;
    let test = plan.test();
    let mut y = Vec::with_capacity(matrix.rows());
    let mut z = Vec::with_capacity(matrix.rows());
    for m in 0..matrix.rows() {
        let row = matrix.row(m);
        y.push(plan.training().iter().map(|&n| row[n]).sum::<f64>());
        z.push(test.iter().map(|&n| row[n]).sum::<f64>());
    }
    let w = y.iter().zip(&z).map(|(a, b)| a + b).collect();
    Ok(StatVectors {
        y,
        z,
        w,
        lambda2: plan.lambda2(),
    })
}

/// Draws a random training set of size round(λ²·N).
///
/// With groups, the training count is divided between the groups in
/// proportion to their sizes (ties to even) and each group keeps at least
/// two test columns.
pub fn random_split(
    n_cols: usize,
    lambda2: f64,
    stream: &RngStream,
    groups: Option<&GroupLabels>,
) -> Result<SplitPlan> {
    if !(lambda2 > 0.0 && lambda2 < 1.0) {
        return Err(Error::InfeasibleSplit(format!(
            "training fraction {lambda2} outside (0, 1)"
        )));
    }
    let target = lambda2 * n_cols as f64;
    if target.floor() < 1.0 {
        return Err(Error::InfeasibleSplit(format!(
            "lambda2 * N = {target} leaves no training column"
        )));
    }
    let k = target.round_ties_even() as usize;
    let mut rng = stream.rng();
    match groups {
        None => {
            if k >= n_cols {
                return Err(Error::InfeasibleSplit("no test column left".into()));
            }
            let training = index::sample(&mut rng, n_cols, k).into_vec();
            SplitPlan::new(n_cols, training)
        }
        Some(labels) => {
            if labels.len() != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "{} group labels for {n_cols} columns",
                    labels.len()
                )));
            }
            let g1 = labels.columns(1);
            let g2 = labels.columns(2);
            let k1 = (k as f64 * g1.len() as f64 / n_cols as f64).round_ties_even() as usize;
            let k2 = k.saturating_sub(k1);
            for (g, (kg, cols)) in [(k1, &g1), (k2, &g2)].into_iter().enumerate() {
                if kg < 1 || cols.len() < kg + 2 {
                    return Err(Error::InfeasibleSplit(format!(
                        "group {} of size {} cannot give {kg} training columns",
                        g + 1,
                        cols.len()
                    )));
                }
            }
            let mut training: Vec<usize> = index::sample(&mut rng, g1.len(), k1)
                .into_iter()
                .map(|i| g1[i])
                .collect();
            training.extend(
                index::sample(&mut rng, g2.len(), k2)
                    .into_iter()
                    .map(|i| g2[i]),
            );
            SplitPlan::with_groups(n_cols, training, labels)
        }
    }
}
