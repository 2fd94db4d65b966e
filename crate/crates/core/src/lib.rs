// SPDX-License-Identifier: Apache-2.0

//! Compound p-values for multiple testing.
//!
//! Columns of the data matrix are split into training and test parts. The
//! training part is pooled across all hypotheses to estimate, per
//! hypothesis, how likely its effect is negative; that weight decides how
//! the test size is split between the two tails of the test-data
//! statistic. The resulting p-values use information from every row yet
//! remain uniform and independent under the true nulls, so standard
//! procedures such as Benjamini–Hochberg or Storey's q-values stay valid.

// `!(x > 0.0)` style checks reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod datamodel;
pub mod error;
pub mod estimators;
pub mod io;
pub mod numerics;
pub mod power;
pub mod procedures;
pub mod pvalues;
pub mod report;
pub mod simulation;

pub use analysis::{AnalysisConfig, DiscoveryReport, TrainingSpec};
pub use datamodel::{DataMatrix, GroupLabels, SplitPlan, StatVectors};
pub use error::{Error, Result};
pub use estimators::{PriorEstimate, PriorMode, ShrinkageWeights};
pub use numerics::{Probability, RngStream};
pub use procedures::{DecisionSet, Procedure};
pub use pvalues::{PValueKind, PValueSet};
pub use simulation::{CompoundMode, SimConfig, SimulationReport};
