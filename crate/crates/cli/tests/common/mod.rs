// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cpval_core::io::{write_labels, write_matrix_file};
use cpval_core::numerics::{draw_normal, RngStream};
use cpval_core::{DataMatrix, GroupLabels};

pub fn cpval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpval"))
        .args(args)
        .output()
        .expect("spawn cpval")
}

pub fn cpval_ok(args: &[&str]) {
    let out = cpval(args);
    assert!(
        out.status.success(),
        "cpval {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Reference Φ: Maclaurin series of erf near 0, Laplace continued fraction in the tails.
pub fn phi(x: f64) -> f64 {
    if x.abs() <= 3.0 {
        let z = x / 2f64.sqrt();
        let (mut term, mut sum) = (z, z);
        for n in 1..200 {
            term *= -z * z / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        0.5 * (1.0 + 2.0 / PI.sqrt() * sum)
    } else {
        let a = x.abs();
        let mut frac = a;
        for k in (1..=2000).rev() {
            frac = a + k as f64 / frac;
        }
        let tail = (-0.5 * a * a).exp() / (2.0 * PI).sqrt() / frac;
        if x < 0.0 {
            tail
        } else {
            1.0 - tail
        }
    }
}

pub fn ks_uniform(sample: &[f64]) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

/// Uniform(0, 1) draws from a seeded stream.
pub fn uniforms(seed: u64, n: usize) -> Vec<f64> {
    draw_normal(&RngStream::new(seed), 0.0, 1.0, n)
        .unwrap()
        .into_iter()
        .map(cpval_core::numerics::std_normal_cdf)
        .collect()
}

/// 6033 x 102 expression-like matrix with groups of 50 and 52 columns.
/// The first 1500 rows are shifted up by 0.3 in group 2; the rest are null.
pub fn stand_in(seed: u64) -> (DataMatrix, GroupLabels) {
    let (rows, cols, n1) = (6033usize, 102usize, 50usize);
    let mut v = draw_normal(&RngStream::new(seed), 0.0, 1.0, rows * cols).unwrap();
    for r in 0..1500 {
        for c in n1..cols {
            v[r * cols + c] += 0.3;
        }
    }
    let row_ids = (1..=rows).map(|i| format!("gene{i}")).collect();
    let col_ids = (1..=cols).map(|j| format!("array{j}")).collect();
    (
        DataMatrix::with_ids(v, row_ids, col_ids).unwrap(),
        GroupLabels::contiguous(n1, cols - n1).unwrap(),
    )
}

/// Writes the matrix and labels into `dir`, returning their paths.
pub fn write_dataset(dir: &Path, matrix: &DataMatrix, groups: &GroupLabels) -> (PathBuf, PathBuf) {
    let data = dir.join("data.csv");
    let labels = dir.join("labels.txt");
    write_matrix_file(matrix, &data, b',').unwrap();
    let mut buf = Vec::new();
    write_labels(groups, &mut buf).unwrap();
    fs::write(&labels, buf).unwrap();
    (data, labels)
}

/// Parses `key=value` records, keeping those with the given `record` kind.
pub fn records(text: &str, kind: &str) -> Vec<HashMap<String, String>> {
    text.lines()
        .map(|line| {
            line.split(' ')
                .filter_map(|kv| kv.split_once('='))
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect::<HashMap<_, _>>()
        })
        .filter(|r| r.get("record").is_some_and(|k| k == kind))
        .collect()
}
