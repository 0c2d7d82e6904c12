// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::relation::{Column, Relation};

/// Symmetric attribute-pair scores in `[0, 1]`.
///
/// Numeric pairs use |Pearson r|; numeric against categorical uses the
/// correlation ratio (between-group over total sum of squares);
/// categorical pairs score 0, as does any pair with a constant attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    n: usize,
    scores: Vec<f64>,
}

impl CorrelationTable {
    /// Identity table: 1 on the diagonal, 0 elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut scores = vec![0.0; n * n];
        for i in 0..n {
            scores[i * n + i] = 1.0;
        }
        Self { n, scores }
    }

    /// From a row-major `n × n` matrix, which must be symmetric with
    /// entries in `[0, 1]`.
    pub fn from_matrix(n: usize, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != n * n {
            return Err(Error::InvalidParams(alloc::format!(
                "correlation matrix has {} entries, expected {}",
                scores.len(),
                n * n
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let s = scores[i * n + j];
                if !(0.0..=1.0).contains(&s) || s != scores[j * n + i] {
                    return Err(Error::InvalidParams(alloc::format!(
                        "bad correlation score at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, scores })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.scores[a * self.n + b]
    }

    /// Row-major matrix.
    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }
}

pub fn compute_correlations(r: &Relation) -> Result<CorrelationTable> {
    let n = r.columns().len();
    if n < 2 {
        return Err(Error::TooFewAttributes);
    }
    let mut t = CorrelationTable::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let s = match (r.column(i), r.column(j)) {
                (Column::Numeric(x), Column::Numeric(y)) => pearson(x, y).abs(),
                (Column::Numeric(x), Column::Categorical { dictionary, codes })
                | (Column::Categorical { dictionary, codes }, Column::Numeric(x)) => {
                    correlation_ratio(x, codes, dictionary.len())
                }
                _ => 0.0,
            };
            let s = if s.is_finite() {
                s.clamp(0.0, 1.0)
            } else {
                0.0
            };
            t.scores[i * n + j] = s;
            t.scores[j * n + i] = s;
        }
    }
    Ok(t)
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / libm::sqrt(sxx * syy)
}

fn correlation_ratio(x: &[f64], codes: &[u32], groups: usize) -> f64 {
    let m = mean(x);
    let mut sum = vec![0.0; groups];
    let mut count = vec![0usize; groups];
    let mut total = 0.0;
    for (&v, &c) in x.iter().zip(codes) {
        sum[c as usize] += v;
        count[c as usize] += 1;
        total += (v - m) * (v - m);
    }
    if total == 0.0 {
        return 0.0;
    }
    let between: f64 = sum
        .iter()
        .zip(&count)
        .filter(|(_, &n)| n > 0)
        .map(|(&s, &n)| {
            let d = s / n as f64 - m;
            n as f64 * d * d
        })
        .sum();
    between / total
}
