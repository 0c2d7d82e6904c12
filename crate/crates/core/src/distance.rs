// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMetric {
    /// Σ(a_i − b_i)². Monotone in euclidean distance, so rankings agree.
    #[default]
    SquaredEuclidean,
    /// −Σ a_i·b_i. Can be negative; only the ordering is meaningful.
    NegatedInnerProduct,
}

impl DistanceMetric {
    pub fn name(self) -> &'static str {
        match self {
            Self::SquaredEuclidean => "l2sq",
            Self::NegatedInnerProduct => "neg-ip",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "l2sq" | "l2" => Some(Self::SquaredEuclidean),
            "neg-ip" | "ip" => Some(Self::NegatedInnerProduct),
            _ => None,
        }
    }

    /// Distance between equal-length slices. Length is only debug-checked.
    #[inline]
    pub fn eval(self, a: &[f32], b: &[f32]) -> f32 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Self::SquaredEuclidean => squared_l2(a, b),
            Self::NegatedInnerProduct => -dot(a, b),
        }
    }
}

/// Checked distance between two vectors.
pub fn distance(a: &[f32], b: &[f32], metric: DistanceMetric) -> Result<f32> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(metric.eval(a, b))
}

// Eight independent accumulator lanes.
#[inline]
fn squared_l2(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            let d = x[i] - y[i];
            acc[i] += d * d;
        }
    }
    let mut tail = 0.0f32;
    for (x, y) in ra.iter().zip(rb) {
        let d = x - y;
        tail += d * d;
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + (acc[2] + acc[6]) + (acc[3] + acc[7]) + tail
}

#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            acc[i] += x[i] * y[i];
        }
    }
    let mut tail = 0.0f32;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + (acc[2] + acc[6]) + (acc[3] + acc[7]) + tail
}
