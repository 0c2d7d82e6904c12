// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

//! Synthetic data: clustered vectors and correlated attributes.

use pathfinder_core::{AttributeKind, Column, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::attrs::Attributes;
use crate::fvecs::Vectors;

/// `a ~ N(0, 1)` and `b = a + k · norm` with independent `norm ~ N(0, 1)`.
pub fn gen_correlated_attrs(n: usize, k: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = StandardNormal.sample(&mut rng);
        let z: f64 = StandardNormal.sample(&mut rng);
        a.push(x);
        b.push(x + k * z);
    }
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataConfig {
    pub n: usize,
    pub queries: usize,
    pub dim: usize,
    /// Noise scale of `b` around `a`.
    pub k: f64,
    pub categories: usize,
    pub clusters: usize,
    pub seed: u64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            queries: 1_000,
            dim: 128,
            k: 0.5,
            categories: 20,
            clusters: 32,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub vectors: Vectors,
    /// Held-out vectors from the same distribution.
    pub queries: Vectors,
    pub attrs: Attributes,
}

const LATENT: usize = 16;

/// Vectors from a Gaussian mixture in a 16-dimensional latent space,
/// linearly lifted to `dim` dimensions with small isotropic noise.
pub fn gen_vectors(count: usize, dim: usize, clusters: usize, seed: u64) -> Vectors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<f32> = (0..clusters.max(1) * LATENT)
        .map(|_| 3.0 * Distribution::<f32>::sample(&StandardNormal, &mut rng))
        .collect();
    let lift = Normal::new(0.0f32, 1.0 / (LATENT as f32).sqrt()).unwrap();
    let proj: Vec<f32> = (0..LATENT * dim).map(|_| lift.sample(&mut rng)).collect();
    let mut data = Vec::with_capacity(count * dim);
    let mut z = [0f32; LATENT];
    for _ in 0..count {
        let c = rng.random_range(0..clusters.max(1));
        for (j, zj) in z.iter_mut().enumerate() {
            let e: f32 = StandardNormal.sample(&mut rng);
            *zj = centers[c * LATENT + j] + e;
        }
        for d in 0..dim {
            let mut x: f32 = 0.1 * Distribution::<f32>::sample(&StandardNormal, &mut rng);
            for (j, zj) in z.iter().enumerate() {
                x += zj * proj[j * dim + d];
            }
            data.push(x);
        }
    }
    Vectors { dim, data }
}

/// The desk-scale dataset: attributes `a`, `b` (correlated with `a`), `c`
/// (uniform on [0, 1000)) and `cat` (uniform over `categories` labels).
pub fn gen_dataset(cfg: &DataConfig) -> Dataset {
    let all = gen_vectors(cfg.n + cfg.queries, cfg.dim, cfg.clusters, cfg.seed);
    let split = cfg.n * cfg.dim;
    let vectors = Vectors {
        dim: cfg.dim,
        data: all.data[..split].to_vec(),
    };
    let queries = Vectors {
        dim: cfg.dim,
        data: all.data[split..].to_vec(),
    };
    let (a, b) = gen_correlated_attrs(cfg.n, cfg.k, cfg.seed ^ 0xa77);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xc47);
    let c: Vec<f64> = (0..cfg.n).map(|_| rng.random_range(0.0..1000.0)).collect();
    let cat: Vec<String> = (0..cfg.n)
        .map(|_| category(rng.random_range(0..cfg.categories.max(1))))
        .collect();
    let schema = Schema::new([
        ("a", AttributeKind::Numeric),
        ("b", AttributeKind::Numeric),
        ("c", AttributeKind::Numeric),
        ("cat", AttributeKind::Categorical),
    ])
    .expect("static schema");
    Dataset {
        vectors,
        queries,
        attrs: Attributes {
            schema,
            columns: vec![
                Column::Numeric(a),
                Column::Numeric(b),
                Column::Numeric(c),
                Column::categorical(cat),
            ],
        },
    }
}

pub fn category(i: usize) -> String {
    format!("c{i:02}")
}
