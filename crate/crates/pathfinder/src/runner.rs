// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The Pathfinder Authors

use std::time::Instant;

use pathfinder_core::graph::build_vamana;
use pathfinder_core::index::{GraphBuildRunner, GraphJob};
use pathfinder_core::{BuildParams, Clock, Relation, VamanaGraph};
use rayon::prelude::*;

/// Builds graphs on a rayon pool. Output is independent of the thread
/// count.
pub struct RayonRunner {
    pool: rayon::ThreadPool,
}

impl RayonRunner {
    /// `threads == 0` uses rayon's default width.
    pub fn new(threads: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        Ok(Self { pool })
    }

    pub fn pool(&self) -> &rayon::ThreadPool {
        &self.pool
    }
}

impl GraphBuildRunner for RayonRunner {
    fn run(
        &self,
        r: &Relation,
        bp: BuildParams,
        jobs: &[GraphJob],
    ) -> pathfinder_core::Result<Vec<VamanaGraph>> {
        // Largest first.
        let mut order: Vec<usize> = (0..jobs.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(jobs[i].members.len()));
        let built: Vec<(usize, pathfinder_core::Result<VamanaGraph>)> = self.pool.install(|| {
            order
                .par_iter()
                .map(|&i| (i, build_vamana(r, &jobs[i].members, bp, jobs[i].seed)))
                .collect()
        });
        let mut out: Vec<Option<VamanaGraph>> = vec![None; jobs.len()];
        for (i, g) in built {
            out[i] = Some(g?);
        }
        Ok(out.into_iter().map(Option::unwrap).collect())
    }
}

/// Wall clock measured from construction.
pub struct StdClock {
    origin: Instant,
}

impl StdClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now_nanos(&self) -> u64 {
        self.origin.elapsed().as_nanos() as u64
    }
}
