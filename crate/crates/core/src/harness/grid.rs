//! Deterministic parallel execution over a scenario grid.
//!
//! Stream derivation keys on `(base_seed, family_id, replicate_index)`
//! where the family id identifies `(truth, pattern)` but not the delay, so
//! the same replicate index sees identical stage-1 data across all delay
//! values. Outcomes are collected and reduced in replicate-index order,
//! making every summary bit-identical for any worker count.

use rayon::prelude::*;

use crate::design::Endpoint;
use crate::engine::{
    run_replicate_binary, run_replicate_continuous, EngineOptions, ReplicateOutcome, ScenarioTruth,
};
use crate::metrics::{summarize, CellSpec, ScenarioSummary};
use crate::recruitment::{Pattern, RecruitmentPlan};
use crate::statdist::RngStream;
use crate::{Error, Result};

use super::config::ScenarioGrid;

/// Stream for one replicate of one scenario family.
pub fn derive_stream(base_seed: u64, family_id: u32, replicate_index: u32) -> RngStream {
    RngStream::derive(base_seed, family_id, replicate_index)
}

/// Recruitment plan for one pattern of the grid, fitted to the design's
/// unrounded planning total.
pub fn build_plan(grid: &ScenarioGrid, pattern: Pattern) -> Result<RecruitmentPlan> {
    match pattern {
        Pattern::Uniform => RecruitmentPlan::uniform(grid.design.n_init(), grid.horizon_t),
        Pattern::Linear => RecruitmentPlan::linear(
            grid.design.n_init(),
            grid.horizon_t,
            grid.design.n1,
            grid.t1_mode,
        ),
    }
}

/// Family id of the `(truth, pattern)` pair at the given indices; excludes
/// the delay by construction.
pub fn family_id(grid: &ScenarioGrid, truth_index: usize, pattern_index: usize) -> u32 {
    (truth_index * grid.patterns.len() + pattern_index) as u32
}

/// Runs all replicates of one `(truth, pattern, m)` cell, in replicate
/// order.
pub fn run_cell(
    grid: &ScenarioGrid,
    truth: &ScenarioTruth,
    plan: &RecruitmentPlan,
    m: f64,
    family: u32,
) -> Result<Vec<ReplicateOutcome>> {
    let opts = EngineOptions {
        blinded_estimator: grid.blinded_estimator,
        cap: grid.cap,
    };
    let runner = match grid.design.endpoint {
        Endpoint::Continuous => run_replicate_continuous,
        Endpoint::Binary => run_replicate_binary,
    };
    (0..grid.replicates as u32)
        .into_par_iter()
        .map(|idx| {
            let mut stream = derive_stream(grid.base_seed, family, idx);
            runner(&grid.design, truth, plan, m, &opts, &mut stream)
        })
        .collect()
}

/// Runs the whole grid on `worker_count` threads and returns one summary
/// per cell, in `(truth, pattern, m)` iteration order.
pub fn run_grid(grid: &ScenarioGrid, worker_count: usize) -> Result<Vec<ScenarioSummary>> {
    if worker_count == 0 {
        return Err(Error::domain("worker_count", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count)
        .build()
        .map_err(|e| Error::domain("worker_count", e.to_string()))?;
    pool.install(|| {
        let mut rows = Vec::with_capacity(grid.cell_count());
        for (ti, truth) in grid.truths.iter().enumerate() {
            for (pi, &pattern) in grid.patterns.iter().enumerate() {
                let plan = build_plan(grid, pattern)?;
                let family = family_id(grid, ti, pi);
                for &m in &grid.delays_m {
                    let outcomes = run_cell(grid, truth, &plan, m, family)?;
                    let cell = CellSpec {
                        design: &grid.design,
                        truth,
                        pattern,
                        m,
                        n_delay: plan.expected_pipeline(m),
                        power_mode: grid.power_mode,
                    };
                    rows.push(summarize(&outcomes, &cell)?);
                }
            }
        }
        Ok(rows)
    })
}
