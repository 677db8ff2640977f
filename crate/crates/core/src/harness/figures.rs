//! Long-format figure data: metric curves over monthly delays and the
//! per-replicate final-size distribution behind the boxplots.

use crate::metrics::{summarize, CellSpec};
use crate::{Error, Result};

use super::config::ScenarioGrid;
use super::emit::fmt_sig;
use super::grid::{build_plan, family_id, run_cell, run_grid};

/// Which figure series to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureMetric {
    Rmse,
    Cost,
    Impact,
    NstarDist,
}

impl std::str::FromStr for FigureMetric {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rmse" => Ok(FigureMetric::Rmse),
            "cost" => Ok(FigureMetric::Cost),
            "impact" => Ok(FigureMetric::Impact),
            "nstar-dist" => Ok(FigureMetric::NstarDist),
            other => Err(format!(
                "unknown metric `{other}` (expected rmse, cost, impact or nstar-dist)"
            )),
        }
    }
}

/// Emits figure data as CSV. Metric curves run over m = 1..=24 regardless
/// of the grid's delay list; the final-size distribution uses the grid's
/// delays and emits one row per replicate.
pub fn emit_figure_data(
    grid: &ScenarioGrid,
    metric: FigureMetric,
    workers: usize,
) -> Result<String> {
    match metric {
        FigureMetric::NstarDist => nstar_distribution(grid, workers),
        _ => metric_curves(grid, metric, workers),
    }
}

fn metric_curves(grid: &ScenarioGrid, metric: FigureMetric, workers: usize) -> Result<String> {
    let mut monthly = grid.clone();
    monthly.delays_m = (1..=24).map(f64::from).collect();
    let rows = run_grid(&monthly, workers)?;
    let name = match metric {
        FigureMetric::Rmse => "rmse",
        FigureMetric::Cost => "cost",
        FigureMetric::Impact => "delay_impact",
        FigureMetric::NstarDist => unreachable!(),
    };
    let mut out = format!("truth_param,pattern,m,{name}\n");
    for row in &rows {
        let value = match metric {
            FigureMetric::Rmse => row.rmse_ssr,
            FigureMetric::Cost => row.cost_ssr,
            FigureMetric::Impact => row.delay_impact,
            FigureMetric::NstarDist => unreachable!(),
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig(row.truth_param),
            row.pattern,
            fmt_sig(row.m),
            fmt_sig(value)
        ));
    }
    Ok(out)
}

fn nstar_distribution(grid: &ScenarioGrid, workers: usize) -> Result<String> {
    if workers == 0 {
        return Err(Error::domain("worker_count", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain("worker_count", e.to_string()))?;
    pool.install(|| {
        let mut out = String::from("truth_param,pattern,m,replicate,n_final,reject\n");
        for (ti, truth) in grid.truths.iter().enumerate() {
            for (pi, &pattern) in grid.patterns.iter().enumerate() {
                let plan = build_plan(grid, pattern)?;
                let family = family_id(grid, ti, pi);
                for &m in &grid.delays_m {
                    let outcomes = run_cell(grid, truth, &plan, m, family)?;
                    // Summarize only to keep the per-cell validation; the
                    // rows below carry the raw distribution.
                    let cell = CellSpec {
                        design: &grid.design,
                        truth,
                        pattern,
                        m,
                        n_delay: plan.expected_pipeline(m),
                        power_mode: grid.power_mode,
                    };
                    summarize(&outcomes, &cell)?;
                    for (idx, o) in outcomes.iter().enumerate() {
                        out.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            fmt_sig(truth.label()),
                            pattern,
                            fmt_sig(m),
                            idx,
                            fmt_sig(o.n_final_recorded),
                            u8::from(o.reject)
                        ));
                    }
                }
            }
        }
        Ok(out)
    })
}
