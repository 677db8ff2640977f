//! Canonical grids for the four published reference tables.
//!
//! S1/S2 are the continuous design (planning SD 10, effect 3.5, stage-1
//! total 70) under uniform/linear recruitment; S3/S4 are the binary design
//! (planning rates 0.3/0.55, stage-1 total 30). All use a 24-month accrual
//! horizon and delays 0, 3, ..., 24.

use crate::design::DesignSpec;
use crate::engine::{BlindedEstimator, ScenarioTruth};
use crate::metrics::ScenarioSummary;
use crate::recruitment::{Pattern, T1Mode};
use crate::statdist::PowerMode;
use crate::{Error, Result};

use super::config::{default_delays, ScenarioGrid, DEFAULT_REPLICATES};
use super::grid::run_grid;

/// Identifier of a published table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    S1,
    S2,
    S3,
    S4,
}

impl std::str::FromStr for TableId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S1" => Ok(TableId::S1),
            "S2" => Ok(TableId::S2),
            "S3" => Ok(TableId::S3),
            "S4" => Ok(TableId::S4),
            other => Err(Error::UnknownTable(other.to_string())),
        }
    }
}

impl std::fmt::Display for TableId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TableId::S1 => "S1",
            TableId::S2 => "S2",
            TableId::S3 => "S3",
            TableId::S4 => "S4",
        })
    }
}

/// Options that vary between table runs.
#[derive(Debug, Clone, Copy)]
pub struct TableOptions {
    pub base_seed: u64,
    pub replicates: usize,
    pub t1_mode: T1Mode,
    pub power_mode: PowerMode,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            base_seed: super::config::DEFAULT_BASE_SEED,
            replicates: DEFAULT_REPLICATES,
            t1_mode: T1Mode::default(),
            power_mode: PowerMode::default(),
        }
    }
}

/// The scenario grid that generates one published table.
pub fn table_grid(id: TableId, opts: TableOptions) -> ScenarioGrid {
    let (design, truths) = match id {
        TableId::S1 | TableId::S2 => {
            let design =
                DesignSpec::continuous(0.05, 0.2, 3.5, 10.0, 70).expect("valid table design");
            let truths = [8.0, 10.0, 12.0]
                .into_iter()
                .map(|sd| ScenarioTruth::Continuous {
                    sd_truth: sd,
                    delta_truth: 3.5,
                })
                .collect();
            (design, truths)
        }
        TableId::S3 | TableId::S4 => {
            let design = DesignSpec::binary(0.05, 0.2, 0.3, 0.55, 30).expect("valid table design");
            let truths = [0.1, 0.3, 0.5]
                .into_iter()
                .map(|pi1| ScenarioTruth::Binary {
                    pi1,
                    pi2: pi1 + 0.25,
                })
                .collect();
            (design, truths)
        }
    };
    let pattern = match id {
        TableId::S1 | TableId::S3 => Pattern::Uniform,
        TableId::S2 | TableId::S4 => Pattern::Linear,
    };
    ScenarioGrid {
        design,
        truths,
        patterns: vec![pattern],
        delays_m: default_delays(),
        replicates: opts.replicates,
        base_seed: opts.base_seed,
        horizon_t: 24.0,
        t1_mode: opts.t1_mode,
        power_mode: opts.power_mode,
        cap: None,
        blinded_estimator: BlindedEstimator::Lumped,
    }
}

/// Reproduces one published table: 27 summary rows in table order.
pub fn reproduce_table(
    id: TableId,
    opts: TableOptions,
    workers: usize,
) -> Result<(ScenarioGrid, Vec<ScenarioSummary>)> {
    let grid = table_grid(id, opts);
    let rows = run_grid(&grid, workers)?;
    Ok((grid, rows))
}
