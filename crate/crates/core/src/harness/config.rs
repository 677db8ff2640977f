//! Scenario-grid configuration: a TOML file with `[design]`,
//! `[recruitment]`, `[grid]` and `[run]` sections. Unknown keys are hard
//! errors so typos surface immediately.

use std::path::Path;

use serde::Deserialize;

use crate::design::{DesignSpec, Endpoint};
use crate::engine::{BlindedEstimator, ScenarioTruth};
use crate::recruitment::{Pattern, T1Mode};
use crate::statdist::PowerMode;
use crate::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_BETA: f64 = 0.2;
pub const DEFAULT_HORIZON_T: f64 = 24.0;
pub const DEFAULT_REPLICATES: usize = 10_000;
pub const DEFAULT_BASE_SEED: u64 = 42;

/// A validated cross-product of scenarios to simulate.
#[derive(Debug, Clone)]
pub struct ScenarioGrid {
    pub design: DesignSpec,
    pub truths: Vec<ScenarioTruth>,
    pub patterns: Vec<Pattern>,
    pub delays_m: Vec<f64>,
    pub replicates: usize,
    pub base_seed: u64,
    pub horizon_t: f64,
    pub t1_mode: T1Mode,
    pub power_mode: PowerMode,
    pub cap: Option<f64>,
    pub blinded_estimator: BlindedEstimator,
}

impl ScenarioGrid {
    pub fn cell_count(&self) -> usize {
        self.truths.len() * self.patterns.len() * self.delays_m.len()
    }
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_beta() -> f64 {
    DEFAULT_BETA
}
fn default_horizon() -> f64 {
    DEFAULT_HORIZON_T
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    design: DesignSection,
    #[serde(default)]
    recruitment: RecruitmentSection,
    grid: GridSection,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignSection {
    endpoint: Endpoint,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_beta")]
    beta: f64,
    delta1: Option<f64>,
    sd_init: Option<f64>,
    p1_init: Option<f64>,
    p2_init: Option<f64>,
    n1: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecruitmentSection {
    #[serde(default = "default_horizon")]
    horizon_t: f64,
    #[serde(default)]
    t1_mode: T1Mode,
}

impl Default for RecruitmentSection {
    fn default() -> Self {
        RecruitmentSection {
            horizon_t: DEFAULT_HORIZON_T,
            t1_mode: T1Mode::default(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    /// Continuous truths: one scenario per SD value.
    sd_truth: Option<Vec<f64>>,
    /// True effect for continuous scenarios; defaults to `delta1`.
    delta_truth: Option<f64>,
    /// Binary truths: one scenario per control rate, with
    /// `pi2 = pi1 + delta1`.
    pi1: Option<Vec<f64>>,
    patterns: Option<Vec<Pattern>>,
    delays_m: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    replicates: Option<usize>,
    base_seed: Option<u64>,
    power_mode: Option<PowerMode>,
    cap: Option<f64>,
    blinded_estimator: Option<BlindedEstimator>,
}

fn config_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// The delay grid of the published tables: 0, 3, ..., 24 months.
pub fn default_delays() -> Vec<f64> {
    (0..=8).map(|k| f64::from(k) * 3.0).collect()
}

fn resolve(file: ConfigFile, path: &Path) -> Result<ScenarioGrid> {
    let d = &file.design;
    let design = match d.endpoint {
        Endpoint::Continuous => {
            for (name, present) in [("p1_init", d.p1_init), ("p2_init", d.p2_init)] {
                if present.is_some() {
                    return Err(config_err(
                        path,
                        format!("design.{name} is a binary-endpoint field"),
                    ));
                }
            }
            let delta1 = d
                .delta1
                .ok_or_else(|| config_err(path, "design.delta1 is required for continuous"))?;
            let sd_init = d
                .sd_init
                .ok_or_else(|| config_err(path, "design.sd_init is required for continuous"))?;
            DesignSpec::continuous(d.alpha, d.beta, delta1, sd_init, d.n1)
        }
        Endpoint::Binary => {
            if d.sd_init.is_some() {
                return Err(config_err(
                    path,
                    "design.sd_init is a continuous-endpoint field",
                ));
            }
            if d.delta1.is_some() {
                return Err(config_err(
                    path,
                    "design.delta1 is derived as p2_init - p1_init for binary; omit it",
                ));
            }
            let p1 = d
                .p1_init
                .ok_or_else(|| config_err(path, "design.p1_init is required for binary"))?;
            let p2 = d
                .p2_init
                .ok_or_else(|| config_err(path, "design.p2_init is required for binary"))?;
            DesignSpec::binary(d.alpha, d.beta, p1, p2, d.n1)
        }
    }
    .map_err(|e| config_err(path, format!("design: {e}")))?;

    let truths = match design.endpoint {
        Endpoint::Continuous => {
            if file.grid.pi1.is_some() {
                return Err(config_err(path, "grid.pi1 is a binary-endpoint field"));
            }
            let sds = file
                .grid
                .sd_truth
                .as_ref()
                .filter(|v| !v.is_empty())
                .ok_or_else(|| config_err(path, "grid.sd_truth must list at least one value"))?;
            let delta_truth = file.grid.delta_truth.unwrap_or(design.delta1);
            sds.iter()
                .map(|&sd| {
                    if !(sd > 0.0) {
                        return Err(config_err(
                            path,
                            format!("grid.sd_truth: {sd} is not positive"),
                        ));
                    }
                    Ok(ScenarioTruth::Continuous {
                        sd_truth: sd,
                        delta_truth,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        Endpoint::Binary => {
            for (name, present) in [
                ("sd_truth", file.grid.sd_truth.is_some()),
                ("delta_truth", file.grid.delta_truth.is_some()),
            ] {
                if present {
                    return Err(config_err(
                        path,
                        format!("grid.{name} is a continuous-endpoint field"),
                    ));
                }
            }
            let pi1s = file
                .grid
                .pi1
                .as_ref()
                .filter(|v| !v.is_empty())
                .ok_or_else(|| config_err(path, "grid.pi1 must list at least one value"))?;
            pi1s.iter()
                .map(|&pi1| {
                    let pi2 = pi1 + design.delta1;
                    if !(pi1 > 0.0 && pi2 < 1.0) {
                        return Err(config_err(
                            path,
                            format!("grid.pi1: {pi1} gives rates outside (0, 1)"),
                        ));
                    }
                    Ok(ScenarioTruth::Binary { pi1, pi2 })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    let patterns = file.grid.patterns.unwrap_or_else(|| vec![Pattern::Uniform]);
    if patterns.is_empty() {
        return Err(config_err(path, "grid.patterns must not be empty"));
    }
    let delays_m = file.grid.delays_m.unwrap_or_else(default_delays);
    for &m in &delays_m {
        if !(m >= 0.0) {
            return Err(config_err(path, format!("grid.delays_m: {m} is negative")));
        }
    }

    let replicates = file.run.replicates.unwrap_or(DEFAULT_REPLICATES);
    if replicates == 0 {
        return Err(config_err(path, "run.replicates must be at least 1"));
    }
    if replicates > u32::MAX as usize {
        return Err(config_err(
            path,
            "run.replicates exceeds the stream index space",
        ));
    }
    if let Some(cap) = file.run.cap {
        if !(cap >= f64::from(design.n1)) {
            return Err(config_err(
                path,
                format!("run.cap: {cap} is below the stage-1 size {}", design.n1),
            ));
        }
    }
    let horizon_t = file.recruitment.horizon_t;
    if !(horizon_t > 0.0) {
        return Err(config_err(
            path,
            format!("recruitment.horizon_t: {horizon_t} is not positive"),
        ));
    }

    Ok(ScenarioGrid {
        design,
        truths,
        patterns,
        delays_m,
        replicates,
        base_seed: file.run.base_seed.unwrap_or(DEFAULT_BASE_SEED),
        horizon_t,
        t1_mode: file.recruitment.t1_mode,
        power_mode: file.run.power_mode.unwrap_or_default(),
        cap: file.run.cap,
        blinded_estimator: file.run.blinded_estimator.unwrap_or_default(),
    })
}

/// Parses configuration text; `path` only labels error messages.
pub fn parse_config(text: &str, path: &Path) -> Result<ScenarioGrid> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| config_err(path, e.to_string()))?;
    resolve(file, path)
}

/// Loads and validates a scenario grid from a TOML file.
pub fn load_config(path: &Path) -> Result<ScenarioGrid> {
    let text =
        std::fs::read_to_string(path).map_err(|e| config_err(path, format!("cannot read: {e}")))?;
    parse_config(&text, path)
}
