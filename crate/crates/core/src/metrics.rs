//! Aggregation of replicate outcomes into the efficiency measures and
//! single-stage comparators.
//!
//! All aggregation runs in replicate-index order so summaries are
//! bit-identical regardless of how replicates were scheduled across
//! workers. Squared deviations and the cost ratio use the real-valued
//! recorded final size, which is what preserves fractional averages in the
//! fully truncated cells.

use serde::Serialize;

use crate::design::DesignSpec;
use crate::engine::{ReplicateOutcome, ScenarioTruth};
use crate::recruitment::Pattern;
use crate::statdist::{power_binary, power_continuous, PowerMode};
use crate::{Error, Result};

/// Fraction of replicates whose final size was forced to `n1 + n_delay`.
pub fn delay_impact(outcomes: &[ReplicateOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let truncated = outcomes.iter().filter(|o| o.truncated).count();
    Ok(truncated as f64 / outcomes.len() as f64)
}

/// Fraction of replicates that rejected the null.
pub fn empirical_power(outcomes: &[ReplicateOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let rejected = outcomes.iter().filter(|o| o.reject).count();
    Ok(rejected as f64 / outcomes.len() as f64)
}

/// Mean squared deviation of the recorded final size from the oracle size.
pub fn mse(outcomes: &[ReplicateOutcome], n_oracle: f64) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let sum: f64 = outcomes
        .iter()
        .map(|o| {
            let d = o.n_final_recorded - n_oracle;
            d * d
        })
        .sum();
    Ok(sum / outcomes.len() as f64)
}

/// Square root of `mse`.
pub fn rmse(outcomes: &[ReplicateOutcome], n_oracle: f64) -> Result<f64> {
    Ok(mse(outcomes, n_oracle)?.sqrt())
}

/// Power of the final test at total size `n_total` under the true nuisance
/// values.
pub fn truth_power(n_total: f64, truth: &ScenarioTruth, alpha: f64, mode: PowerMode) -> f64 {
    match *truth {
        ScenarioTruth::Continuous {
            sd_truth,
            delta_truth,
        } => power_continuous(n_total, delta_truth, sd_truth, alpha, mode),
        ScenarioTruth::Binary { pi1, pi2 } => power_binary(n_total, pi1, pi2, alpha),
    }
}

/// Mean of `(N* - n_oracle)^2 / (100 Power(N*))` over replicates, with the
/// power evaluated at the real-valued recorded size.
pub fn cost(
    outcomes: &[ReplicateOutcome],
    n_oracle: f64,
    truth: &ScenarioTruth,
    alpha: f64,
    mode: PowerMode,
) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let sum: f64 = outcomes
        .iter()
        .map(|o| cost_term(o.n_final_recorded, n_oracle, truth, alpha, mode))
        .sum();
    Ok(sum / outcomes.len() as f64)
}

fn cost_term(
    n_final: f64,
    n_oracle: f64,
    truth: &ScenarioTruth,
    alpha: f64,
    mode: PowerMode,
) -> f64 {
    let d = n_final - n_oracle;
    if d == 0.0 {
        return 0.0;
    }
    d * d / (100.0 * truth_power(n_final, truth, alpha, mode))
}

/// Deterministic comparators for the single-stage design that commits to
/// `n_init`: `(n_init - n_oracle)^2` and its cost ratio.
pub fn single_stage_metrics(
    n_init: f64,
    n_oracle: f64,
    truth: &ScenarioTruth,
    alpha: f64,
    mode: PowerMode,
) -> (f64, f64) {
    let d = n_init - n_oracle;
    let mse_single = d * d;
    let cost_single = cost_term(n_init, n_oracle, truth, alpha, mode);
    (mse_single, cost_single)
}

/// Oracle sample size for a scenario: the planning calculator evaluated at
/// the true nuisance values.
pub fn oracle_sample_size(design: &DesignSpec, truth: &ScenarioTruth) -> Result<f64> {
    match *truth {
        ScenarioTruth::Continuous { sd_truth, .. } => {
            crate::design::required_n_continuous(sd_truth, design.delta1, design.alpha, design.beta)
        }
        ScenarioTruth::Binary { pi1, pi2 } => {
            crate::design::required_n_binary(pi1, pi2, design.alpha, design.beta)
        }
    }
}

/// Monte Carlo standard errors for the simulated columns of a summary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonteCarloSe {
    pub empirical_power: f64,
    pub avg_n_final: f64,
    pub avg_blinded_estimate: f64,
    pub mse_ssr: f64,
    pub cost_ssr: f64,
    pub delay_impact: f64,
}

/// Aggregated metrics for one `(truth, pattern, m)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    /// SD label (continuous) or control success rate (binary).
    pub truth_param: f64,
    pub pattern: Pattern,
    pub m: f64,
    pub replicates: usize,
    pub empirical_power: f64,
    pub n_oracle: f64,
    pub avg_n_final: f64,
    pub n_delay: f64,
    /// Mean blinded SD estimate (continuous) or mean pooled rate (binary).
    pub avg_blinded_estimate: f64,
    pub mse_single: f64,
    pub mse_ssr: f64,
    pub rmse_ssr: f64,
    pub cost_single: f64,
    pub cost_ssr: f64,
    pub delay_impact: f64,
    pub se: MonteCarloSe,
}

/// Everything that identifies a cell besides its outcomes.
#[derive(Debug, Clone, Copy)]
pub struct CellSpec<'a> {
    pub design: &'a DesignSpec,
    pub truth: &'a ScenarioTruth,
    pub pattern: Pattern,
    pub m: f64,
    pub n_delay: f64,
    pub power_mode: PowerMode,
}

fn sample_se(values: impl Iterator<Item = f64> + Clone, mean: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n as f64 - 1.0)).sqrt() / (n as f64).sqrt()
}

fn proportion_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Aggregates one cell's outcomes into a `ScenarioSummary`.
pub fn summarize(outcomes: &[ReplicateOutcome], cell: &CellSpec) -> Result<ScenarioSummary> {
    if outcomes.is_empty() {
        return Err(Error::EmptyOutcomes);
    }
    let n = outcomes.len();
    let alpha = cell.design.alpha;
    let n_oracle = oracle_sample_size(cell.design, cell.truth)?;

    let power = empirical_power(outcomes)?;
    let impact = delay_impact(outcomes)?;
    let avg_n_final = outcomes.iter().map(|o| o.n_final_recorded).sum::<f64>() / n as f64;
    let avg_blinded = outcomes.iter().map(|o| o.blinded_estimate).sum::<f64>() / n as f64;
    let mse_ssr = mse(outcomes, n_oracle)?;
    let cost_ssr = cost(outcomes, n_oracle, cell.truth, alpha, cell.power_mode)?;
    let (mse_single, cost_single) = single_stage_metrics(
        cell.design.n_init(),
        n_oracle,
        cell.truth,
        alpha,
        cell.power_mode,
    );

    let se = MonteCarloSe {
        empirical_power: proportion_se(power, n),
        avg_n_final: sample_se(outcomes.iter().map(|o| o.n_final_recorded), avg_n_final, n),
        avg_blinded_estimate: sample_se(
            outcomes.iter().map(|o| o.blinded_estimate),
            avg_blinded,
            n,
        ),
        mse_ssr: sample_se(
            outcomes.iter().map(|o| {
                let d = o.n_final_recorded - n_oracle;
                d * d
            }),
            mse_ssr,
            n,
        ),
        cost_ssr: sample_se(
            outcomes.iter().map(|o| {
                cost_term(
                    o.n_final_recorded,
                    n_oracle,
                    cell.truth,
                    alpha,
                    cell.power_mode,
                )
            }),
            cost_ssr,
            n,
        ),
        delay_impact: proportion_se(impact, n),
    };

    Ok(ScenarioSummary {
        truth_param: cell.truth.label(),
        pattern: cell.pattern,
        m: cell.m,
        replicates: n,
        empirical_power: power,
        n_oracle,
        avg_n_final,
        n_delay: cell.n_delay,
        avg_blinded_estimate: avg_blinded,
        mse_single,
        mse_ssr,
        rmse_ssr: mse_ssr.sqrt(),
        cost_single,
        cost_ssr,
        delay_impact: impact,
        se,
    })
}
