//! Simulation of one complete trial replicate: stage-1 data, blinded
//! estimation, re-estimation, delayed final sample size, stage-2 data and
//! the final hypothesis test.

use serde::Serialize;

use crate::design::{
    ceil_to_even, reestimate_n_binary, reestimate_n_continuous, DesignSpec, Endpoint,
};
use crate::recruitment::RecruitmentPlan;
use crate::statdist::{std_normal_quantile, two_sample_t_test, RngStream};
use crate::{Error, Result};

/// True state of nature for one simulated scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "endpoint", rename_all = "lowercase")]
pub enum ScenarioTruth {
    Continuous { sd_truth: f64, delta_truth: f64 },
    Binary { pi1: f64, pi2: f64 },
}

impl ScenarioTruth {
    pub fn endpoint(&self) -> Endpoint {
        match self {
            ScenarioTruth::Continuous { .. } => Endpoint::Continuous,
            ScenarioTruth::Binary { .. } => Endpoint::Binary,
        }
    }

    /// The parameter printed in the first table column: the SD label for
    /// continuous scenarios, the control rate for binary ones.
    pub fn label(&self) -> f64 {
        match *self {
            ScenarioTruth::Continuous { sd_truth, .. } => sd_truth,
            ScenarioTruth::Binary { pi1, .. } => pi1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScenarioTruth::Continuous {
                sd_truth,
                delta_truth,
            } => {
                if !(sd_truth >= 0.0) {
                    return Err(Error::domain("sd_truth", format!("{sd_truth} is negative")));
                }
                if !delta_truth.is_finite() {
                    return Err(Error::domain("delta_truth", "must be finite"));
                }
            }
            ScenarioTruth::Binary { pi1, pi2 } => {
                for (name, p) in [("pi1", pi1), ("pi2", pi2)] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::domain(name, format!("{p} is outside [0, 1]")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Which blinded nuisance estimator drives the continuous re-estimation.
///
/// The lumped one-sample variance of all stage-1 observations is the
/// default; the within-arm pooled variance is available for comparison but
/// does not reproduce the published averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlindedEstimator {
    #[default]
    Lumped,
    PooledWithinArm,
}

/// Engine knobs that stay off for table reproduction.
#[derive(Debug, Clone, Copy, Default)]
pub struct EngineOptions {
    pub blinded_estimator: BlindedEstimator,
    /// Optional maximum total sample size. When set, the recorded and
    /// generated final sizes are clamped to `max(cap, n1)`; the truncation
    /// flag still reflects the uncapped comparison.
    pub cap: Option<f64>,
}

/// One simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicateOutcome {
    /// Lumped SD estimate (continuous) or pooled success rate (binary).
    pub blinded_estimate: f64,
    /// Real-valued re-estimated total.
    pub n_star: f64,
    /// Integer second-stage requirement: `ceil_to_even(n_star) - n1`,
    /// floored at zero.
    pub n2_star: u64,
    /// Expected pipeline count for the cell's delay.
    pub n_delay: f64,
    /// Final size entering the metrics (real-valued).
    pub n_final_recorded: f64,
    /// Even total actually simulated.
    pub n_final_generated: u64,
    /// Whether pipeline accrual set the final size.
    pub truncated: bool,
    pub reject: bool,
    pub test_stat: f64,
}

/// One-sample variance of all observations ignoring arm labels,
/// divisor n - 1.
pub fn lumped_variance(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::domain("values", "needs at least 2 observations"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    Ok(ss / (n - 1.0))
}

/// Within-arm pooled variance with n_E + n_C - 2 degrees of freedom.
pub fn pooled_within_arm_variance(arm_e: &[f64], arm_c: &[f64]) -> Result<f64> {
    if arm_e.len() < 2 || arm_c.len() < 2 {
        return Err(Error::domain(
            "arm",
            "each arm needs at least 2 observations",
        ));
    }
    let ss = |arm: &[f64]| {
        let mean = arm.iter().sum::<f64>() / arm.len() as f64;
        arm.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
    };
    let df = (arm_e.len() + arm_c.len()) as f64 - 2.0;
    Ok((ss(arm_e) + ss(arm_c)) / df)
}

/// Blinded pooled success rate `(x1 + x2) / n1`.
pub fn pooled_success_rate(x1: u64, x2: u64, n1: u64) -> Result<f64> {
    if n1 == 0 {
        return Err(Error::domain("n1", "must be positive"));
    }
    if x1 + x2 > n1 {
        return Err(Error::domain(
            "x1 + x2",
            format!("{} exceeds the stage-1 total {n1}", x1 + x2),
        ));
    }
    Ok((x1 + x2) as f64 / n1 as f64)
}

/// Final total sample size under delay: `n1 + n2_star` when the second
/// stage outruns the pipeline, `n1 + n_delay` (truncated) when
/// `n2_star <= n_delay`; ties count as truncated.
pub fn final_sample_size(n1: u32, n2_star: f64, n_delay: f64) -> (f64, bool) {
    debug_assert!(n2_star >= 0.0 && n_delay >= 0.0);
    let truncated = n2_star <= n_delay;
    let n_final = f64::from(n1) + if truncated { n_delay } else { n2_star };
    (n_final, truncated)
}

/// Normal-approximation statistic for the two-proportion test with `x1`
/// successes among n/2 controls and `x2` among n/2 treated:
/// `sqrt(n/4) (p2_hat - p1_hat) / sqrt(pbar (1 - pbar))`.
///
/// A pooled rate of exactly 0 or 1 carries no information; the statistic is
/// defined as 0 there.
pub fn binary_u_statistic(x1: u64, x2: u64, n_total: u64) -> f64 {
    debug_assert!(n_total >= 2 && n_total.is_multiple_of(2));
    debug_assert!(x1 <= n_total / 2 && x2 <= n_total / 2);
    let half = (n_total / 2) as f64;
    let pbar = (x1 + x2) as f64 / n_total as f64;
    if pbar <= 0.0 || pbar >= 1.0 {
        return 0.0;
    }
    let diff = x2 as f64 / half - x1 as f64 / half;
    (half / 2.0).sqrt() * diff / (pbar * (1.0 - pbar)).sqrt()
}

fn check_endpoint(design: &DesignSpec, truth: &ScenarioTruth, expected: Endpoint) -> Result<()> {
    if design.endpoint != expected || truth.endpoint() != expected {
        return Err(Error::domain(
            "endpoint",
            "design, truth and replicate runner must agree on the endpoint",
        ));
    }
    Ok(())
}

/// Second-stage requirement and final sizes shared by both endpoints.
fn resolve_final_size(
    design: &DesignSpec,
    n_star: f64,
    n_delay: f64,
    opts: &EngineOptions,
) -> (u64, f64, u64, bool) {
    let n1 = design.n1;
    let n2_star = ceil_to_even(n_star).saturating_sub(u64::from(n1));
    let (mut n_final_recorded, truncated) = final_sample_size(n1, n2_star as f64, n_delay);
    if let Some(cap) = opts.cap {
        n_final_recorded = n_final_recorded.min(cap.max(f64::from(n1)));
    }
    let n_final_generated = ceil_to_even(n_final_recorded);
    (n2_star, n_final_recorded, n_final_generated, truncated)
}

/// Simulates one continuous-endpoint replicate.
pub fn run_replicate_continuous(
    design: &DesignSpec,
    truth: &ScenarioTruth,
    plan: &RecruitmentPlan,
    m: f64,
    opts: &EngineOptions,
    stream: &mut RngStream,
) -> Result<ReplicateOutcome> {
    check_endpoint(design, truth, Endpoint::Continuous)?;
    truth.validate()?;
    let &ScenarioTruth::Continuous {
        sd_truth,
        delta_truth,
    } = truth
    else {
        unreachable!()
    };
    let per_arm = design.n1 as usize / 2;

    let mut arm_c = stream.draw_normal(per_arm, 0.0, sd_truth);
    let mut arm_e = stream.draw_normal(per_arm, delta_truth, sd_truth);

    let blinded_var = match opts.blinded_estimator {
        BlindedEstimator::Lumped => {
            let mut pooled = Vec::with_capacity(design.n1 as usize);
            pooled.extend_from_slice(&arm_c);
            pooled.extend_from_slice(&arm_e);
            lumped_variance(&pooled)?
        }
        BlindedEstimator::PooledWithinArm => pooled_within_arm_variance(&arm_e, &arm_c)?,
    };
    let blinded_sd = blinded_var.sqrt();
    let n_star = reestimate_n_continuous(blinded_sd, design.delta1, design.alpha, design.beta);
    let n_delay = plan.expected_pipeline(m);
    let (n2_star, n_final_recorded, n_final_generated, truncated) =
        resolve_final_size(design, n_star, n_delay, opts);

    let extra = n_final_generated as usize / 2 - per_arm;
    arm_c.extend(stream.draw_normal(extra, 0.0, sd_truth));
    arm_e.extend(stream.draw_normal(extra, delta_truth, sd_truth));
    let (test_stat, reject) = two_sample_t_test(&arm_e, &arm_c, design.alpha)?;

    Ok(ReplicateOutcome {
        blinded_estimate: blinded_sd,
        n_star,
        n2_star,
        n_delay,
        n_final_recorded,
        n_final_generated,
        truncated,
        reject,
        test_stat,
    })
}

/// Simulates one binary-endpoint replicate.
pub fn run_replicate_binary(
    design: &DesignSpec,
    truth: &ScenarioTruth,
    plan: &RecruitmentPlan,
    m: f64,
    opts: &EngineOptions,
    stream: &mut RngStream,
) -> Result<ReplicateOutcome> {
    check_endpoint(design, truth, Endpoint::Binary)?;
    truth.validate()?;
    let &ScenarioTruth::Binary { pi1, pi2 } = truth else {
        unreachable!()
    };
    let per_arm = design.n1 as usize / 2;

    let stage1_c = stream.draw_bernoulli(per_arm, pi1);
    let stage1_e = stream.draw_bernoulli(per_arm, pi2);
    let x11 = stage1_c.iter().map(|&b| u64::from(b)).sum::<u64>();
    let x12 = stage1_e.iter().map(|&b| u64::from(b)).sum::<u64>();
    let p = pooled_success_rate(x11, x12, u64::from(design.n1))?;

    let n_star = reestimate_n_binary(p, design.delta1, design.alpha, design.beta);
    let n_delay = plan.expected_pipeline(m);
    let (n2_star, n_final_recorded, n_final_generated, truncated) =
        resolve_final_size(design, n_star, n_delay, opts);

    let extra = n_final_generated as usize / 2 - per_arm;
    let x1 = x11
        + stream
            .draw_bernoulli(extra, pi1)
            .iter()
            .map(|&b| u64::from(b))
            .sum::<u64>();
    let x2 = x12
        + stream
            .draw_bernoulli(extra, pi2)
            .iter()
            .map(|&b| u64::from(b))
            .sum::<u64>();
    let u = binary_u_statistic(x1, x2, n_final_generated);
    let reject = u > std_normal_quantile(1.0 - design.alpha)?;

    Ok(ReplicateOutcome {
        blinded_estimate: p,
        n_star,
        n2_star,
        n_delay,
        n_final_recorded,
        n_final_generated,
        truncated,
        reject,
        test_stat: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recruitment::T1Mode;
    use approx::assert_abs_diff_eq;

    fn continuous_design() -> DesignSpec {
        DesignSpec::continuous(0.05, 0.2, 3.5, 10.0, 70).unwrap()
    }

    fn binary_design() -> DesignSpec {
        DesignSpec::binary(0.05, 0.2, 0.3, 0.55, 30).unwrap()
    }

    #[test]
    fn lumped_variance_hand_values() {
        assert_abs_diff_eq!(
            lumped_variance(&[0.0, 0.0, 2.0, 2.0]).unwrap(),
            4.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(lumped_variance(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert!(lumped_variance(&[1.0]).is_err());
    }

    #[test]
    fn pooled_variance_hand_values() {
        assert_abs_diff_eq!(
            pooled_within_arm_variance(&[0.0, 2.0], &[0.0, 2.0]).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_eq!(
            pooled_within_arm_variance(&[1.0, 1.0], &[4.0, 4.0]).unwrap(),
            0.0
        );
        assert!(pooled_within_arm_variance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn lumped_and_pooled_estimators_differ() {
        // Same data, opposite labels: pooled sees within-arm spread only.
        let pooled = pooled_within_arm_variance(&[0.0, 2.0], &[2.0, 0.0]).unwrap();
        let lumped = lumped_variance(&[0.0, 2.0, 2.0, 0.0]).unwrap();
        assert_abs_diff_eq!(pooled, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lumped, 4.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn pooled_success_rate_examples() {
        assert_eq!(pooled_success_rate(5, 10, 30).unwrap(), 0.5);
        assert_eq!(pooled_success_rate(0, 0, 30).unwrap(), 0.0);
        assert_abs_diff_eq!(
            pooled_success_rate(3, 7, 30).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        assert!(pooled_success_rate(20, 20, 30).is_err());
        assert!(pooled_success_rate(1, 1, 0).is_err());
    }

    #[test]
    fn final_sample_size_branches() {
        assert_eq!(final_sample_size(70, 140.0, 100.0), (210.0, false));
        assert_eq!(final_sample_size(70, 80.0, 100.0), (170.0, true));
        // Tie goes to the truncated branch.
        assert_eq!(final_sample_size(70, 100.0, 100.0), (170.0, true));
    }

    #[test]
    fn u_statistic_values() {
        assert_eq!(binary_u_statistic(4, 4, 20), 0.0);
        assert_abs_diff_eq!(binary_u_statistic(3, 7, 20), 1.78885, epsilon = 1e-4);
        assert_eq!(binary_u_statistic(0, 0, 20), 0.0);
        assert_eq!(binary_u_statistic(10, 10, 20), 0.0);
        // Antisymmetric in the arms.
        assert_abs_diff_eq!(
            binary_u_statistic(7, 3, 20),
            -binary_u_statistic(3, 7, 20),
            epsilon = 1e-15
        );
    }

    #[test]
    fn degenerate_continuous_truth_truncates() {
        let design = continuous_design();
        let truth = ScenarioTruth::Continuous {
            sd_truth: 0.0,
            delta_truth: 0.0,
        };
        let plan = RecruitmentPlan::uniform(design.n_init(), 24.0).unwrap();
        let mut stream = RngStream::derive(1, 0, 0);
        let out = run_replicate_continuous(
            &design,
            &truth,
            &plan,
            6.0,
            &EngineOptions::default(),
            &mut stream,
        )
        .unwrap();
        assert_eq!(out.blinded_estimate, 0.0);
        assert_eq!(out.n2_star, 0);
        assert!(out.truncated);
        assert_abs_diff_eq!(
            out.n_final_recorded,
            70.0 + plan.expected_pipeline(6.0),
            epsilon = 1e-12
        );
        assert!(!out.reject);
    }

    #[test]
    fn same_stream_reproduces_the_outcome() {
        let design = continuous_design();
        let truth = ScenarioTruth::Continuous {
            sd_truth: 10.0,
            delta_truth: 3.5,
        };
        let plan = RecruitmentPlan::uniform(design.n_init(), 24.0).unwrap();
        let run = |seed| {
            let mut stream = RngStream::derive(seed, 2, 77);
            run_replicate_continuous(
                &design,
                &truth,
                &plan,
                12.0,
                &EngineOptions::default(),
                &mut stream,
            )
            .unwrap()
        };
        assert_eq!(run(99), run(99));
        assert_ne!(run(99), run(100));
    }

    #[test]
    fn degenerate_binary_truth_truncates() {
        let design = binary_design();
        let truth = ScenarioTruth::Binary { pi1: 0.0, pi2: 0.0 };
        let plan = RecruitmentPlan::uniform(design.n_init(), 24.0).unwrap();
        let mut stream = RngStream::derive(5, 0, 3);
        let out = run_replicate_binary(
            &design,
            &truth,
            &plan,
            3.0,
            &EngineOptions::default(),
            &mut stream,
        )
        .unwrap();
        assert_eq!(out.blinded_estimate, 0.0);
        assert_eq!(out.n_star, 0.0);
        assert!(out.truncated);
        assert!(!out.reject);
    }

    #[test]
    fn outcome_invariants_hold_over_a_small_run() {
        let design = continuous_design();
        let truth = ScenarioTruth::Continuous {
            sd_truth: 8.0,
            delta_truth: 3.5,
        };
        let plan =
            RecruitmentPlan::linear(design.n_init(), 24.0, 70, T1Mode::TableCompatible).unwrap();
        for idx in 0..200 {
            let mut stream = RngStream::derive(7, 1, idx);
            let out = run_replicate_continuous(
                &design,
                &truth,
                &plan,
                9.0,
                &EngineOptions::default(),
                &mut stream,
            )
            .unwrap();
            assert!(out.n_final_recorded >= 70.0 + out.n_delay - 1e-12);
            assert_eq!(out.truncated, out.n2_star as f64 <= out.n_delay);
            let expected = 70.0 + (out.n2_star as f64).max(out.n_delay);
            assert_abs_diff_eq!(out.n_final_recorded, expected, epsilon = 1e-12);
            assert_eq!(out.n_final_generated % 2, 0);
            assert!(out.n_final_generated >= 70);
            assert!(out.n_final_generated as f64 >= out.n_final_recorded);
        }
    }

    #[test]
    fn cap_clamps_the_final_size() {
        let design = continuous_design();
        let truth = ScenarioTruth::Continuous {
            sd_truth: 12.0,
            delta_truth: 3.5,
        };
        let plan = RecruitmentPlan::uniform(design.n_init(), 24.0).unwrap();
        let opts = EngineOptions {
            cap: Some(150.0),
            ..Default::default()
        };
        let mut stream = RngStream::derive(11, 0, 0);
        let out =
            run_replicate_continuous(&design, &truth, &plan, 24.0, &opts, &mut stream).unwrap();
        assert!(out.n_final_recorded <= 150.0);
        assert!(out.n_final_generated <= 150);
    }

    #[test]
    fn endpoint_mismatch_is_rejected() {
        let design = continuous_design();
        let truth = ScenarioTruth::Binary {
            pi1: 0.3,
            pi2: 0.55,
        };
        let plan = RecruitmentPlan::uniform(design.n_init(), 24.0).unwrap();
        let mut stream = RngStream::derive(1, 0, 0);
        assert!(run_replicate_continuous(
            &design,
            &truth,
            &plan,
            0.0,
            &EngineOptions::default(),
            &mut stream
        )
        .is_err());
        assert!(run_replicate_binary(
            &design,
            &truth,
            &plan,
            0.0,
            &EngineOptions::default(),
            &mut stream
        )
        .is_err());
    }
}
