//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line (visible with `--nocapture`).
//!
//! Deterministic criteria hit the calculators directly; Monte Carlo
//! criteria run 10,000 replicates per cell with the default base seed and
//! compare against the published values at roughly three Monte Carlo
//! standard errors.

use std::time::Instant;

use ssr_delay::design::{
    reestimate_n_binary, required_n_binary, required_n_continuous, DesignSpec,
};
use ssr_delay::engine::{lumped_variance, pooled_success_rate, ScenarioTruth};
use ssr_delay::harness::{
    build_plan, derive_stream, run_cell, run_grid, summaries_to_csv, table_grid, TableId,
    TableOptions,
};
use ssr_delay::metrics::{mse, oracle_sample_size, ScenarioSummary};
use ssr_delay::recruitment::{
    linear_gamma, linear_t1, pipeline_linear, pipeline_uniform, uniform_rate, Pattern,
    RecruitmentPlan, T1Mode,
};
use ssr_delay::statdist::RngStream;

fn check(criterion: &str, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn full_table(id: TableId) -> Vec<ScenarioSummary> {
    let grid = table_grid(id, TableOptions::default());
    run_grid(&grid, 2).expect("table grid runs")
}

fn row(rows: &[ScenarioSummary], truth_param: f64, m: f64) -> &ScenarioSummary {
    rows.iter()
        .find(|r| r.truth_param == truth_param && r.m == m)
        .expect("row present")
}

#[test]
fn criterion_01_continuous_oracle_sizes() {
    let cases = [(8.0, 129.20), (10.0, 201.88), (12.0, 290.71)];
    let mut detail = String::new();
    let mut ok = true;
    for (sd, want) in cases {
        let got = required_n_continuous(sd, 3.5, 0.05, 0.2).unwrap();
        ok &= within(got, want, 0.01);
        detail.push_str(&format!("n({sd}) = {got:.4}; "));
    }
    check("01 continuous oracle sizes", ok, &detail);
}

#[test]
fn criterion_02_binary_oracle_sizes() {
    let cases = [(0.1, 66.872), (0.3, 94.580), (0.5, 90.622)];
    let mut detail = String::new();
    let mut ok = true;
    for (p1, want) in cases {
        let got = required_n_binary(p1, p1 + 0.25, 0.05, 0.2).unwrap();
        ok &= within(got, want, 0.05);
        detail.push_str(&format!("n({p1}) = {got:.4}; "));
    }
    check("02 binary oracle sizes", ok, &detail);
}

#[test]
fn criterion_03_uniform_pipeline() {
    let n_cont = required_n_continuous(10.0, 3.5, 0.05, 0.2).unwrap();
    let rate = uniform_rate(n_cont, 24.0);
    let wants = [25.23, 50.47, 75.70, 100.94, 126.17, 151.41, 176.64, 201.88];
    let mut ok = true;
    for (k, want) in wants.iter().enumerate() {
        let m = 3.0 * (k + 1) as f64;
        ok &= within(pipeline_uniform(m, rate), *want, 0.01);
    }
    let n_bin = required_n_binary(0.3, 0.55, 0.05, 0.2).unwrap();
    let got_bin = pipeline_uniform(3.0, uniform_rate(n_bin, 24.0));
    ok &= within(got_bin, 11.822, 0.005);
    check(
        "03 uniform pipeline",
        ok,
        &format!("continuous m=3..24 match; binary m=3 -> {got_bin:.4}"),
    );
}

#[test]
fn criterion_04_linear_pipeline_table_compatible() {
    let n_cont = required_n_continuous(10.0, 3.5, 0.05, 0.2).unwrap();
    let gamma = linear_gamma(n_cont, 24.0);
    let t1 = linear_t1(35.0, gamma);
    let mut ok = true;
    let mut detail = String::new();
    for (m, want) in [(3.0, 23.64), (6.0, 53.34), (12.0, 130.91), (24.0, 358.72)] {
        let got = pipeline_linear(m, gamma, t1);
        ok &= within(got, want, 0.25);
        detail.push_str(&format!("m={m} -> {got:.3}; "));
    }
    let n_bin = required_n_binary(0.3, 0.55, 0.05, 0.2).unwrap();
    let gamma_b = linear_gamma(n_bin, 24.0);
    let t1_b = linear_t1(15.0, gamma_b);
    let got_b = pipeline_linear(3.0, gamma_b, t1_b);
    ok &= within(got_b, 10.657, 0.05);
    detail.push_str(&format!("binary m=3 -> {got_b:.4}"));
    check("04 linear pipeline (table-compatible)", ok, &detail);
}

#[test]
fn criterion_05_single_stage_metrics() {
    use ssr_delay::metrics::single_stage_metrics;
    use ssr_delay::statdist::PowerMode;

    let design_c = DesignSpec::continuous(0.05, 0.2, 3.5, 10.0, 70).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for (sd, want) in [(8.0, 5281.89), (12.0, 7890.23)] {
        let truth = ScenarioTruth::Continuous {
            sd_truth: sd,
            delta_truth: 3.5,
        };
        let oracle = oracle_sample_size(&design_c, &truth).unwrap();
        let (mse_single, _) =
            single_stage_metrics(design_c.n_init(), oracle, &truth, 0.05, PowerMode::Normal);
        ok &= within(mse_single, want, 0.5);
        detail.push_str(&format!("mse({sd}) = {mse_single:.2}; "));
    }

    let design_b = DesignSpec::binary(0.05, 0.2, 0.3, 0.55, 30).unwrap();
    let binary_cases = [
        (0.1, 767.704, Some(8.457)),
        (0.3, 0.0, None),
        (0.5, 15.665, Some(0.192)),
    ];
    for (pi1, want_mse, want_cost) in binary_cases {
        let truth = ScenarioTruth::Binary {
            pi1,
            pi2: pi1 + 0.25,
        };
        let oracle = oracle_sample_size(&design_b, &truth).unwrap();
        let (mse_single, cost_single) =
            single_stage_metrics(design_b.n_init(), oracle, &truth, 0.05, PowerMode::Normal);
        ok &= within(mse_single, want_mse, 0.5);
        match want_cost {
            Some(want) => ok &= within(cost_single, want, 0.02 * want),
            None => ok &= cost_single == 0.0,
        }
        detail.push_str(&format!(
            "binary({pi1}): mse {mse_single:.3} cost {cost_single:.4}; "
        ));
    }
    check("05 single-stage metrics", ok, &detail);
}

#[test]
fn criterion_06_binary_full_truncation_cell() {
    let grid = table_grid(TableId::S3, TableOptions::default());
    let truth = ScenarioTruth::Binary {
        pi1: 0.3,
        pi2: 0.55,
    };
    let plan = build_plan(&grid, Pattern::Uniform).unwrap();
    let outcomes = run_cell(&grid, &truth, &plan, 18.0, 1).unwrap();

    let n_delay = plan.expected_pipeline(18.0);
    let truncated = outcomes.iter().filter(|o| o.truncated).count();
    let avg = outcomes.iter().map(|o| o.n_final_recorded).sum::<f64>() / outcomes.len() as f64;
    let max_n2 = reestimate_n_binary(0.5, 0.25, 0.05, 0.2) - 30.0;

    // With every replicate truncated the spread is zero, so the MSE is the
    // squared offset of the forced size from the oracle size.
    let n_oracle = oracle_sample_size(&grid.design, &truth).unwrap();
    let mse_cell = mse(&outcomes, n_oracle).unwrap();
    let forced = 30.0 + n_delay - n_oracle;

    let ok = truncated == outcomes.len()
        && within(avg, 30.0 + n_delay, 1e-6)
        && within(avg, 100.935, 0.005)
        && max_n2 < n_delay
        && within(mse_cell, forced * forced, 1e-9 * mse_cell.max(1.0));
    check(
        "06 binary full-truncation cell",
        ok,
        &format!(
            "impact = {}/{}, avg N* = {avg:.6}, max n2* = {max_n2:.2} < n_delay = {n_delay:.3}",
            truncated,
            outcomes.len()
        ),
    );
}

#[test]
fn criterion_07_table_s1_sd10_m0() {
    let rows = full_table(TableId::S1);
    let r = row(&rows, 10.0, 0.0);
    let ok = within(r.empirical_power, 0.793, 0.015)
        && within(r.avg_n_final, 208.79, 1.5)
        && within(r.mse_ssr, 1291.0, 0.15 * 1291.0)
        && within(r.delay_impact, 0.0, 0.005);
    check(
        "07 S1 sd 10 m 0",
        ok,
        &format!(
            "power {:.4}, avg N* {:.2}, MSE {:.1}, impact {:.4}",
            r.empirical_power, r.avg_n_final, r.mse_ssr, r.delay_impact
        ),
    );
}

#[test]
fn criterion_08_table_s1_sd8_m12() {
    let rows = full_table(TableId::S1);
    let r = row(&rows, 8.0, 12.0);
    let ok = within(r.delay_impact, 0.92, 0.02)
        && within(r.empirical_power, 0.886, 0.015)
        && within(r.avg_n_final, 171.9, 2.0);
    check(
        "08 S1 sd 8 m 12",
        ok,
        &format!(
            "impact {:.4}, power {:.4}, avg N* {:.2}",
            r.delay_impact, r.empirical_power, r.avg_n_final
        ),
    );
}

#[test]
fn criterion_09_table_s1_sd12_m24() {
    let rows = full_table(TableId::S1);
    let r = row(&rows, 12.0, 24.0);
    let ok = within(r.delay_impact, 0.33, 0.02)
        && within(r.avg_n_final, 306.5, 2.0)
        && within(r.empirical_power, 0.812, 0.015);
    check(
        "09 S1 sd 12 m 24",
        ok,
        &format!(
            "impact {:.4}, avg N* {:.2}, power {:.4}",
            r.delay_impact, r.avg_n_final, r.empirical_power
        ),
    );
}

#[test]
fn criterion_10_table_s2_sd8_m24_linear() {
    let rows = full_table(TableId::S2);
    let r = row(&rows, 8.0, 24.0);
    let ok = within(r.avg_n_final, 428.6, 1.0)
        && within(r.empirical_power, 0.998, 0.003)
        && r.delay_impact >= 0.995;
    check(
        "10 S2 sd 8 m 24",
        ok,
        &format!(
            "avg N* {:.2}, power {:.4}, impact {:.4}",
            r.avg_n_final, r.empirical_power, r.delay_impact
        ),
    );
}

#[test]
fn criterion_11_table_s3_pi01_m12() {
    let rows = full_table(TableId::S3);
    let r = row(&rows, 0.1, 12.0);
    let ok = within(r.delay_impact, 0.652, 0.03)
        && within(r.empirical_power, 0.874, 0.015)
        && within(r.avg_n_final, 79.4, 1.0);
    check(
        "11 S3 pi1 0.1 m 12",
        ok,
        &format!(
            "impact {:.4}, power {:.4}, avg N* {:.2}",
            r.delay_impact, r.empirical_power, r.avg_n_final
        ),
    );
}

#[test]
fn criterion_12_rmse_dip_at_m15() {
    let grid = table_grid(TableId::S1, TableOptions::default());
    let truth = ScenarioTruth::Continuous {
        sd_truth: 10.0,
        delta_truth: 3.5,
    };
    let plan = build_plan(&grid, Pattern::Uniform).unwrap();
    // Family 1 is the sd-10 block of the S1 grid; crucially the same
    // family for both delays, giving common random numbers.
    let at_m0 = run_cell(&grid, &truth, &plan, 0.0, 1).unwrap();
    let at_m15 = run_cell(&grid, &truth, &plan, 15.0, 1).unwrap();
    let n_oracle = oracle_sample_size(&grid.design, &truth).unwrap();

    let mse0 = mse(&at_m0, n_oracle).unwrap();
    let mse15 = mse(&at_m15, n_oracle).unwrap();

    // Paired per-replicate differences under common random numbers.
    let diffs: Vec<f64> = at_m15
        .iter()
        .zip(&at_m0)
        .map(|(a, b)| {
            let da = a.n_final_recorded - n_oracle;
            let db = b.n_final_recorded - n_oracle;
            da * da - db * db
        })
        .collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    // One-sided 99% confidence that the dip is real.
    let significant = mean + 2.326 * se < 0.0;

    let ok = within(mse15, 907.0, 0.15 * 907.0)
        && within(mse0, 1291.0, 0.15 * 1291.0)
        && mse15 < mse0
        && significant;
    check(
        "12 RMSE dip at m 15",
        ok,
        &format!("MSE(0) = {mse0:.1}, MSE(15) = {mse15:.1}, paired diff {mean:.1} +/- {se:.1}"),
    );
}

#[test]
fn criterion_13_lumped_variance_expectation() {
    let grid = {
        let mut g = table_grid(TableId::S1, TableOptions::default());
        g.delays_m = vec![0.0];
        g
    };
    let plan = build_plan(&grid, Pattern::Uniform).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for (family, sd) in [(0u32, 8.0), (1, 10.0), (2, 12.0)] {
        let truth = ScenarioTruth::Continuous {
            sd_truth: sd,
            delta_truth: 3.5,
        };
        let outcomes = run_cell(&grid, &truth, &plan, 0.0, family).unwrap();
        let n = outcomes.len() as f64;
        let vars: Vec<f64> = outcomes
            .iter()
            .map(|o| o.blinded_estimate * o.blinded_estimate)
            .collect();
        let mean = vars.iter().sum::<f64>() / n;
        let sample_var = vars.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let se = (sample_var / n).sqrt();
        // E[s^2] = sigma^2 + n1 delta^2 / (4 (n1 - 1)) for the lumped
        // estimator over n1 = 70 observations.
        let expect = sd * sd + 70.0 * 3.5 * 3.5 / (4.0 * 69.0);
        ok &= (mean - expect).abs() <= 3.0 * se;
        detail.push_str(&format!(
            "sd {sd}: mean {mean:.3} vs {expect:.3} (se {se:.3}); "
        ));
    }
    check("13 lumped-variance expectation", ok, &detail);
}

#[test]
fn criterion_14_common_random_numbers_monotonicity() {
    let grid = table_grid(TableId::S1, TableOptions::default());
    let truth = ScenarioTruth::Continuous {
        sd_truth: 10.0,
        delta_truth: 3.5,
    };
    let plan = build_plan(&grid, Pattern::Uniform).unwrap();
    let mut violations = 0usize;
    let mut prev: Option<Vec<(bool, f64)>> = None;
    for m in 0..=24 {
        let outcomes = run_cell(&grid, &truth, &plan, f64::from(m), 1).unwrap();
        let state: Vec<(bool, f64)> = outcomes
            .iter()
            .map(|o| (o.truncated, o.n_final_recorded))
            .collect();
        if let Some(prev) = &prev {
            for ((was_trunc, was_n), (is_trunc, is_n)) in prev.iter().zip(&state) {
                if (*was_trunc && !*is_trunc) || *is_n < *was_n - 1e-12 {
                    violations += 1;
                }
            }
        }
        prev = Some(state);
    }
    check(
        "14 CRN monotonicity over m",
        violations == 0,
        &format!("{violations} violations across 10,000 replicates and m = 0..=24"),
    );
}

#[test]
fn criterion_15_worker_count_determinism() {
    let bin = env!("CARGO_BIN_EXE_ssr-delay");
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: u32, name: &str| {
        let out = dir.path().join(name);
        let status = std::process::Command::new(bin)
            .args([
                "tables",
                "S1",
                "--seed",
                "42",
                "--workers",
                &workers.to_string(),
                "--out",
            ])
            .arg(&out)
            .status()
            .expect("binary runs");
        assert!(status.success());
        std::fs::read(&out).unwrap()
    };
    let csv1 = run(1, "w1.csv");
    let csv8 = run(8, "w8.csv");
    check(
        "15 determinism across worker counts",
        csv1 == csv8,
        &format!("{} bytes, byte-identical = {}", csv1.len(), csv1 == csv8),
    );
}

#[test]
fn criterion_16_blindness() {
    // Binary: the re-estimated size depends on stage-1 data only through
    // x1 + x2. Exhaustive over all splits at n1 = 30.
    let mut ok = true;
    for s in 0u64..=30 {
        let mut seen: Option<u64> = None;
        let lo = s.saturating_sub(15);
        let hi = s.min(15);
        for x1 in lo..=hi {
            let p = pooled_success_rate(x1, s - x1, 30).unwrap();
            let n_star = reestimate_n_binary(p, 0.25, 0.05, 0.2);
            match seen {
                None => seen = Some(n_star.to_bits()),
                Some(bits) => ok &= bits == n_star.to_bits(),
            }
        }
    }

    // Continuous: the lumped estimator ignores arm labels, so relabelling
    // leaves the re-estimated size unchanged.
    let mut worst_rel: f64 = 0.0;
    for idx in 0..200 {
        let mut stream = RngStream::derive(7, 0, idx);
        let c = stream.draw_normal(35, 0.0, 10.0);
        let e = stream.draw_normal(35, 3.5, 10.0);
        let mut as_drawn: Vec<f64> = Vec::with_capacity(70);
        as_drawn.extend_from_slice(&c);
        as_drawn.extend_from_slice(&e);
        let mut relabelled: Vec<f64> = Vec::with_capacity(70);
        relabelled.extend_from_slice(&e);
        relabelled.extend_from_slice(&c);
        let v1 = lumped_variance(&as_drawn).unwrap();
        let v2 = lumped_variance(&relabelled).unwrap();
        let n1 = ssr_delay::design::reestimate_n_continuous(v1.sqrt(), 3.5, 0.05, 0.2);
        let n2 = ssr_delay::design::reestimate_n_continuous(v2.sqrt(), 3.5, 0.05, 0.2);
        worst_rel = worst_rel.max((n1 - n2).abs() / n1.max(1.0));
    }
    ok &= worst_rel < 1e-12;
    check(
        "16 blindness",
        ok,
        &format!("binary exhaustive over x1+x2; continuous relabel rel err {worst_rel:.2e}"),
    );
}

#[test]
fn criterion_17_runtime_budget() {
    let s1 = table_grid(TableId::S1, TableOptions::default());
    let s2 = table_grid(TableId::S2, TableOptions::default());

    let start = Instant::now();
    let rows1 = run_grid(&s1, 1).unwrap();
    let rows2 = run_grid(&s2, 1).unwrap();
    let single = start.elapsed();

    let start = Instant::now();
    let rows1_par = run_grid(&s1, 8).unwrap();
    let rows2_par = run_grid(&s2, 8).unwrap();
    let parallel = start.elapsed();

    // Emitted rows satisfy the floor avg N* >= n1 + n_delay.
    let mut floor_ok = true;
    for r in rows1
        .iter()
        .chain(&rows2)
        .chain(&rows1_par)
        .chain(&rows2_par)
    {
        floor_ok &= r.avg_n_final >= 70.0 + r.n_delay - 1e-9;
    }
    assert_eq!(rows1.len() + rows2.len(), 54);
    // Keep the emitters exercised on the full output.
    let csv = summaries_to_csv(&rows1, s1.design.endpoint);
    assert_eq!(csv.lines().count(), 28);

    let ok = single.as_secs_f64() < 60.0 && parallel.as_secs_f64() < 10.0 && floor_ok;
    check(
        "17 runtime budget",
        ok,
        &format!(
            "54 cells x 10^4: single-threaded {:.2}s (< 60s), 8 workers {:.2}s (< 10s)",
            single.as_secs_f64(),
            parallel.as_secs_f64()
        ),
    );
}

// Spot checks of further published cells beyond the numbered criteria.

#[test]
fn table_s1_spot_checks() {
    let rows = full_table(TableId::S1);
    let quiet = row(&rows, 12.0, 0.0);
    assert!(quiet.delay_impact <= 0.005, "impact {}", quiet.delay_impact);
    let overpowered = row(&rows, 8.0, 24.0);
    assert!(
        within(overpowered.empirical_power, 0.971, 0.015),
        "power {}",
        overpowered.empirical_power
    );
    let cost_cell = row(&rows, 10.0, 0.0);
    assert!(
        within(cost_cell.cost_ssr, 15.6, 0.15 * 15.6),
        "cost {}",
        cost_cell.cost_ssr
    );
}

#[test]
fn table_s3_spot_checks() {
    let rows = full_table(TableId::S3);
    let r = row(&rows, 0.3, 24.0);
    assert!(
        within(r.empirical_power, 0.885, 0.015),
        "power {}",
        r.empirical_power
    );
    // Every replicate is forced to n1 + n_delay here.
    assert_eq!(r.delay_impact, 1.0);
    assert!(within(r.mse_ssr, 900.0, 0.5), "mse {}", r.mse_ssr);
}

#[test]
fn stream_triples_are_reproducible() {
    let mut a = derive_stream(42, 7, 1234);
    let mut b = derive_stream(42, 7, 1234);
    assert_eq!(a.draw_normal(8, 0.0, 1.0), b.draw_normal(8, 0.0, 1.0));
    let plan = RecruitmentPlan::linear(201.879, 24.0, 70, T1Mode::PaperText).unwrap();
    assert!(plan.expected_pipeline(3.0) > 0.0);
}
