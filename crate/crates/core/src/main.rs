//! Command-line front end: planning calculators, pipeline counts, scenario
//! simulation, table reproduction and figure data.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use ssr_delay::design::{ceil_to_even, required_n_binary, required_n_continuous};
use ssr_delay::harness::{
    emit_figure_data, fmt_sig, load_config, reproduce_table, run_grid, summaries_to_csv,
    summaries_to_json, table_grid, FigureMetric, ScenarioGrid, SummaryDocument, TableId,
    TableOptions, DEFAULT_REPLICATES,
};
use ssr_delay::recruitment::{Pattern, RecruitmentPlan, T1Mode};
use ssr_delay::statdist::PowerMode;

#[derive(Parser)]
#[command(
    name = "ssr-delay",
    version,
    about = "Quantifies how delayed outcomes degrade blinded sample size re-estimation designs"
)]
struct Cli {
    /// Base seed for replicate stream derivation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replicates per scenario cell.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Worker threads (defaults to the available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Stage-1 fit under linear recruitment: table-compatible or paper-text.
    #[arg(long, global = true)]
    t1_mode: Option<T1Mode>,
    /// Power routine inside the cost metric: normal or t.
    #[arg(long, global = true)]
    power_mode: Option<PowerMode>,
    /// Write the CSV here (a full-precision JSON mirror lands next to it);
    /// stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print planning-calculator outputs for a design.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Print expected pipeline counts for a recruitment plan.
    Pipeline(PipelineArgs),
    /// Run the scenario grid described by a config file.
    Simulate {
        /// TOML scenario configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Reproduce a published table (S1, S2, S3 or S4).
    Tables { id: String },
    /// Emit long-format figure data for a grid.
    Figures {
        /// rmse, cost, impact or nstar-dist.
        #[arg(long)]
        metric: FigureMetric,
        /// TOML scenario configuration (exclusive with --table).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Use a published table's canonical grid (exclusive with --config).
        #[arg(long)]
        table: Option<String>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Continuous endpoint: 4 sd^2 (z_a + z_b)^2 / delta^2.
    Continuous {
        #[arg(long)]
        sd: f64,
        #[arg(long, default_value_t = 3.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.2)]
        beta: f64,
    },
    /// Binary endpoint: the two-proportion planning formula.
    Binary {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.2)]
        beta: f64,
    },
}

#[derive(Args)]
struct PipelineArgs {
    /// uniform or linear.
    #[arg(long)]
    pattern: PatternArg,
    /// Unrounded planning total the recruitment rate is fitted to.
    #[arg(long)]
    n_init: f64,
    /// Months to accrue the planning total.
    #[arg(long, default_value_t = 24.0)]
    horizon: f64,
    /// Stage-1 total; required for the linear pattern.
    #[arg(long)]
    n1: Option<u32>,
    /// Delay lengths in months.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<f64>,
}

#[derive(Clone, Copy)]
enum PatternArg {
    Uniform,
    Linear,
}

impl std::str::FromStr for PatternArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(PatternArg::Uniform),
            "linear" => Ok(PatternArg::Linear),
            other => Err(format!(
                "unknown pattern `{other}` (expected uniform or linear)"
            )),
        }
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        bail!("--workers must be at least 1");
    }

    match &cli.cmd {
        Cmd::Oracle(oracle) => run_oracle(oracle),
        Cmd::Pipeline(args) => run_pipeline(args, cli.t1_mode.unwrap_or_default()),
        Cmd::Simulate { config } => {
            let mut grid =
                load_config(config).with_context(|| format!("loading {}", config.display()))?;
            apply_overrides(&mut grid, &cli);
            let rows = run_grid(&grid, workers)?;
            let csv = summaries_to_csv(&rows, grid.design.endpoint);
            let doc = SummaryDocument {
                endpoint: grid.design.endpoint,
                base_seed: grid.base_seed,
                replicates: grid.replicates,
                t1_mode: grid.t1_mode,
                power_mode: grid.power_mode,
                rows: &rows,
            };
            write_output(cli.out.as_deref(), &csv, Some(&summaries_to_json(&doc)))
        }
        Cmd::Tables { id } => {
            let id: TableId = id.parse()?;
            let opts = TableOptions {
                base_seed: cli.seed.unwrap_or(ssr_delay::harness::DEFAULT_BASE_SEED),
                replicates: cli.reps.unwrap_or(DEFAULT_REPLICATES),
                t1_mode: cli.t1_mode.unwrap_or_default(),
                power_mode: cli.power_mode.unwrap_or_default(),
            };
            let (grid, rows) = reproduce_table(id, opts, workers)?;
            let csv = summaries_to_csv(&rows, grid.design.endpoint);
            let doc = SummaryDocument {
                endpoint: grid.design.endpoint,
                base_seed: grid.base_seed,
                replicates: grid.replicates,
                t1_mode: grid.t1_mode,
                power_mode: grid.power_mode,
                rows: &rows,
            };
            write_output(cli.out.as_deref(), &csv, Some(&summaries_to_json(&doc)))
        }
        Cmd::Figures {
            metric,
            config,
            table,
        } => {
            let mut grid = match (config, table) {
                (Some(path), None) => {
                    load_config(path).with_context(|| format!("loading {}", path.display()))?
                }
                (None, Some(id)) => {
                    let id: TableId = id.parse()?;
                    table_grid(
                        id,
                        TableOptions {
                            base_seed: cli.seed.unwrap_or(ssr_delay::harness::DEFAULT_BASE_SEED),
                            replicates: cli.reps.unwrap_or(DEFAULT_REPLICATES),
                            t1_mode: cli.t1_mode.unwrap_or_default(),
                            power_mode: cli.power_mode.unwrap_or_default(),
                        },
                    )
                }
                _ => bail!("figures needs exactly one of --config or --table"),
            };
            apply_overrides(&mut grid, &cli);
            let csv = emit_figure_data(&grid, *metric, workers)?;
            write_output(cli.out.as_deref(), &csv, None)
        }
    }
}

fn apply_overrides(grid: &mut ScenarioGrid, cli: &Cli) {
    if let Some(seed) = cli.seed {
        grid.base_seed = seed;
    }
    if let Some(reps) = cli.reps {
        grid.replicates = reps;
    }
    if let Some(mode) = cli.t1_mode {
        grid.t1_mode = mode;
    }
    if let Some(mode) = cli.power_mode {
        grid.power_mode = mode;
    }
}

fn run_oracle(cmd: &OracleCmd) -> anyhow::Result<()> {
    let n = match *cmd {
        OracleCmd::Continuous {
            sd,
            delta,
            alpha,
            beta,
        } => required_n_continuous(sd, delta, alpha, beta)?,
        OracleCmd::Binary {
            p1,
            p2,
            alpha,
            beta,
        } => required_n_binary(p1, p2, alpha, beta)?,
    };
    println!("n_required = {}", fmt_sig(n));
    println!("n_even     = {}", ceil_to_even(n));
    Ok(())
}

fn run_pipeline(args: &PipelineArgs, t1_mode: T1Mode) -> anyhow::Result<()> {
    let plan = match args.pattern {
        PatternArg::Uniform => RecruitmentPlan::uniform(args.n_init, args.horizon)?,
        PatternArg::Linear => {
            let n1 = args.n1.context("--n1 is required for the linear pattern")?;
            RecruitmentPlan::linear(args.n_init, args.horizon, n1, t1_mode)?
        }
    };
    if let RecruitmentPlan::Linear { gamma, t1, .. } = &plan {
        eprintln!("gamma = {}, t1 = {}", fmt_sig(*gamma), fmt_sig(*t1));
    }
    for &m in &args.m {
        if m < 0.0 {
            bail!("--m values must be non-negative (got {m})");
        }
        println!(
            "m={} n_delay={}",
            fmt_sig(m),
            fmt_sig(plan.expected_pipeline(m))
        );
    }
    Ok(())
}

/// Writes the CSV (canonical) and, when a path is given, its JSON mirror
/// with the same stem.
fn write_output(out: Option<&Path>, csv: &str, json: Option<&str>) -> anyhow::Result<()> {
    match out {
        None => {
            print!("{csv}");
            Ok(())
        }
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            if let Some(json) = json {
                let mirror = path.with_extension("json");
                std::fs::write(&mirror, json)
                    .with_context(|| format!("writing {}", mirror.display()))?;
                eprintln!("wrote {} and {}", path.display(), mirror.display());
            } else {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

impl From<PatternArg> for Pattern {
    fn from(p: PatternArg) -> Pattern {
        match p {
            PatternArg::Uniform => Pattern::Uniform,
            PatternArg::Linear => Pattern::Linear,
        }
    }
}
