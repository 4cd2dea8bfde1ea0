use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridflex::config::ScenarioConfig;
use gridflex::sim::run_campaign;
use gridflex::wind::{estimate_dtmc, synth, ErrorSeries};
use gridflex::GridflexError;

#[derive(Parser)]
#[command(
    name = "gridflex",
    version,
    about = "Predictive frequency control for grids with wind and batteries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a wind forecast-error Markov chain from a history CSV
    Estimate(EstimateArgs),
    /// Run a batch of seeded closed-loop simulations from a scenario config
    Run(RunArgs),
    /// Generate a synthetic wind history CSV from a seeded AR(1) process
    Synth(SynthArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// History CSV with columns timestamp,forecast_mw,actual_mw
    #[arg(long)]
    input: PathBuf,
    /// Number of uniform error bins
    #[arg(long, default_value_t = gridflex::wind::DEFAULT_BINS)]
    bins: usize,
    /// Output path of the chain model (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Refine the series to this many times its native resolution by
    /// linear interpolation before estimating
    #[arg(long, default_value_t = 1)]
    refine: usize,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (JSON); relative paths inside it resolve against
    /// its directory
    #[arg(long)]
    config: PathBuf,
    /// Override the config's grid: a preset name or a grid JSON path
    #[arg(long)]
    grid: Option<String>,
    /// Override the config's discretization level
    #[arg(long)]
    lambda: Option<usize>,
    /// Override the config's exploration horizon, in seconds; must be a
    /// multiple of the grid's control step
    #[arg(long)]
    horizon_s: Option<f64>,
    /// Override the config's number of control steps per run
    #[arg(long)]
    control_steps: Option<usize>,
    /// Number of independent runs
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Base seed; run i uses seed + i
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for campaign.json and summary.csv
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of samples
    #[arg(long, default_value_t = 8640)]
    samples: usize,
    /// Sample spacing (s)
    #[arg(long, default_value_t = 300.0)]
    dt: f64,
    /// One-step autocorrelation of the error, in (-1, 1)
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    /// Stationary standard deviation of the error (MW)
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Constant forecast level (MW)
    #[arg(long, default_value_t = 1.0)]
    base_power: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn estimate(args: &EstimateArgs) -> gridflex::Result<()> {
    let mut series = ErrorSeries::from_csv(&args.input)?;
    if args.refine == 0 {
        return Err(GridflexError::Argument("refine must be at least 1".into()));
    }
    if args.refine > 1 {
        series = gridflex::wind::interpolate(&series, args.refine as f64)?;
    }
    let dtmc = estimate_dtmc(&series, args.bins)?;
    dtmc.to_json_file(&args.out)?;
    println!(
        "estimated {} states from {} samples; diagonal dominance {:.4}",
        dtmc.n_states(),
        series.len(),
        dtmc.diagonal_dominance()
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

fn run(args: &RunArgs) -> gridflex::Result<()> {
    let mut config = ScenarioConfig::from_json_file(&args.config)?;
    if let Some(grid) = &args.grid {
        config.grid = if grid.ends_with(".json") || grid.contains('/') {
            gridflex::config::GridSource::Path { path: grid.into() }
        } else {
            gridflex::config::GridSource::Preset {
                preset: grid.clone(),
            }
        };
    }
    if let Some(lambda) = args.lambda {
        config.lambda = lambda;
    }
    if let Some(steps) = args.control_steps {
        config.control_steps = steps;
    }
    let base_dir = args
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    if let Some(horizon_s) = args.horizon_s {
        // Converting needs the grid's control step; resolve it the same
        // way the scenario build will.
        let dt = match &config.grid {
            gridflex::config::GridSource::Preset { preset } => {
                gridflex::config::preset_grid(preset)?.dt
            }
            gridflex::config::GridSource::Path { path } => {
                let resolved = if path.is_absolute() {
                    path.clone()
                } else {
                    base_dir.join(path)
                };
                gridflex::grid::GridSpec::from_json_file(&resolved)?.dt
            }
        };
        let steps = horizon_s / dt;
        if steps < 1.0 || (steps - steps.round()).abs() > 1e-9 {
            return Err(GridflexError::Argument(format!(
                "horizon {horizon_s} s is not a positive multiple of the control step {dt} s"
            )));
        }
        config.horizon_steps = steps.round() as usize;
    }
    let scenario = config.build(&base_dir)?;

    let campaign = run_campaign(&scenario, args.seed, args.runs)?;

    std::fs::create_dir_all(&args.out)?;
    campaign.to_json_file(&args.out.join("campaign.json"))?;
    let summary = std::fs::File::create(args.out.join("summary.csv"))?;
    campaign.to_summary_csv(summary)?;

    println!(
        "{} runs, {} failed (rate {:.3})",
        campaign.n_runs, campaign.n_failed, campaign.failure_rate
    );
    match &campaign.aggregate {
        Some(agg) => println!(
            "J = {:.6} +/- {:.6} Hz*h (95% CI over {} runs)",
            agg.mean_j_hz_h, agg.ci95_half_width, agg.n_runs_used
        ),
        None => println!("J unavailable: every run failed"),
    }
    println!(
        "mean per-iteration solve time {:.4} s, mean tree size {:.1} states / {:.1} actions",
        campaign.mean_solve_time_s, campaign.mean_states, campaign.mean_actions
    );
    println!("wrote {}", args.out.display());
    if campaign.aggregate.is_none() {
        return Err(GridflexError::DegenerateCampaign);
    }
    Ok(())
}

fn synth(args: &SynthArgs) -> gridflex::Result<()> {
    if args.samples < 2 {
        return Err(GridflexError::Argument("samples must be at least 2".into()));
    }
    if !(-1.0..1.0).contains(&args.rho) {
        return Err(GridflexError::Argument("rho must be in (-1, 1)".into()));
    }
    let series = synth::ar1_series(
        args.samples,
        args.dt,
        args.rho,
        args.sigma,
        args.base_power,
        args.seed,
    );
    series.to_csv(&args.out)?;
    println!("wrote {} samples to {}", series.len(), args.out.display());
    Ok(())
}

/// Exit 2 marks bad input (arguments, malformed files, inconsistent
/// configs); exit 1 marks runtime failures.
fn exit_code_for(err: &GridflexError) -> ExitCode {
    match err {
        GridflexError::Argument(_)
        | GridflexError::Config(_)
        | GridflexError::InvalidSpec(_)
        | GridflexError::CsvFormat { .. }
        | GridflexError::Json(_)
        | GridflexError::Csv(_)
        | GridflexError::DegenerateData(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(args) => estimate(args),
        Command::Run(args) => run(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
