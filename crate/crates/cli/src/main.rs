//! Scenario runner for the trackctl controllers.
//!
//! Subcommands: `run` a scenario, `compare` both controllers on identical
//! conditions, `plot` a recorded trace, `plan` the trajectory samples.
//! Exit codes: 0 success, 2 configuration/input error, 3 controller or
//! plant singularity at runtime, 1 output I/O failure.

mod config;
mod plot;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trackctl::planner::plan_path;
use trackctl::{run as run_sim, trace_io, ControllerChoice, RunTrace, ScenarioConfig, SimError};

use config::{load_scenario, parse_denominator, parse_switch_mode};

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "TRACKCTL_OUT";

#[derive(Parser)]
#[command(
    name = "trackctl",
    about = "Closed-loop path-tracking simulator: Lyapunov vs sliding-mode steering/speed control",
    version,
    after_help = "Waypoint files: one waypoint per line as `x,y` or `x,y,v_target` \
                  (meters, m/s); `#` starts a comment. The first/last waypoint's \
                  v_target sets the entry/exit speed, interior ones cap the corner \
                  speed. Scenario files are TOML; see the scenarios/ directory for \
                  annotated examples."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; writes trace.csv and metrics.txt.
    Run(RunArgs),
    /// Run both controllers on identical conditions; writes per-controller
    /// traces, a comparison table, and overlay plots.
    Compare(CompareArgs),
    /// Render an SVG plot from a trace.csv.
    Plot(PlotArgs),
    /// Expand the scenario's waypoints and write plan.csv.
    Plan(PlanArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $TRACKCTL_OUT or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the error-rate model: verbatim | derived.
    #[arg(long, value_name = "MODEL")]
    error_model: Option<String>,
    /// Override the sliding-mode steering denominator: sin | cos.
    #[arg(long, value_name = "FORM")]
    smc_denominator: Option<String>,
    /// Override the switching function: sign | sat:WIDTH | tanh:WIDTH.
    #[arg(long, value_name = "MODE")]
    switch_mode: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Override the controller: lyapunov | smc.
    #[arg(long)]
    controller: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
}

#[derive(Args)]
struct PlotArgs {
    /// Trace file produced by `run` or `compare`.
    trace: PathBuf,
    /// Plot kind: path | errors | commands | surfaces.
    #[arg(long)]
    kind: String,
    /// Output directory (default: $TRACKCTL_OUT or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn config(message: String) -> Self {
        Self { message, code: 2 }
    }

    pub fn runtime(message: String) -> Self {
        Self { message, code: 3 }
    }

    pub fn io(message: String) -> Self {
        Self { message, code: 1 }
    }

    fn from_sim(err: SimError) -> Self {
        match err {
            SimError::Controller { .. } | SimError::Vehicle { .. } => Self::runtime(err.to_string()),
            other => Self::config(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Plan(args) => cmd_plan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn out_dir(explicit: &Option<PathBuf>) -> PathBuf {
    explicit
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Load the scenario and apply command-line overrides.
fn scenario_with_overrides(args: &ScenarioArgs) -> Result<ScenarioConfig, CliError> {
    let mut cfg = load_scenario(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.noise.seed = seed;
    }
    if let Some(model) = &args.error_model {
        cfg.error_model = match model.as_str() {
            "verbatim" => trackctl::ErrorModel::Verbatim,
            "derived" => trackctl::ErrorModel::Derived,
            other => {
                return Err(CliError::config(format!(
                    "unknown error model {other:?}; expected verbatim or derived"
                )))
            }
        };
    }
    if let Some(d) = &args.smc_denominator {
        cfg.smc_params.denominator = parse_denominator(d)?;
    }
    if let Some(s) = &args.switch_mode {
        cfg.smc_params.switch = parse_switch_mode(s)?;
    }
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut cfg = scenario_with_overrides(&args.scenario)?;
    if let Some(ctl) = &args.controller {
        cfg.controller = match ctl.as_str() {
            "lyapunov" => ControllerChoice::Lyapunov,
            "smc" => ControllerChoice::Smc,
            other => {
                return Err(CliError::config(format!(
                    "unknown controller {other:?}; expected lyapunov or smc"
                )))
            }
        };
    }
    let dir = out_dir(&args.scenario.out);
    ensure_dir(&dir)?;

    let (trace, metrics) = run_sim(&cfg).map_err(CliError::from_sim)?;
    write_file(&dir.join("trace.csv"), &trace_io::to_csv(&trace))?;
    write_file(&dir.join("metrics.txt"), &report::metrics_text(&cfg, &metrics))?;
    println!(
        "{}: {} steps, max |ye| {:.4} m, steering TV {:.2} rad -> {}",
        cfg.name,
        trace.steps.len(),
        metrics.max_ye,
        metrics.steering_tv,
        dir.display()
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let base = scenario_with_overrides(&args.scenario)?;
    let dir = out_dir(&args.scenario.out);
    ensure_dir(&dir)?;

    let mut lyap_cfg = base.clone();
    lyap_cfg.controller = ControllerChoice::Lyapunov;
    let mut smc_cfg = base.clone();
    smc_cfg.controller = ControllerChoice::Smc;

    // Same seed, path and plant: the disturbance sequences are identical.
    let (lyap_trace, lyap_metrics) = run_sim(&lyap_cfg).map_err(CliError::from_sim)?;
    let (smc_trace, smc_metrics) = run_sim(&smc_cfg).map_err(CliError::from_sim)?;

    write_file(&dir.join("lyapunov_trace.csv"), &trace_io::to_csv(&lyap_trace))?;
    write_file(&dir.join("smc_trace.csv"), &trace_io::to_csv(&smc_trace))?;
    write_file(
        &dir.join("comparison.txt"),
        &report::comparison_text(&base, &lyap_metrics, &smc_metrics),
    )?;
    write_file(
        &dir.join("path_overlay.svg"),
        &plot::render_overlay(&lyap_trace, &smc_trace, "lyapunov", "smc"),
    )?;
    write_file(
        &dir.join("steering_overlay.svg"),
        &plot::render_steering_overlay(&lyap_trace, &smc_trace, "lyapunov", "smc"),
    )?;
    println!(
        "{}: steering TV lyapunov {:.2} vs smc {:.2}, max |ye| {:.4} vs {:.4} -> {}",
        base.name,
        lyap_metrics.steering_tv,
        smc_metrics.steering_tv,
        lyap_metrics.max_ye,
        smc_metrics.max_ye,
        dir.display()
    );
    Ok(())
}

fn load_trace(path: &Path) -> Result<RunTrace, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read trace {}: {e}", path.display())))?;
    trace_io::from_csv(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let trace = load_trace(&args.trace)?;
    let svg = plot::render(&trace, &args.kind)?;
    let dir = out_dir(&args.out);
    ensure_dir(&dir)?;
    let file = dir.join(format!("{}.svg", args.kind));
    write_file(&file, &svg)?;
    println!("{}", file.display());
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> Result<(), CliError> {
    let cfg = scenario_with_overrides(&args.scenario)?;
    let plan = plan_path(&cfg.waypoints, &cfg.planner)
        .map_err(|e| CliError::config(e.to_string()))?;
    let dir = out_dir(&args.scenario.out);
    ensure_dir(&dir)?;

    let mut csv = String::from("t,x,y,theta_d,v_d,omega_d,v_dot_d,omega_dot_d\n");
    for p in &plan {
        csv.push_str(&format!(
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}\n",
            p.t, p.x, p.y, p.theta_d, p.v_d, p.omega_d, p.v_dot_d, p.omega_dot_d
        ));
    }
    let file = dir.join("plan.csv");
    write_file(&file, &csv)?;
    println!("{} samples ({:.1} s) -> {}", plan.len(), plan.last().map_or(0.0, |p| p.t), file.display());
    Ok(())
}
