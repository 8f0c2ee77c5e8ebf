//! The `decision-queue` command line.
//!
//! Each subcommand reads a scenario from `--config FILE` and/or flags (flags
//! win), runs one library call, prints a summary and writes a CSV file into
//! `--out` (default: the current directory). Every CSV starts with `#` lines
//! echoing the effective scenario and the units.
//!
//! Exit codes: 0 on success, 1 for configuration errors, 2 for numerical
//! failures and capacity limits.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dynamic_solver::{DynamicQueue, QueueParams, DEFAULT_MAX_HORIZON};
use crate::error::{Error, Result};
use crate::sigmoid::{Sigmoid, SigmoidModel};
use crate::simulator::{benefit_sweep, optimal_arrival_rate, run_policy, Evolution, Policy, SimConfig};
use crate::static_solvers::{solve_static_latency, solve_time_constrained};

pub use config::{ProblemKind, ScenarioConfig};
use output::{render_csv, sig9};

pub const DEFAULT_HORIZON: usize = 10;
pub const DEFAULT_STAGES: usize = 200;
pub const DEFAULT_RATES: [f64; 11] = [0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2, 0.225, 0.25, 0.275, 0.3];

#[derive(Debug, Parser)]
#[command(
    name = "decision-queue",
    version,
    about = "Duration allocation for queues of sigmoid-performance decision tasks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Queue without arrivals under a hard time budget.
    StaticTime(ScenarioArgs),
    /// Queue without arrivals under a linear latency penalty.
    StaticLatency(ScenarioArgs),
    /// Finite-horizon allocation for a queue with Poisson arrivals.
    Dynamic(ScenarioArgs),
    /// Receding-horizon or greedy simulation.
    Simulate(ScenarioArgs),
    /// Average benefit of both policies over a grid of arrival rates.
    Sweep(ScenarioArgs),
    /// Arrival rate that keeps one task waiting on average.
    ArrivalRate(ScenarioArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file with `key = value` lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for CSV output.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Logistic model `p0,a,b`.
    #[arg(long, value_name = "P0,A,B", allow_hyphen_values = true, conflicts_with = "ddm")]
    pew: Option<String>,
    /// Drift-diffusion model `drift,diffusion,threshold`.
    #[arg(long, value_name = "DRIFT,SIGMA,THRESHOLD", allow_hyphen_values = true)]
    ddm: Option<String>,
    /// Tasks in the queue; the horizon length for `dynamic`.
    #[arg(long)]
    tasks: Option<String>,
    /// Time budget in seconds.
    #[arg(long, allow_hyphen_values = true)]
    budget: Option<String>,
    /// Penalty per waiting task per second.
    #[arg(long, allow_hyphen_values = true)]
    penalty: Option<String>,
    /// Arrivals per second.
    #[arg(long, allow_hyphen_values = true)]
    arrival_rate: Option<String>,
    /// Queue length at the first stage.
    #[arg(long, allow_hyphen_values = true)]
    initial_queue: Option<String>,
    /// Lookahead per receding-horizon solve.
    #[arg(long)]
    horizon: Option<String>,
    /// Largest horizon the enumeration accepts.
    #[arg(long)]
    max_horizon: Option<String>,
    /// Number of simulated stages.
    #[arg(long)]
    stages: Option<String>,
    /// Generator seed for sampled arrivals.
    #[arg(long)]
    seed: Option<String>,
    /// `expected` or `sampled`.
    #[arg(long)]
    evolution: Option<String>,
    /// `receding-horizon` or `greedy`.
    #[arg(long)]
    policy: Option<String>,
    /// Comma-separated arrival rates for `sweep`.
    #[arg(long, allow_hyphen_values = true)]
    rates: Option<String>,
}

impl ScenarioArgs {
    fn overrides(&self) -> Result<ScenarioConfig> {
        let mut config = ScenarioConfig::default();
        let flags = [
            ("pew", &self.pew),
            ("ddm", &self.ddm),
            ("tasks", &self.tasks),
            ("budget", &self.budget),
            ("penalty", &self.penalty),
            ("arrival-rate", &self.arrival_rate),
            ("initial-queue", &self.initial_queue),
            ("horizon", &self.horizon),
            ("max-horizon", &self.max_horizon),
            ("stages", &self.stages),
            ("seed", &self.seed),
            ("evolution", &self.evolution),
            ("policy", &self.policy),
            ("rates", &self.rates),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                config.set(key, value).map_err(|e| match e {
                    Error::Config(msg) => Error::Config(format!("--{msg}")),
                    other => other,
                })?;
            }
        }
        Ok(config)
    }

    fn scenario(&self, kind: ProblemKind) -> Result<ScenarioConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("config: cannot read {}: {e}", path.display())))?;
                ScenarioConfig::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => ScenarioConfig::default(),
        };
        let mut merged = file.merge(self.overrides()?);
        merged.kind = Some(kind);
        Ok(merged)
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let (kind, args) = match &cli.command {
        Command::StaticTime(a) => (ProblemKind::StaticTime, a),
        Command::StaticLatency(a) => (ProblemKind::StaticLatency, a),
        Command::Dynamic(a) => (ProblemKind::Dynamic, a),
        Command::Simulate(a) => (ProblemKind::Simulate, a),
        Command::Sweep(a) => (ProblemKind::Sweep, a),
        Command::ArrivalRate(a) => (ProblemKind::ArrivalRate, a),
    };
    let result = args.scenario(kind).and_then(|scenario| execute(&scenario, &args.out, &mut io::stdout().lock()));
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// 2 for numerical failures and capacity limits, 1 for everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err.root_cause() {
        Error::Numeric(_) | Error::NoSolution(_) | Error::Capacity { .. } => 2,
        _ => 1,
    }
}

/// Runs `scenario` (its `kind` selects the problem), writing the summary to
/// `summary` and any CSV file into `out_dir`.
pub fn execute(scenario: &ScenarioConfig, out_dir: &Path, summary: &mut dyn Write) -> Result<()> {
    let kind = scenario.kind.ok_or_else(|| missing("kind"))?;
    match kind {
        ProblemKind::StaticTime => static_time(scenario, out_dir, summary),
        ProblemKind::StaticLatency => static_latency(scenario, out_dir, summary),
        ProblemKind::Dynamic => dynamic(scenario, out_dir, summary),
        ProblemKind::Simulate => simulate(scenario, out_dir, summary),
        ProblemKind::Sweep => sweep(scenario, out_dir, summary),
        ProblemKind::ArrivalRate => arrival_rate(scenario, summary),
    }
}

fn missing(field: &str) -> Error {
    let flag = match field {
        "model" => "--pew or --ddm".to_string(),
        other => format!("--{other}"),
    };
    Error::Config(format!("{field}: required ({flag})"))
}

fn need<T: Clone>(value: &Option<T>, field: &str) -> Result<T> {
    value.clone().ok_or_else(|| missing(field))
}

/// Library domain errors on user input are configuration errors.
fn as_config(err: Error) -> Error {
    match err {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    }
}

fn write_csv(out_dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

fn header(effective: &ScenarioConfig, units: &[&str]) -> Vec<String> {
    let mut lines = vec![format!("decision-queue {}", env!("CARGO_PKG_VERSION"))];
    lines.extend(effective.entries().into_iter().map(|(k, v)| format!("{k} = {v}")));
    lines.extend(units.iter().map(|u| u.to_string()));
    lines
}

const ALLOCATION_UNITS: [&str; 3] = [
    "duration_s: seconds; reward: expected performance f(t), 0 for dropped tasks",
    "penalty: latency cost in reward units (penalty rate x waiting tasks x seconds)",
    "penalty rate: per waiting task per second",
];

fn summary_line(summary: &mut dyn Write, line: String) -> Result<()> {
    writeln!(summary, "{line}")?;
    Ok(())
}

fn static_time(scenario: &ScenarioConfig, out_dir: &Path, summary: &mut dyn Write) -> Result<()> {
    let model = need(&scenario.model, "model")?;
    let tasks = need(&scenario.tasks, "tasks")?;
    let budget = need(&scenario.budget, "budget")?;
    let sigmoid = Sigmoid::new(model).map_err(as_config)?;
    let solution = solve_time_constrained(&sigmoid, tasks, budget).map_err(as_config)?;

    let t = solution.allocation.as_slice();
    let rows: Vec<_> = t
        .iter()
        .zip(&solution.reward.rewards)
        .enumerate()
        .map(|(i, (&d, &r))| output::allocation_row(i + 1, d, r, 0.0))
        .collect();
    let effective = ScenarioConfig {
        kind: scenario.kind,
        model: Some(model),
        tasks: Some(tasks),
        budget: Some(budget),
        ..Default::default()
    };
    let path = write_csv(
        out_dir,
        "allocation.csv",
        &render_csv(&header(&effective, &ALLOCATION_UNITS), &output::ALLOCATION_COLUMNS, &rows),
    )?;

    summary_line(summary, format!("static-time: {tasks} tasks, budget {} s", sig9(budget)))?;
    summary_line(
        summary,
        format!(
            "processed m* = {} tasks at {} s each, {} dropped",
            solution.processed,
            sig9(budget / solution.processed as f64),
            tasks - solution.processed
        ),
    )?;
    summary_line(summary, format!("total reward = {}", sig9(solution.reward.total)))?;
    summary_line(summary, format!("wrote {}", path.display()))
}

fn static_latency(scenario: &ScenarioConfig, out_dir: &Path, summary: &mut dyn Write) -> Result<()> {
    let model = need(&scenario.model, "model")?;
    let tasks = need(&scenario.tasks, "tasks")?;
    let penalty = need(&scenario.penalty, "penalty")?;
    let sigmoid = Sigmoid::new(model).map_err(as_config)?;
    let solution = solve_static_latency(&sigmoid, tasks, penalty).map_err(as_config)?;

    let reward = &solution.reward;
    let rows: Vec<_> = solution
        .allocation
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &d)| output::allocation_row(i + 1, d, reward.rewards[i], reward.penalties[i]))
        .collect();
    let effective = ScenarioConfig {
        kind: scenario.kind,
        model: Some(model),
        tasks: Some(tasks),
        penalty: Some(penalty),
        ..Default::default()
    };
    let path = write_csv(
        out_dir,
        "allocation.csv",
        &render_csv(&header(&effective, &ALLOCATION_UNITS), &output::ALLOCATION_COLUMNS, &rows),
    )?;

    let processed = solution.allocation.processed_count();
    summary_line(summary, format!("static-latency: {tasks} tasks, penalty {} per task per s", sig9(penalty)))?;
    summary_line(summary, format!("processed {processed} tasks, dropped {}", tasks - processed))?;
    summary_line(summary, format!("average benefit per task = {}", sig9(reward.total)))?;
    summary_line(summary, format!("wrote {}", path.display()))
}

fn dynamic(scenario: &ScenarioConfig, out_dir: &Path, summary: &mut dyn Write) -> Result<()> {
    let model = need(&scenario.model, "model")?;
    let horizon = scenario.tasks.or(scenario.horizon).ok_or_else(|| missing("tasks"))?;
    let penalty = need(&scenario.penalty, "penalty")?;
    let lambda = scenario.arrival_rate.unwrap_or(0.0);
    let initial_queue = scenario.initial_queue.unwrap_or(horizon as f64);
    let max_horizon = scenario.max_horizon.unwrap_or(DEFAULT_MAX_HORIZON);

    let sigmoid = Sigmoid::new(model).map_err(as_config)?;
    let params = QueueParams::new(initial_queue, lambda, penalty, horizon).map_err(as_config)?;
    let solver = DynamicQueue::new(sigmoid, params).map_err(as_config)?.with_max_horizon(max_horizon);
    let solution = solver.solve_finite_horizon()?;
    let best = &solution.best;

    let t = best.allocation.as_slice();
    let mut elapsed = 0.0;
    let rows: Vec<_> = t
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let waiting = initial_queue - i as f64 + lambda * elapsed;
            let cost = penalty * waiting * d + 0.5 * penalty * lambda * d * d;
            elapsed += d;
            let reward = if d > 0.0 { sigmoid.f(d) } else { 0.0 };
            output::allocation_row(i + 1, d, reward, cost)
        })
        .collect();
    let effective = ScenarioConfig {
        kind: scenario.kind,
        model: Some(model),
        tasks: Some(horizon),
        penalty: Some(penalty),
        arrival_rate: Some(lambda),
        initial_queue: Some(initial_queue),
        max_horizon: Some(max_horizon),
        ..Default::default()
    };
    let units = [
        "duration_s: seconds; reward: expected performance f(t), 0 for dropped tasks",
        "penalty: expected waiting cost plus within-service arrival cost, reward units",
        "arrival-rate: tasks per second; penalty rate: per waiting task per second",
    ];
    let path = write_csv(
        out_dir,
        "allocation.csv",
        &render_csv(&header(&effective, &units), &output::ALLOCATION_COLUMNS, &rows),
    )?;

    let stats = solution.stats;
    summary_line(
        summary,
        format!("dynamic: horizon {horizon}, initial queue {}, arrival rate {}", sig9(initial_queue), sig9(lambda)),
    )?;
    summary_line(summary, format!("processed pattern {}", best.processed))?;
    summary_line(summary, format!("objective J = {}", sig9(best.objective)))?;
    summary_line(
        summary,
        format!(
            "candidates: {} enumerated, {} admitted, {} solved, {} feasible",
            stats.enumerated, stats.admitted, stats.solved, stats.feasible
        ),
    )?;
    summary_line(summary, format!("wrote {}", path.display()))
}

fn simulation_config(scenario: &ScenarioConfig, model: SigmoidModel, penalty: f64) -> SimConfig {
    SimConfig {
        model,
        arrival_rate: scenario.arrival_rate.unwrap_or(0.0),
        penalty_rate: penalty,
        horizon: scenario.horizon.unwrap_or(DEFAULT_HORIZON),
        stages: scenario.stages.unwrap_or(DEFAULT_STAGES),
        evolution: scenario.evolution.unwrap_or(Evolution::Expected),
        policy: scenario.policy.unwrap_or(Policy::RecedingHorizon),
        seed: scenario.seed.unwrap_or(0),
        initial_queue: scenario.initial_queue.unwrap_or(1.0),
        max_horizon: scenario.max_horizon.unwrap_or(DEFAULT_MAX_HORIZON),
    }
}

fn simulation_echo(scenario: &ScenarioConfig, config: &SimConfig) -> ScenarioConfig {
    ScenarioConfig {
        kind: scenario.kind,
        model: Some(config.model),
        penalty: Some(config.penalty_rate),
        arrival_rate: Some(config.arrival_rate),
        initial_queue: Some(config.initial_queue),
        horizon: Some(config.horizon),
        max_horizon: Some(config.max_horizon),
        stages: Some(config.stages),
        seed: Some(config.seed),
        evolution: Some(config.evolution),
        ..Default::default()
    }
}

const IDLE_NOTE: &str =
    "idle stages: expected mode waits (1 - n)/arrival-rate, sampled mode an exponential interarrival; zero benefit";

fn simulate(scenario: &ScenarioConfig, out_dir: &Path, summary: &mut dyn Write) -> Result<()> {
    let model = need(&scenario.model, "model")?;
    let penalty = need(&scenario.penalty, "penalty")?;
    if scenario.arrival_rate.is_none() {
        return Err(missing("arrival-rate"));
    }
    let config = simulation_config(scenario, model, penalty);
    let trace = run_policy(&config).map_err(as_config)?;

    let mut effective = simulation_echo(scenario, &config);
    effective.policy = Some(config.policy);
    let units = [
        "time_s, duration_s: seconds; queue_*, arrivals: tasks (expected counts in expected mode)",
        "reward, penalties, benefit: reward units; penalty rate per waiting task per second",
        IDLE_NOTE,
    ];
    let csv = render_csv(&header(&effective, &units), &output::TRACE_COLUMNS, &output::trace_rows(&trace));
    let path = write_csv(out_dir, "trace.csv", &csv)?;

    let served = trace.service_durations();
    summary_line(
        summary,
        format!(
            "simulate: {} policy, {} evolution, {} stages",
            config::policy_name(config.policy),
            config::evolution_name(config.evolution),
            trace.records.len()
        ),
    )?;
    summary_line(
        summary,
        format!(
            "served {} tasks, dropped {}, idle stages {}",
            served.iter().filter(|t| **t > 0.0).count(),
            served.iter().filter(|t| **t == 0.0).count(),
            trace.records.len() - served.len()
        ),
    )?;
    summary_line(summary, format!("average benefit per stage = {}", sig9(trace.average_benefit())))?;
    summary_line(summary, format!("wrote {}", path.display()))
}

fn sweep(scenario: &ScenarioConfig, out_dir: &Path, summary: &mut dyn Write) -> Result<()> {
    let model = need(&scenario.model, "model")?;
    let penalty = need(&scenario.penalty, "penalty")?;
    let rates = scenario.rates.clone().unwrap_or_else(|| DEFAULT_RATES.to_vec());
    let base = simulation_config(scenario, model, penalty);
    let points = benefit_sweep(&base, &rates).map_err(as_config)?;

    let mut effective = simulation_echo(scenario, &base);
    effective.arrival_rate = None;
    effective.rates = Some(rates);
    let units = ["arrival_rate: tasks per second; benefit_*: average benefit per stage, reward units", IDLE_NOTE];
    let csv = render_csv(&header(&effective, &units), &output::SWEEP_COLUMNS, &output::sweep_rows(&points));
    let path = write_csv(out_dir, "sweep.csv", &csv)?;

    summary_line(summary, "arrival_rate  receding_horizon  greedy".to_string())?;
    for p in &points {
        summary_line(summary, format!("{}  {}  {}", sig9(p.arrival_rate), sig9(p.receding_horizon), sig9(p.greedy)))?;
    }
    summary_line(summary, format!("wrote {}", path.display()))
}

fn arrival_rate(scenario: &ScenarioConfig, summary: &mut dyn Write) -> Result<()> {
    let model = need(&scenario.model, "model")?;
    let penalty = need(&scenario.penalty, "penalty")?;
    let (tau, rate) = optimal_arrival_rate(&model, penalty).map_err(as_config)?;
    summary_line(summary, format!("tau* = {} s", sig9(tau)))?;
    summary_line(summary, format!("arrival rate = {} tasks/s", sig9(rate)))
}
