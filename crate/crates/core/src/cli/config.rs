//! Flat `key = value` scenario files.
//!
//! Keys match the long command-line flags without the leading dashes. Blank
//! lines and lines starting with `#` are skipped. Unknown or repeated keys are
//! errors. Floats are written in shortest round-trip form, so
//! `parse(to_text(c)) == c` for every valid config.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sigmoid::SigmoidModel;
use crate::simulator::{Evolution, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    StaticTime,
    StaticLatency,
    Dynamic,
    Simulate,
    Sweep,
    ArrivalRate,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::StaticTime,
        ProblemKind::StaticLatency,
        ProblemKind::Dynamic,
        ProblemKind::Simulate,
        ProblemKind::Sweep,
        ProblemKind::ArrivalRate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::StaticTime => "static-time",
            ProblemKind::StaticLatency => "static-latency",
            ProblemKind::Dynamic => "dynamic",
            ProblemKind::Simulate => "simulate",
            ProblemKind::Sweep => "sweep",
            ProblemKind::ArrivalRate => "arrival-rate",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("kind: unknown problem kind `{s}`")))
    }
}

pub fn evolution_name(evolution: Evolution) -> &'static str {
    match evolution {
        Evolution::Expected => "expected",
        Evolution::Sampled => "sampled",
    }
}

pub fn policy_name(policy: Policy) -> &'static str {
    match policy {
        Policy::RecedingHorizon => "receding-horizon",
        Policy::Greedy => "greedy",
    }
}

/// Scenario settings from a file, flags, or both. Absent fields fall back to
/// per-command defaults at execution time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioConfig {
    pub kind: Option<ProblemKind>,
    pub model: Option<SigmoidModel>,
    /// Number of tasks (static problems) or horizon length (`dynamic`).
    pub tasks: Option<usize>,
    /// Time budget in seconds.
    pub budget: Option<f64>,
    /// Latency penalty per waiting task per second.
    pub penalty: Option<f64>,
    /// Arrivals per second.
    pub arrival_rate: Option<f64>,
    pub initial_queue: Option<f64>,
    /// Lookahead per receding-horizon solve.
    pub horizon: Option<usize>,
    /// Enumeration cap for the finite-horizon solver.
    pub max_horizon: Option<usize>,
    /// Simulated stages.
    pub stages: Option<usize>,
    pub seed: Option<u64>,
    pub evolution: Option<Evolution>,
    pub policy: Option<Policy>,
    /// Arrival-rate grid for sweeps.
    pub rates: Option<Vec<f64>>,
}

pub const KEYS: [&str; 15] = [
    "kind",
    "pew",
    "ddm",
    "tasks",
    "budget",
    "penalty",
    "arrival-rate",
    "initial-queue",
    "horizon",
    "max-horizon",
    "stages",
    "seed",
    "evolution",
    "policy",
    "rates",
];

impl ScenarioConfig {
    /// Parses the text of a scenario file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = ScenarioConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected `key = value`", number + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            let slot = if key == "ddm" { "pew" } else { key };
            if seen.iter().any(|s| s == slot) {
                return Err(Error::Config(format!("line {}: `{key}` given more than once", number + 1)));
            }
            config.set(key, value).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", number + 1)),
                other => other,
            })?;
            seen.push(slot.to_string());
        }
        Ok(config)
    }

    /// Assigns one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kind" => self.kind = Some(value.parse()?),
            "pew" => {
                let [p0, a, b] = triple(key, value)?;
                self.model = Some(SigmoidModel::pew(p0, a, b).map_err(|e| invalid(key, e))?);
            }
            "ddm" => {
                let [drift, diffusion, threshold] = triple(key, value)?;
                let model = SigmoidModel::drift_diffusion(drift, diffusion, threshold);
                self.model = Some(model.map_err(|e| invalid(key, e))?);
            }
            "tasks" => self.tasks = Some(positive_count(key, value)?),
            "budget" => self.budget = Some(positive(key, value)?),
            "penalty" => self.penalty = Some(positive(key, value)?),
            "arrival-rate" => self.arrival_rate = Some(non_negative(key, value)?),
            "initial-queue" => self.initial_queue = Some(non_negative(key, value)?),
            "horizon" => self.horizon = Some(positive_count(key, value)?),
            "max-horizon" => self.max_horizon = Some(positive_count(key, value)?),
            "stages" => self.stages = Some(positive_count(key, value)?),
            "seed" => {
                let seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("seed: `{value}` is not a 64-bit unsigned integer")))?;
                self.seed = Some(seed);
            }
            "evolution" => {
                self.evolution = Some(match value {
                    "expected" => Evolution::Expected,
                    "sampled" => Evolution::Sampled,
                    _ => {
                        return Err(Error::Config(format!(
                            "evolution: expected `expected` or `sampled`, got `{value}`"
                        )))
                    }
                })
            }
            "policy" => {
                self.policy = Some(match value {
                    "receding-horizon" => Policy::RecedingHorizon,
                    "greedy" => Policy::Greedy,
                    _ => {
                        return Err(Error::Config(format!(
                            "policy: expected `receding-horizon` or `greedy`, got `{value}`"
                        )))
                    }
                })
            }
            "rates" => {
                let rates = value.split(',').map(|r| non_negative(key, r.trim())).collect::<Result<Vec<_>>>()?;
                self.rates = Some(rates);
            }
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Fields of `overrides` replace those of `self`.
    pub fn merge(self, overrides: ScenarioConfig) -> Self {
        ScenarioConfig {
            kind: overrides.kind.or(self.kind),
            model: overrides.model.or(self.model),
            tasks: overrides.tasks.or(self.tasks),
            budget: overrides.budget.or(self.budget),
            penalty: overrides.penalty.or(self.penalty),
            arrival_rate: overrides.arrival_rate.or(self.arrival_rate),
            initial_queue: overrides.initial_queue.or(self.initial_queue),
            horizon: overrides.horizon.or(self.horizon),
            max_horizon: overrides.max_horizon.or(self.max_horizon),
            stages: overrides.stages.or(self.stages),
            seed: overrides.seed.or(self.seed),
            evolution: overrides.evolution.or(self.evolution),
            policy: overrides.policy.or(self.policy),
            rates: overrides.rates.or(self.rates),
        }
    }

    /// `key = value` pairs for every present field, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if let Some(kind) = self.kind {
            out.push(("kind", kind.to_string()));
        }
        match self.model {
            Some(SigmoidModel::Pew { p0, a, b }) => out.push(("pew", format!("{p0},{a},{b}"))),
            Some(SigmoidModel::DriftDiffusion { drift, diffusion, threshold }) => {
                out.push(("ddm", format!("{drift},{diffusion},{threshold}")))
            }
            None => {}
        }
        let mut push = |key, value: Option<String>| {
            if let Some(v) = value {
                out.push((key, v));
            }
        };
        push("tasks", self.tasks.map(|v| v.to_string()));
        push("budget", self.budget.map(|v| v.to_string()));
        push("penalty", self.penalty.map(|v| v.to_string()));
        push("arrival-rate", self.arrival_rate.map(|v| v.to_string()));
        push("initial-queue", self.initial_queue.map(|v| v.to_string()));
        push("horizon", self.horizon.map(|v| v.to_string()));
        push("max-horizon", self.max_horizon.map(|v| v.to_string()));
        push("stages", self.stages.map(|v| v.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("evolution", self.evolution.map(|v| evolution_name(v).to_string()));
        push("policy", self.policy.map(|v| policy_name(v).to_string()));
        push("rates", self.rates.as_ref().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")));
        out
    }

    /// Serialises to the file format accepted by [`ScenarioConfig::parse`].
    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn invalid(key: &str, err: Error) -> Error {
    Error::Config(format!("{key}: {err}"))
}

fn number(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value.parse().map_err(|_| Error::Config(format!("{key}: `{value}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: `{value}` is not finite")));
    }
    Ok(x)
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let x = number(key, value)?;
    if x <= 0.0 {
        return Err(Error::Config(format!("{key}: must be positive, got {value}")));
    }
    Ok(x)
}

fn non_negative(key: &str, value: &str) -> Result<f64> {
    let x = number(key, value)?;
    if x < 0.0 {
        return Err(Error::Config(format!("{key}: must be non-negative, got {value}")));
    }
    Ok(x)
}

fn positive_count(key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::Config(format!("{key}: expected a positive integer, got `{value}`"))),
    }
}

fn triple(key: &str, value: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("{key}: expected three comma-separated numbers, got `{value}`")));
    }
    Ok([number(key, parts[0])?, number(key, parts[1])?, number(key, parts[2])?])
}
