//! Receding-horizon and greedy operation of a dynamic queue.
//!
//! At each stage the current queue length seeds a finite-horizon solve and
//! only the first allocation is applied. The queue then evolves either by its
//! expected recursion or by Poisson-sampled arrivals. When the queue is empty
//! the operator idles until the next arrival; idle stages earn nothing and
//! cost nothing.
//!
//! The lookahead used at a stage is `min(N, ceil(n))` where `n` is the
//! current queue length. Longer lookaheads would plan past the point where
//! the expected queue runs dry, and every such plan is infeasible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamic_solver::{DynamicQueue, QueueParams, DEFAULT_MAX_HORIZON};
use crate::error::{Error, Result};
use crate::sigmoid::{Branch, Sigmoid, SigmoidModel};

/// Above this mean the Poisson sampler splits the interval in two.
const POISSON_SPLIT_MEAN: f64 = 30.0;

/// Expected queue lengths this close below one count as one waiting task.
const QUEUE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evolution {
    /// Deterministic expected-value recursion.
    Expected,
    /// Poisson arrivals drawn from the seeded generator.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    RecedingHorizon,
    /// Receding horizon with a one-stage lookahead.
    Greedy,
}

/// Everything needed to reproduce a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub model: SigmoidModel,
    /// Arrivals per second.
    pub arrival_rate: f64,
    /// Penalty per waiting task per second.
    pub penalty_rate: f64,
    /// Lookahead `N` for each receding-horizon solve.
    pub horizon: usize,
    /// Number of stages `L` to simulate.
    pub stages: usize,
    pub evolution: Evolution,
    pub policy: Policy,
    /// Seed for the sampled evolution; ignored by the expected one.
    pub seed: u64,
    /// Queue length at the first stage.
    pub initial_queue: f64,
    /// Enumeration cap passed to the solver.
    pub max_horizon: usize,
}

impl SimConfig {
    /// Defaults: one task waiting, expected evolution, receding horizon, seed 0.
    pub fn new(model: SigmoidModel, arrival_rate: f64, penalty_rate: f64, horizon: usize, stages: usize) -> Self {
        SimConfig {
            model,
            arrival_rate,
            penalty_rate,
            horizon,
            stages,
            evolution: Evolution::Expected,
            policy: Policy::RecedingHorizon,
            seed: 0,
            initial_queue: 1.0,
            max_horizon: DEFAULT_MAX_HORIZON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.stages == 0 {
            return Err(Error::domain("stage count must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::domain("horizon must be at least 1"));
        }
        if !(self.arrival_rate >= 0.0 && self.arrival_rate.is_finite()) {
            return Err(Error::domain(format!("arrival rate must be non-negative, got {}", self.arrival_rate)));
        }
        if !(self.penalty_rate > 0.0 && self.penalty_rate.is_finite()) {
            return Err(Error::domain(format!("penalty rate must be positive, got {}", self.penalty_rate)));
        }
        if !(self.initial_queue >= 0.0 && self.initial_queue.is_finite()) {
            return Err(Error::domain(format!(
                "initial queue length must be non-negative, got {}",
                self.initial_queue
            )));
        }
        if self.evolution == Evolution::Sampled && self.initial_queue.fract() != 0.0 {
            return Err(Error::domain("sampled evolution needs a whole initial queue length"));
        }
        Ok(())
    }

    /// Lookahead actually requested from the solver.
    pub fn effective_horizon(&self) -> usize {
        match self.policy {
            Policy::RecedingHorizon => self.horizon,
            Policy::Greedy => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StageKind {
    /// A task was served (possibly with a zero duration, i.e. dropped).
    Service,
    /// The queue was empty and the operator waited for an arrival.
    Idle,
}

impl StageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StageKind::Service => "service",
            StageKind::Idle => "idle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    /// One-based stage index.
    pub stage: usize,
    pub kind: StageKind,
    /// Clock at the start of the stage, seconds.
    pub start_time: f64,
    pub queue_before: f64,
    /// Service or waiting time, seconds.
    pub duration: f64,
    /// `f(t)` for a served task, zero when dropped or idle.
    pub reward: f64,
    /// `c n t`.
    pub waiting_penalty: f64,
    /// `c lambda t^2 / 2`.
    pub arrival_penalty: f64,
    pub benefit: f64,
    /// Arrivals during the stage (expected count in expected mode).
    pub arrivals: f64,
    pub queue_after: f64,
    /// Mean benefit over stages `1..=stage`.
    pub running_average: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub config: SimConfig,
    pub records: Vec<StageRecord>,
}

impl SimulationTrace {
    /// Mean stage benefit over the whole run.
    pub fn average_benefit(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.running_average)
    }

    /// The allocated service durations, idle stages skipped.
    pub fn service_durations(&self) -> Vec<f64> {
        self.records.iter().filter(|r| r.kind == StageKind::Service).map(|r| r.duration).collect()
    }
}

/// Poisson-distributed number of arrivals in `duration` seconds at `rate`.
///
/// Sequential-search inversion for means up to 30; larger means are split in
/// half and the two halves sampled independently.
pub fn sample_arrivals<R: Rng + ?Sized>(rate: f64, duration: f64, rng: &mut R) -> u64 {
    poisson(rate * duration, rng)
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean.is_nan() || mean <= 0.0 {
        return 0;
    }
    if mean > POISSON_SPLIT_MEAN {
        let half = 0.5 * mean;
        return poisson(half, rng) + poisson(half, rng);
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

fn exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

/// Simulates `config.stages` stages of the chosen policy.
///
/// Each stage solves a finite-horizon problem from the current queue length
/// and applies its first allocation. Runs with no arrivals stop once the
/// queue empties. Solver failures come back wrapped in [`Error::Stage`].
pub fn run_policy(config: &SimConfig) -> Result<SimulationTrace> {
    config.validate()?;
    let sigmoid = Sigmoid::new(config.model)?;
    let lambda = config.arrival_rate;
    let c = config.penalty_rate;
    let lookahead = config.effective_horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut records = Vec::with_capacity(config.stages);
    let mut queue = config.initial_queue;
    let mut clock = 0.0;
    let mut benefit_sum = 0.0;

    for stage in 1..=config.stages {
        if config.evolution == Evolution::Expected && (1.0 - QUEUE_SNAP..1.0).contains(&queue) {
            queue = 1.0;
        }
        let empty = match config.evolution {
            Evolution::Expected => queue < 1.0,
            Evolution::Sampled => queue == 0.0,
        };
        let mut record = if empty {
            if lambda == 0.0 {
                break;
            }
            let (wait, arrivals) = match config.evolution {
                Evolution::Expected => ((1.0 - queue) / lambda, 1.0 - queue),
                Evolution::Sampled => (exponential(lambda, &mut rng), 1.0),
            };
            StageRecord {
                stage,
                kind: StageKind::Idle,
                start_time: clock,
                queue_before: queue,
                duration: wait,
                reward: 0.0,
                waiting_penalty: 0.0,
                arrival_penalty: 0.0,
                benefit: 0.0,
                arrivals,
                queue_after: 1.0,
                running_average: 0.0,
            }
        } else {
            let horizon = lookahead.min(queue.ceil() as usize);
            let duration = first_allocation(&sigmoid, config, queue, horizon)
                .map_err(|e| Error::Stage { stage, source: Box::new(e) })?;
            let reward = if duration > 0.0 { sigmoid.f(duration) } else { 0.0 };
            let waiting_penalty = c * queue * duration;
            let arrival_penalty = 0.5 * c * lambda * duration * duration;
            let (arrivals, queue_after) = match config.evolution {
                Evolution::Expected => {
                    let arrivals = lambda * duration;
                    (arrivals, (queue - 1.0 + arrivals).max(0.0))
                }
                Evolution::Sampled => {
                    let arrivals = sample_arrivals(lambda, duration, &mut rng) as f64;
                    (arrivals, queue - 1.0 + arrivals)
                }
            };
            StageRecord {
                stage,
                kind: StageKind::Service,
                start_time: clock,
                queue_before: queue,
                duration,
                reward,
                waiting_penalty,
                arrival_penalty,
                benefit: reward - waiting_penalty - arrival_penalty,
                arrivals,
                queue_after,
                running_average: 0.0,
            }
        };
        benefit_sum += record.benefit;
        record.running_average = benefit_sum / stage as f64;
        clock += record.duration;
        queue = record.queue_after;
        records.push(record);
    }
    Ok(SimulationTrace { config: *config, records })
}

fn first_allocation(sigmoid: &Sigmoid, config: &SimConfig, queue: f64, horizon: usize) -> Result<f64> {
    let params = QueueParams::new(queue, config.arrival_rate, config.penalty_rate, horizon)?;
    let solver = DynamicQueue::new(*sigmoid, params)?.with_max_horizon(config.max_horizon);
    Ok(solver.solve_finite_horizon()?.best.allocation[0])
}

/// Service time `tau*` at which the slope equals `2c`, and the arrival rate
/// `1 / tau*` that keeps one task in the queue on average.
pub fn optimal_arrival_rate(model: &SigmoidModel, penalty_rate: f64) -> Result<(f64, f64)> {
    if !(penalty_rate > 0.0 && penalty_rate.is_finite()) {
        return Err(Error::domain(format!("penalty rate must be positive, got {penalty_rate}")));
    }
    let sigmoid = Sigmoid::new(*model)?;
    let tau = sigmoid.derivative_inverse(2.0 * penalty_rate, Branch::Upper)?;
    Ok((tau, 1.0 / tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub arrival_rate: f64,
    pub receding_horizon: f64,
    pub greedy: f64,
}

/// Average benefit of both policies for every rate in `rates`.
///
/// `base` supplies everything except the arrival rate and the policy.
pub fn benefit_sweep(base: &SimConfig, rates: &[f64]) -> Result<Vec<SweepPoint>> {
    rates
        .iter()
        .map(|&rate| {
            let run = |policy| {
                let config = SimConfig { arrival_rate: rate, policy, ..*base };
                run_policy(&config).map(|trace| trace.average_benefit())
            };
            Ok(SweepPoint {
                arrival_rate: rate,
                receding_horizon: run(Policy::RecedingHorizon)?,
                greedy: run(Policy::Greedy)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pew() -> SigmoidModel {
        SigmoidModel::pew(1.0, 1.0, 5.0).unwrap()
    }

    #[test]
    fn degenerate_poisson() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_arrivals(0.0, 5.0, &mut rng), 0);
        assert_eq!(sample_arrivals(0.5, 0.0, &mut rng), 0);
    }

    #[test]
    fn large_means_are_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let mean = (0..n).map(|_| sample_arrivals(10.0, 12.0, &mut rng) as f64).sum::<f64>() / n as f64;
        // standard error sqrt(120 / 20000) ~ 0.077
        assert!((mean - 120.0).abs() < 0.4, "{mean}");
    }

    #[test]
    fn tangency_rate() {
        let (tau, rate) = optimal_arrival_rate(&pew(), 0.125).unwrap();
        assert!((tau - 5.0).abs() < 1e-9);
        assert!((rate - 0.2).abs() < 1e-9);
        assert!(matches!(optimal_arrival_rate(&pew(), 0.2), Err(Error::NoSolution(_))));
    }

    #[test]
    fn no_arrivals_stop_when_empty() {
        let config = SimConfig { initial_queue: 3.0, ..SimConfig::new(pew(), 0.0, 0.02, 3, 10) };
        let trace = run_policy(&config).unwrap();
        assert_eq!(trace.records.len(), 3);
        assert!(trace.records.iter().all(|r| r.kind == StageKind::Service));
    }

    #[test]
    fn empty_queue_idles_for_one_interarrival() {
        let config = SimConfig { initial_queue: 0.0, ..SimConfig::new(pew(), 0.25, 0.01, 2, 2) };
        let trace = run_policy(&config).unwrap();
        let idle = trace.records[0];
        assert_eq!(idle.kind, StageKind::Idle);
        assert_eq!(idle.duration, 4.0);
        assert_eq!(idle.benefit, 0.0);
        assert_eq!(trace.records[1].queue_before, 1.0);
    }

    #[test]
    fn stage_errors_carry_the_index() {
        let config = SimConfig { initial_queue: 20.0, ..SimConfig::new(pew(), 0.5, 0.01, 20, 3) };
        let err = run_policy(&config).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: 1, .. }));
        assert!(matches!(err.root_cause(), Error::Capacity { .. }));
    }

    #[test]
    fn invalid_configs() {
        let base = SimConfig::new(pew(), 0.5, 0.01, 3, 10);
        assert!(run_policy(&SimConfig { stages: 0, ..base }).is_err());
        assert!(run_policy(&SimConfig { horizon: 0, ..base }).is_err());
        assert!(run_policy(&SimConfig { penalty_rate: 0.0, ..base }).is_err());
        let fractional = SimConfig { initial_queue: 1.5, evolution: Evolution::Sampled, ..base };
        assert!(run_policy(&fractional).is_err());
    }
}
