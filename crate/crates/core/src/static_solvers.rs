//! Closed-form allocations for queues without arrivals.
//!
//! * Time-constrained queue: `N` tasks must be finished within `T` seconds.
//!   The optimum processes `m*` tasks for `T / m*` seconds each, where `m*`
//!   maximises `m f(T / m)`, and drops the rest.
//! * Latency-penalty queue: every pending task costs `c` per second. Stage
//!   `l` (with `N - l + 1` tasks waiting) either gets the upper-branch root of
//!   `f'(t) = c (N - l + 1)` or is dropped, whichever scores higher.

use crate::error::{Error, Result};
use crate::sigmoid::{Branch, Sigmoid};

/// Objective values closer than this are treated as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Per-task durations in seconds. Dropped tasks hold an exact `0.0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AllocationVector(Vec<f64>);

impl AllocationVector {
    /// Wraps `durations`, rejecting negative or non-finite entries.
    pub fn new(durations: Vec<f64>) -> Result<Self> {
        if let Some(bad) = durations.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::domain(format!("durations must be finite and non-negative, got {bad}")));
        }
        Ok(AllocationVector(durations))
    }

    pub fn zeros(len: usize) -> Self {
        AllocationVector(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Number of tasks that receive a positive duration.
    pub fn processed_count(&self) -> usize {
        self.0.iter().filter(|t| **t > 0.0).count()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for AllocationVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Reported benefit of a static allocation.
///
/// Dropped tasks are never decided and earn no reward. `scale` is the
/// normalisation applied to the objective (`1` for the time-constrained
/// queue, `1/N` for the latency queue).
#[derive(Debug, Clone, PartialEq)]
pub struct StaticReward {
    pub total: f64,
    pub rewards: Vec<f64>,
    pub penalties: Vec<f64>,
    pub scale: f64,
}

impl StaticReward {
    fn from_parts(rewards: Vec<f64>, penalties: Vec<f64>, scale: f64) -> Self {
        let mut reward = StaticReward { total: 0.0, rewards, penalties, scale };
        reward.total = reward.recompute();
        reward
    }

    /// `scale * (sum of rewards - sum of penalties)`.
    pub fn recompute(&self) -> f64 {
        let r: f64 = self.rewards.iter().sum();
        let p: f64 = self.penalties.iter().sum();
        self.scale * (r - p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConstrainedSolution {
    pub allocation: AllocationVector,
    pub reward: StaticReward,
    /// Number of processed tasks `m*`.
    pub processed: usize,
    /// `m f(T / m)` for `m = 1..=N`.
    pub candidate_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatencySolution {
    pub allocation: AllocationVector,
    pub reward: StaticReward,
    /// `c (N - l + 1)` for each stage.
    pub penalty_rates: Vec<f64>,
}

/// Optimal allocation of a budget of `budget` seconds over `tasks` tasks.
///
/// The first `m*` positions are filled; ties in `m f(T/m)` go to the smaller `m`.
pub fn solve_time_constrained(sigmoid: &Sigmoid, tasks: usize, budget: f64) -> Result<TimeConstrainedSolution> {
    if tasks == 0 {
        return Err(Error::domain("task count must be at least 1"));
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::domain(format!("time budget must be positive, got {budget}")));
    }
    let candidate_values: Vec<f64> = (1..=tasks).map(|m| m as f64 * sigmoid.f(budget / m as f64)).collect();
    let mut best = 0;
    for (i, v) in candidate_values.iter().enumerate().skip(1) {
        if *v > candidate_values[best] + TIE_TOLERANCE {
            best = i;
        }
    }
    let m = best + 1;
    let share = budget / m as f64;
    let mut durations = vec![0.0; tasks];
    durations[..m].fill(share);
    // absorb the rounding of m * (T/m) into the last processed entry
    let head: f64 = durations[..m - 1].iter().sum();
    durations[m - 1] = budget - head;

    let rewards = durations.iter().map(|&t| if t > 0.0 { sigmoid.f(t) } else { 0.0 }).collect();
    Ok(TimeConstrainedSolution {
        allocation: AllocationVector(durations),
        reward: StaticReward::from_parts(rewards, vec![0.0; tasks], 1.0),
        processed: m,
        candidate_values,
    })
}

/// Optimal stage-by-stage allocation for `tasks` tasks with latency penalty
/// `penalty_rate` per waiting task per second.
///
/// Each stage compares the drop option (`f(0)`) against the interior
/// candidate; ties drop the task.
pub fn solve_static_latency(sigmoid: &Sigmoid, tasks: usize, penalty_rate: f64) -> Result<LatencySolution> {
    if tasks == 0 {
        return Err(Error::domain("task count must be at least 1"));
    }
    if !(penalty_rate > 0.0 && penalty_rate.is_finite()) {
        return Err(Error::domain(format!("penalty rate must be positive, got {penalty_rate}")));
    }
    let n = tasks as f64;
    let penalty_rates: Vec<f64> = (1..=tasks).map(|stage| penalty_rate * (n - stage as f64 + 1.0)).collect();
    let durations =
        penalty_rates.iter().map(|&rate| latency_stage_allocation(sigmoid, rate)).collect::<Result<Vec<_>>>()?;

    let rewards = durations.iter().map(|&t| if t > 0.0 { sigmoid.f(t) } else { 0.0 }).collect();
    let penalties = durations.iter().zip(&penalty_rates).map(|(t, r)| t * r).collect();
    Ok(LatencySolution {
        allocation: AllocationVector(durations),
        reward: StaticReward::from_parts(rewards, penalties, 1.0 / n),
        penalty_rates,
    })
}

/// `argmax` over `{0, t_dagger}` of `f(t) - rate * t`.
pub(crate) fn latency_stage_allocation(sigmoid: &Sigmoid, rate: f64) -> Result<f64> {
    if rate > sigmoid.profile().max_slope {
        return Ok(0.0);
    }
    let interior = sigmoid.derivative_inverse(rate, Branch::Upper)?;
    let keep = sigmoid.f(interior) - rate * interior;
    if keep > sigmoid.f(0.0) + TIE_TOLERANCE {
        Ok(interior)
    } else {
        Ok(0.0)
    }
}
