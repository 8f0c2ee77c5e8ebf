//! Time allocation for sequential decision-making queues whose tasks have
//! sigmoid performance functions.
//!
//! * [`sigmoid`]: logistic and drift-diffusion performance models with their
//!   derivatives, inflection point and derivative inverses.
//! * [`static_solvers`]: queues without arrivals, under a hard time budget or
//!   a linear latency penalty.
//! * [`dynamic_solver`]: finite-horizon allocation for a queue with Poisson
//!   arrivals, by enumeration of processed-task patterns.
//! * [`simulator`]: receding-horizon and greedy policies over many stages.
//! * [`cli`]: the `decision-queue` command-line front end.

pub mod cli;
pub mod dynamic_solver;
pub mod error;
pub mod numeric;
pub mod sigmoid;
pub mod simulator;
pub mod static_solvers;

pub use dynamic_solver::{
    CandidateSolution, DynamicQueue, EffectivePenalty, Existence, HorizonSolution, ProcessedSet, QueueParams,
};
pub use error::{Error, Result};
pub use sigmoid::{Branch, DerivativeProfile, Sigmoid, SigmoidModel};
pub use simulator::{Evolution, Policy, SimConfig, SimulationTrace, StageKind, StageRecord};
pub use static_solvers::{
    solve_static_latency, solve_time_constrained, AllocationVector, LatencySolution, StaticReward,
    TimeConstrainedSolution,
};
