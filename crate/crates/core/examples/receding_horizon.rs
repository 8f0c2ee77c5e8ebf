//! Runs the receding-horizon policy with sampled Poisson arrivals and prints
//! the first stages of the trace.

use decision_queue::simulator::run_policy;
use decision_queue::{Evolution, SigmoidModel, SimConfig, StageKind};

fn main() -> decision_queue::Result<()> {
    let config = SimConfig {
        evolution: Evolution::Sampled,
        seed: 2024,
        initial_queue: 2.0,
        ..SimConfig::new(SigmoidModel::pew(1.0, 1.0, 5.0)?, 0.2, 0.01, 4, 50)
    };
    let trace = run_policy(&config)?;

    println!("stage  queue  duration  arrivals  benefit");
    for r in trace.records.iter().take(15) {
        let kind = if r.kind == StageKind::Idle { " (idle)" } else { "" };
        println!(
            "{:>5}  {:>5}  {:>8.3}  {:>8}  {:>7.4}{kind}",
            r.stage, r.queue_before, r.duration, r.arrivals, r.benefit
        );
    }
    println!("average benefit over {} stages: {:.4}", trace.records.len(), trace.average_benefit());
    Ok(())
}
