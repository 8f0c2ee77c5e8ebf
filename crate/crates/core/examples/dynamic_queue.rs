//! Finite-horizon allocation with arrivals. Prints the winning pattern of
//! processed stages and how many of the 2^N patterns had a stationary point.

use decision_queue::{DynamicQueue, QueueParams, Sigmoid, SigmoidModel};

fn main() -> decision_queue::Result<()> {
    let sigmoid = Sigmoid::new(SigmoidModel::pew(1.0, 1.0, 5.0)?)?;
    for lambda in [0.0, 0.1, 0.3, 0.6] {
        let params = QueueParams::new(6.0, lambda, 0.01, 6)?;
        let solution = DynamicQueue::new(sigmoid, params)?.solve_finite_horizon()?;
        let best = &solution.best;
        let durations: Vec<String> = best.allocation.as_slice().iter().map(|t| format!("{t:.3}")).collect();
        println!("lambda {lambda:.1}: pattern {} J = {:.6}", best.processed, best.objective);
        println!("  durations [{}]", durations.join(", "));
        println!(
            "  {} patterns, {} solved, {} feasible",
            solution.stats.enumerated, solution.stats.solved, solution.stats.feasible
        );
    }
    Ok(())
}
