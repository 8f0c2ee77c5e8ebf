//! Average benefit of the greedy and receding-horizon policies across arrival
//! rates, in the expected-queue evolution.

use decision_queue::simulator::benefit_sweep;
use decision_queue::{SigmoidModel, SimConfig};

fn main() -> decision_queue::Result<()> {
    let base = SimConfig::new(SigmoidModel::pew(1.0, 1.0, 5.0)?, 0.0, 0.02, 6, 150);
    let rates: Vec<f64> = (1..=8).map(|i| 0.05 * i as f64).collect();

    println!("rate   receding  greedy");
    for p in benefit_sweep(&base, &rates)? {
        println!("{:.2}   {:>8.4}  {:>6.4}", p.arrival_rate, p.receding_horizon, p.greedy);
    }
    Ok(())
}
