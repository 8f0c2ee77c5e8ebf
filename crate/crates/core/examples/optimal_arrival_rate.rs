//! Service time at which the slope equals twice the penalty rate, and the
//! arrival rate that matches it, for a few penalty rates.

use decision_queue::simulator::optimal_arrival_rate;
use decision_queue::SigmoidModel;

fn main() -> decision_queue::Result<()> {
    let model = SigmoidModel::pew(1.0, 1.0, 5.0)?;
    for c in [0.005, 0.01, 0.02, 0.05, 0.1, 0.2] {
        match optimal_arrival_rate(&model, c) {
            Ok((tau, rate)) => println!("c = {c:<5}  tau* = {tau:.4} s  rate = {rate:.4} tasks/s"),
            Err(err) => println!("c = {c:<5}  {err}"),
        }
    }
    Ok(())
}
