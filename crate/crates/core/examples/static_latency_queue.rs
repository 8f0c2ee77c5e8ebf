//! A queue of ten tasks where every waiting task costs 0.02 per second.
//! Early tasks face more waiting tasks behind them, so they get less time
//! or none at all.

use decision_queue::{solve_static_latency, Sigmoid, SigmoidModel};

fn main() -> decision_queue::Result<()> {
    let sigmoid = Sigmoid::new(SigmoidModel::pew(1.0, 1.0, 5.0)?)?;
    let solution = solve_static_latency(&sigmoid, 10, 0.02)?;

    println!("task  rate    duration");
    for (k, (t, rate)) in solution.allocation.as_slice().iter().zip(&solution.penalty_rates).enumerate() {
        println!("{:>4}  {rate:.2}  {t:>9.6}", k + 1);
    }
    println!("average benefit per task: {:.6}", solution.reward.total);
    Ok(())
}
