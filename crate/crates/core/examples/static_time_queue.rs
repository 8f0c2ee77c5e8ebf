//! Ten tasks, thirty seconds: which ones to attempt and for how long.

use decision_queue::{solve_time_constrained, Sigmoid, SigmoidModel};

fn main() -> decision_queue::Result<()> {
    let sigmoid = Sigmoid::new(SigmoidModel::pew(1.0, 1.0, 5.0)?)?;
    let solution = solve_time_constrained(&sigmoid, 10, 30.0)?;

    for (m, value) in solution.candidate_values.iter().enumerate() {
        let mark = if m + 1 == solution.processed { "  <- best" } else { "" };
        println!("attempt {:>2} tasks: total reward {value:.6}{mark}", m + 1);
    }
    println!("allocation: {:?}", solution.allocation.as_slice());
    Ok(())
}
