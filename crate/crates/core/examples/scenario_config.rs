//! Drives the command-line layer from code: parse a scenario file, override
//! one field, and run it into a temporary directory.

use decision_queue::cli::{execute, ScenarioConfig};

const SCENARIO: &str = "\
# loaded queue, one-stage lookahead
kind = simulate
pew = 1,1,5
penalty = 0.01
arrival-rate = 0.3
horizon = 3
stages = 20
policy = greedy
";

fn main() -> decision_queue::Result<()> {
    let file = ScenarioConfig::parse(SCENARIO)?;
    let mut flags = ScenarioConfig::default();
    flags.set("policy", "receding-horizon")?;
    let scenario = file.merge(flags);
    println!("effective scenario:\n{}", scenario.to_text());

    let out = std::env::temp_dir().join("decision-queue-example");
    execute(&scenario, &out, &mut std::io::stdout())?;
    Ok(())
}
