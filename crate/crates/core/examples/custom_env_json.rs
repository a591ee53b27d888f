//! Environments from JSON: write one, load it back, plan on it and learn in it.
//!
//!     cargo run --example custom_env_json -- [path]

use dprl::mdp::{exact_value_iteration, TabularMdp};
use dprl::planner::{dp_ucbvi_run, RunConfig};

const TWO_ARMED_CHAIN: &str = r#"{
  "S": 2, "A": 2, "H": 3,
  "P": [
    [[[1.0, 0.0], [0.2, 0.8]], [[1.0, 0.0], [0.0, 1.0]]],
    [[[1.0, 0.0], [0.2, 0.8]], [[1.0, 0.0], [0.0, 1.0]]],
    [[[1.0, 0.0], [0.2, 0.8]], [[1.0, 0.0], [0.0, 1.0]]]
  ],
  "r": [
    [[0.1, 0.0], [0.0, 0.9]],
    [[0.1, 0.0], [0.0, 0.9]],
    [[0.1, 0.0], [0.0, 0.9]]
  ],
  "d1": [1.0, 0.0],
  "reward_kind": "bernoulli"
}"#;

fn main() -> dprl::Result<()> {
    let mdp = match std::env::args().nth(1) {
        Some(path) => TabularMdp::load(path)?,
        None => TabularMdp::from_json_str(TWO_ARMED_CHAIN)?,
    };
    let opt = exact_value_iteration(&mdp);
    println!(
        "S = {}, A = {}, H = {}",
        mdp.states(),
        mdp.actions(),
        mdp.horizon()
    );
    println!("V*_1 = {:.4}", opt.initial_value(&mdp));

    let config = RunConfig {
        episodes: 2000,
        bonus_scale: 0.05,
        seed: 1,
        ..Default::default()
    };
    let rec = dp_ucbvi_run(&mdp, &config)?;
    println!(
        "cumulative regret after {} episodes: {:.2}",
        config.episodes,
        rec.final_regret()
    );

    match TabularMdp::from_json_str(
        r#"{"S": 2, "A": 1, "H": 1, "P": [[[0.5, 0.4]]], "r": [[[0]]], "d1": [1, 0]}"#,
    ) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("malformed file rejected: {e}"),
    }
    Ok(())
}
