//! Exact planning on RiverSwim: optimal values, the optimal policy, and how
//! much a naive policy leaves on the table.
//!
//!     cargo run --example riverswim_oracle -- [states] [horizon]

use dprl::mdp::{
    build_riverswim, exact_value_iteration, policy_evaluation, Policy, RiverSwimParams,
};

fn main() -> dprl::Result<()> {
    let mut args = std::env::args().skip(1);
    let states: usize = args.next().map_or(6, |s| s.parse().expect("states"));
    let horizon: usize = args.next().map_or(20, |s| s.parse().expect("horizon"));

    let mdp = build_riverswim(states, horizon, &RiverSwimParams::default())?;
    let opt = exact_value_iteration(&mdp);
    println!("V*_1(s1) = {:.6}", opt.initial_value(&mdp));

    println!("optimal policy (rows = step, L/R per state):");
    for h in 0..horizon {
        let row: String = (0..states)
            .map(|s| {
                if opt.policy.action(h, s) == 0 {
                    'L'
                } else {
                    'R'
                }
            })
            .collect();
        println!("  h={:>2}  {row}", h + 1);
    }

    for (name, action) in [("always left", 0), ("always right", 1)] {
        let v = policy_evaluation(&mdp, &Policy::constant(horizon, states, action));
        println!(
            "{name:>12}: V = {:.6}, per-episode regret {:.6}",
            v[[0, 0]],
            opt.values[[0, 0]] - v[[0, 0]]
        );
    }
    Ok(())
}
