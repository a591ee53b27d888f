//! One DP-UCBVI run on RiverSwim with a chosen privatizer.
//!
//!     cargo run --release --example single_run -- [none|central|local] [epsilon] [episodes] [bonus_scale]

use dprl::mdp::{build_riverswim, RiverSwimParams};
use dprl::planner::{dp_ucbvi_run, RunConfig};
use dprl::privatizer::{privatizer_e_bound, PrivatizerKind};

fn main() -> dprl::Result<()> {
    let mut args = std::env::args().skip(1);
    let privatizer = match args.next().as_deref().unwrap_or("none") {
        "central" | "jdp" => PrivatizerKind::Central,
        "local" | "ldp" => PrivatizerKind::Local,
        _ => PrivatizerKind::None,
    };
    let epsilon: f64 = args.next().map_or(1.0, |s| s.parse().expect("epsilon"));
    let episodes: u64 = args.next().map_or(5000, |s| s.parse().expect("episodes"));
    let bonus_scale: f64 = args
        .next()
        .map_or(0.01, |s| s.parse().expect("bonus_scale"));

    let mdp = build_riverswim(6, 20, &RiverSwimParams::default())?;
    let config = RunConfig {
        episodes,
        epsilon,
        privatizer,
        bonus_scale,
        seed: 7,
        ..Default::default()
    };
    println!(
        "E = {:.3e}",
        privatizer_e_bound(&config.privatizer_config(&mdp))
    );
    let rec = dp_ucbvi_run(&mdp, &config)?;
    for frac in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let k = ((episodes as f64 * frac) as usize).max(1);
        println!(
            "episode {k:>7}: cumulative regret {:>10.2}",
            rec.cumulative[k - 1]
        );
    }
    println!(
        "contract held: {}, optimistic episodes: {}/{episodes}",
        rec.assumption1_held, rec.audit.optimistic_episodes
    );
    Ok(())
}
