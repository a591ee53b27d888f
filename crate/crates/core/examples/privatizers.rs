//! Feeds the same trajectories to the none, central and local privatizers and
//! compares what each hands to the planner.
//!
//!     cargo run --example privatizers -- [epsilon] [episodes]

use dprl::mdp::{build_riverswim, sample_episode, Policy, RiverSwimParams};
use dprl::privatizer::{build_privatizer, PrivacyBudget, PrivatizerConfig, PrivatizerKind};
use dprl::stats::CountTables;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dprl::Result<()> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map_or(1.0, |s| s.parse().expect("epsilon"));
    let episodes: u64 = args.next().map_or(2000, |s| s.parse().expect("episodes"));
    let (s_n, h_n) = (4, 5);
    let mdp = build_riverswim(s_n, h_n, &RiverSwimParams::default())?;
    let policy = Policy::constant(h_n, s_n, 1);

    for kind in [
        PrivatizerKind::None,
        PrivatizerKind::Central,
        PrivatizerKind::Local,
    ] {
        let config = PrivatizerConfig::new(kind, epsilon, 0.1, episodes, (h_n, s_n, 2));
        let mut privatizer = build_privatizer(&config)?;
        let budget = PrivacyBudget::for_config(&config);
        let mut env_rng = ChaCha8Rng::seed_from_u64(1);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = CountTables::new(h_n, s_n, 2);
        for _ in 0..episodes {
            let traj = sample_episode(&mdp, &policy, &mut env_rng);
            counts.update_with_trajectory(&traj)?;
            privatizer.on_episode_end(&counts, &traj, &mut noise_rng)?;
        }
        let pc = privatizer.current();
        println!(
            "{kind:?}: E = {:.1}, per-trajectory epsilon {:.3}, contract held: {}",
            pc.e_bound,
            budget.per_trajectory_epsilon,
            pc.satisfies_contract(&counts)
        );
        for s in 0..s_n {
            println!(
                "  N_1({s}, right) = {:>5}   private {:>10.1}",
                counts.visits[[0, s, 1]],
                pc.visits[[0, s, 1]]
            );
        }
    }
    Ok(())
}
