//! Watches the planner episode by episode through a run observer: the
//! optimistic value at the start state, its bonus, and the private counts.
//!
//!     cargo run --example planner_trace -- [none|central|local]

use dprl::mdp::{build_riverswim, RiverSwimParams};
use dprl::planner::{run_with_observer, EpisodeView, RunConfig};
use dprl::privatizer::PrivatizerKind;

fn main() -> dprl::Result<()> {
    let privatizer = match std::env::args().nth(1).as_deref() {
        Some("central") => PrivatizerKind::Central,
        Some("local") => PrivatizerKind::Local,
        _ => PrivatizerKind::None,
    };
    let mdp = build_riverswim(4, 8, &RiverSwimParams::default())?;
    let config = RunConfig {
        episodes: 3000,
        privatizer,
        bonus_scale: 0.02,
        seed: 3,
        ..Default::default()
    };
    println!(
        "{:>6} {:>8} {:>8} {:>10} {:>10} {:>8}",
        "k", "V~_1", "V*_1", "bonus(R)", "N~(s1,R)", "regret"
    );
    let mut observer = |view: &EpisodeView<'_>| {
        if view.episode.is_power_of_two() || view.episode.is_multiple_of(500) {
            println!(
                "{:>6} {:>8.3} {:>8.3} {:>10.3} {:>10.1} {:>8.3}",
                view.episode,
                view.planner.v[[0, 0]],
                view.optimal.values[[0, 0]],
                view.planner.bonus[[0, 0, 1]],
                view.private_counts.visits[[0, 0, 1]],
                view.regret
            );
        }
    };
    let rec = run_with_observer(&mdp, &config, &mut observer)?;
    println!(
        "final cumulative regret {:.2}, Q monotone: {}",
        rec.final_regret(),
        rec.audit.q_monotone
    );
    Ok(())
}
