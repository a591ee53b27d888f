//! Multi-seed comparison of non-private, JDP and LDP arms with CSV and SVG output.
//! The default is a short run; pass `50000` for the full-length experiment.
//!
//!     cargo run --release --example regret_comparison -- [episodes] [out_dir]

use dprl::harness::{run_experiment, ExperimentSpec};

fn main() -> dprl::Result<()> {
    let mut args = std::env::args().skip(1);
    let episodes: u64 = args.next().map_or(5000, |s| s.parse().expect("episodes"));
    let out = args.next().unwrap_or_else(|| "results/comparison".into());

    let arms = ["ucbvi", "hoeffding", "jdp:eps=1", "jdp:eps=10", "ldp:eps=1"]
        .iter()
        .map(|a| a.parse())
        .collect::<dprl::Result<Vec<_>>>()?;
    let mut spec = ExperimentSpec::new(episodes, arms);
    spec.runs = 5;
    spec.base_seed = 7;
    spec.output_dir = out.into();

    let report = run_experiment(&spec)?;
    for agg in &report.aggregates {
        println!(
            "{:>12}: {:>10.1} ± {:.1}",
            agg.label,
            agg.final_mean(),
            agg.final_std_error()
        );
    }
    for path in report.write_outputs(&spec.output_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
