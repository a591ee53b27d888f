use dprl::mdp::{build_riverswim, RiverSwimParams};
use dprl::planner::*;
use dprl::privatizer::PrivatizerKind;
use ndarray::Array3;

fn river() -> dprl::TabularMdp {
    build_riverswim(6, 20, &RiverSwimParams::default()).unwrap()
}

#[test]
fn q_estimates_never_increase_over_a_run() {
    let mdp = build_riverswim(4, 6, &RiverSwimParams::default()).unwrap();
    for kind in [
        PrivatizerKind::None,
        PrivatizerKind::Central,
        PrivatizerKind::Local,
    ] {
        let config = RunConfig {
            episodes: 500,
            privatizer: kind,
            bonus_scale: 0.01,
            e_scale: 1e-3,
            seed: 4,
            ..Default::default()
        };
        let mut prev: Option<Array3<f64>> = None;
        let mut checked = 0;
        let mut observer = |view: &EpisodeView<'_>| {
            let q = &view.planner.q;
            assert!(q.iter().all(|&v| (0.0..=6.0).contains(&v)));
            if let Some(p) = &prev {
                assert!(
                    q.iter().zip(p).all(|(a, b)| a <= b),
                    "episode {}",
                    view.episode
                );
            }
            for h in 0..6 {
                for s in 0..4 {
                    let best = q
                        .slice(ndarray::s![h, s, ..])
                        .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
                    assert_eq!(view.planner.v[[h, s]], best);
                }
            }
            prev = Some(q.clone());
            checked += 1;
        };
        let rec = run_with_observer(&mdp, &config, &mut observer).unwrap();
        assert_eq!(checked, 500);
        assert!(rec.audit.q_monotone && rec.audit.q_in_range);
    }
}

#[test]
fn every_transition_estimate_is_a_distribution() {
    let mdp = build_riverswim(4, 6, &RiverSwimParams::default()).unwrap();
    for kind in [PrivatizerKind::Central, PrivatizerKind::Local] {
        let config = RunConfig {
            episodes: 300,
            privatizer: kind,
            seed: 8,
            ..Default::default()
        };
        let mut observer = |view: &EpisodeView<'_>| {
            assert!(rows_are_distributions(&view.planner.estimates.transitions));
        };
        let rec = run_with_observer(&mdp, &config, &mut observer).unwrap();
        assert!(rec.audit.max_row_sum_error <= 1e-12);
        assert!(rec.audit.min_transition_estimate >= 0.0);
    }
}

/// When the accuracy event held, private counts dominate and track the truth.
#[test]
fn private_counts_track_truth_when_contract_holds() {
    let mdp = build_riverswim(3, 4, &RiverSwimParams::default()).unwrap();
    let config = RunConfig {
        episodes: 200,
        privatizer: PrivatizerKind::Central,
        seed: 1,
        ..Default::default()
    };
    let mut observer = |view: &EpisodeView<'_>| {
        let pc = view.private_counts;
        if pc.satisfies_contract(view.true_counts) {
            for (p, t) in pc.visits.iter().zip(view.true_counts.visits.iter()) {
                assert!(*p >= *t as f64 && *p - *t as f64 <= pc.e_bound);
            }
        }
    };
    let rec = run_with_observer(&mdp, &config, &mut observer).unwrap();
    assert!(rec.assumption1_held);
}

#[test]
fn non_private_regret_is_sublinear() {
    let k = 5000usize;
    for (rule, scale) in [(BonusRule::Bernstein, 0.01), (BonusRule::Hoeffding, 0.03)] {
        let config = RunConfig {
            episodes: k as u64,
            bonus_rule: rule,
            bonus_scale: scale,
            seed: 7,
            ..Default::default()
        };
        let rec = dp_ucbvi_run(&river(), &config).unwrap();
        let rate = |n: usize| rec.cumulative[n - 1] / n as f64;
        assert!(
            rate(k / 4) > rate(k / 2) && rate(k / 2) > rate(k),
            "{rule:?}"
        );
    }
}

#[test]
fn regret_trace_is_consistent() {
    let config = RunConfig {
        episodes: 400,
        bonus_scale: 0.01,
        seed: 2,
        ..Default::default()
    };
    let rec = dp_ucbvi_run(&river(), &config).unwrap();
    let mut sum = 0.0;
    for (r, c) in rec.per_episode_regret.iter().zip(&rec.cumulative) {
        assert!(*r >= -1e-10);
        sum += r;
        assert_eq!(sum, *c);
    }
    assert!(rec.cumulative.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn seeded_runs_repeat_exactly() {
    for kind in [
        PrivatizerKind::None,
        PrivatizerKind::Central,
        PrivatizerKind::Local,
    ] {
        let config = RunConfig {
            episodes: 200,
            privatizer: kind,
            seed: 99,
            ..Default::default()
        };
        let a = dp_ucbvi_run(&river(), &config).unwrap();
        let b = dp_ucbvi_run(&river(), &config).unwrap();
        assert_eq!(a, b);
    }
}
