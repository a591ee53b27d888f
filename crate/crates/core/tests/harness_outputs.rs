use std::path::PathBuf;

use dprl::harness::*;
use dprl::planner::RegretRecord;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dprl-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn small_spec(out: PathBuf) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(
        60,
        vec![
            "ucbvi".parse().unwrap(),
            "jdp:eps=1".parse().unwrap(),
            "ldp:eps=1".parse().unwrap(),
        ],
    );
    spec.states = 4;
    spec.horizon = 5;
    spec.runs = 3;
    spec.base_seed = 11;
    spec.checkpoint_stride = Some(7);
    spec.output_dir = out;
    spec
}

fn parse_rows(text: &str) -> Vec<(u64, String, usize, f64, f64)> {
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f.len(), 5);
            (
                f[0].parse().unwrap(),
                f[1].to_string(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
            )
        })
        .collect()
}

fn close10(a: f64, b: f64) -> bool {
    a == b || ((a - b) / b.abs().max(f64::MIN_POSITIVE)).abs() <= 5e-10
}

#[test]
fn csv_round_trip_and_determinism() {
    let dir = scratch("csv");
    let spec = small_spec(dir.clone());
    let report = run_experiment(&spec).unwrap();
    report.write_outputs(&dir).unwrap();
    let first = std::fs::read(dir.join("runs.csv")).unwrap();
    let first_agg = std::fs::read(dir.join("aggregate.csv")).unwrap();

    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("episode,arm,run,regret,cumulative_regret\n"));
    assert!(!text.contains('\r'));
    let rows = parse_rows(&text);
    assert_eq!(rows.len(), 3 * 3 * 60);
    let mut i = 0;
    for (a, recs) in report.records.iter().enumerate() {
        for (run, rec) in recs.iter().enumerate() {
            for k in 0..60 {
                let (ep, arm, r, reg, cum) = &rows[i];
                assert_eq!(
                    (*ep, arm.as_str(), *r),
                    (k as u64 + 1, spec.arms[a].label.as_str(), run)
                );
                assert!(
                    close10(*reg, rec.per_episode_regret[k]) && close10(*cum, rec.cumulative[k])
                );
                i += 1;
            }
        }
    }

    let again = run_experiment(&spec).unwrap();
    let dir2 = scratch("csv-again");
    again.write_outputs(&dir2).unwrap();
    assert_eq!(first, std::fs::read(dir2.join("runs.csv")).unwrap());
    assert_eq!(
        first_agg,
        std::fs::read(dir2.join("aggregate.csv")).unwrap()
    );
    std::fs::remove_dir_all(dir).ok();
    std::fs::remove_dir_all(dir2).ok();
}

#[test]
fn aggregate_is_recomputable_from_runs() {
    let report = run_experiment(&small_spec(scratch("agg"))).unwrap();
    for (recs, agg) in report.records.iter().zip(&report.aggregates) {
        assert_eq!(agg.checkpoints, vec![7, 14, 21, 28, 35, 42, 49, 56, 60]);
        for (j, &k) in agg.checkpoints.iter().enumerate() {
            let vals: Vec<f64> = recs.iter().map(|r| r.cumulative[k as usize - 1]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            assert!((agg.mean[j] - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            let var =
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
            assert!((agg.std_error[j] - (var / vals.len() as f64).sqrt()).abs() <= 1e-9);
        }
    }
}

#[test]
fn arm_order_does_not_change_traces() {
    let spec = small_spec(scratch("perm"));
    let mut reversed = spec.clone();
    reversed.arms.reverse();
    std::env::set_var(THREADS_ENV, "1");
    let a = run_experiment(&spec).unwrap();
    let b = run_experiment(&reversed).unwrap();
    for arm in &spec.arms {
        assert_eq!(a.arm(&arm.label).unwrap().0, b.arm(&arm.label).unwrap().0);
    }
}

#[test]
fn degenerate_spec_gives_one_row() {
    let mut spec = ExperimentSpec::new(1, vec!["ucbvi".parse().unwrap()]);
    spec.runs = 1;
    let report = run_experiment(&spec).unwrap();
    let recs: Vec<&RegretRecord> = report.records.iter().flatten().collect();
    let csv = render_csv(&recs);
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("1,ucbvi,0,"));
}

#[test]
fn svg_is_well_formed_with_one_point_per_checkpoint() {
    let report = run_experiment(&small_spec(scratch("svg"))).unwrap();
    let svg = render_svg_chart(&report.aggregates);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let lines: Vec<_> = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .collect();
    assert_eq!(lines.len(), 3);
    for (node, agg) in lines.iter().zip(&report.aggregates) {
        let points = node.attribute("points").unwrap().split_whitespace().count();
        assert_eq!(points, agg.checkpoints.len());
    }
    assert_eq!(
        doc.descendants()
            .filter(|n| n.has_tag_name("polygon"))
            .count(),
        3
    );
    let texts: Vec<&str> = doc.descendants().filter_map(|n| n.text()).collect();
    for needle in [
        "episode",
        "cumulative regret",
        "ucbvi",
        "jdp:eps=1",
        "ldp:eps=1",
    ] {
        assert!(texts.contains(&needle), "missing {needle}");
    }
}

#[test]
fn flat_zero_curve_sits_on_the_baseline() {
    let agg = ArmAggregate {
        label: "flat".into(),
        checkpoints: vec![1, 2, 3, 4],
        mean: vec![0.0; 4],
        std_error: vec![0.0; 4],
        runs: 1,
    };
    let svg = render_svg_chart(&[agg]);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let line = doc
        .descendants()
        .find(|n| n.has_tag_name("polyline"))
        .unwrap();
    let ys: Vec<f64> = line
        .attribute("points")
        .unwrap()
        .split_whitespace()
        .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let axis = doc.descendants().find(|n| n.has_tag_name("path")).unwrap();
    let baseline: f64 = axis
        .attribute("d")
        .unwrap()
        .split('L')
        .nth(1)
        .unwrap()
        .trim()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        ys.iter().all(|&y| (y - baseline).abs() < 1e-9),
        "{ys:?} vs {baseline}"
    );
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dprl::cli::run(
        std::iter::once("dprl").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn cli_exit_codes() {
    let (code, out, _) = cli(&["oracle", "--states", "6", "--horizon", "20"]);
    assert_eq!(code, 0);
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - 2.6950707375085363).abs() < 1e-12);

    assert_eq!(cli(&["run", "--episodes", "3", "--arm", "nope"]).0, 1);
    assert_eq!(cli(&["run", "--episodes", "3"]).0, 1, "no arms");
    assert_eq!(cli(&["frobnicate"]).0, 1);
    assert_eq!(cli(&["--help"]).0, 0);

    let dir = scratch("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"S": 1, "A": 1, "H": 1, "P": [[[[0.5]]]], "r": [[[0.0]]], "d1": [1.0]}"#,
    )
    .unwrap();
    let (code, _, err) = cli(&["validate-env", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("P[0][0][0]"), "{err}");

    let spec = dir.join("spec.json");
    let out_dir = dir.join("out");
    std::fs::write(
        &spec,
        format!(
            r#"{{"episodes": 20, "states": 3, "horizon": 4, "runs": 2, "arms": ["ucbvi", "jdp:eps=1"], "output_dir": {:?}}}"#,
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let (code, out, err) = cli(&["run", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("jdp:eps=1"));
    for f in ["runs.csv", "aggregate.csv", "regret.svg"] {
        assert!(out_dir.join(f).exists());
    }

    // output path blocked by a regular file
    let blocked = dir.join("blocked");
    std::fs::write(&blocked, "x").unwrap();
    let (code, _, _) = cli(&[
        "run",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        blocked.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(dir).ok();
}
