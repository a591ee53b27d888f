//! Multi-seed experiment runner: arms × runs, aggregation over runs, CSV and SVG output.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{build_riverswim, RiverSwimParams, TabularMdp};
use crate::planner::{dp_ucbvi_run, ucbvi_hoeffding_baseline, BonusRule, RegretRecord, RunConfig};
use crate::privatizer::PrivatizerKind;

/// Environment variable capping the worker threads used by [`run_experiment`].
pub const THREADS_ENV: &str = "DPRL_THREADS";

pub const CSV_HEADER: &str = "episode,arm,run,regret,cumulative_regret";
pub const AGGREGATE_HEADER: &str = "episode,arm,mean_cumulative_regret,std_error,runs";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// DP-UCBVI without privacy (Bernstein bonus on true counts).
    Ucbvi,
    /// UCBVI with the Hoeffding bonus on true counts.
    Hoeffding,
    /// DP-UCBVI with the central (Binary Mechanism) privatizer.
    Jdp,
    /// DP-UCBVI with the local (Laplace) privatizer.
    Ldp,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Ucbvi => "ucbvi",
            Algorithm::Hoeffding => "hoeffding",
            Algorithm::Jdp => "jdp",
            Algorithm::Ldp => "ldp",
        }
    }

    fn privatizer(self) -> PrivatizerKind {
        match self {
            Algorithm::Ucbvi | Algorithm::Hoeffding => PrivatizerKind::None,
            Algorithm::Jdp => PrivatizerKind::Central,
            Algorithm::Ldp => PrivatizerKind::Local,
        }
    }
}

/// One curve of the comparison, written on the command line as
/// `kind[:key=value,...]`, e.g. `jdp:eps=0.1,bonus=0.05,label=JDP-0.1`.
///
/// Keys: `eps`, `bonus` (bonus scale), `e_scale`, `e` (pinned accuracy bound), `label`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ArmSpec {
    pub label: String,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    /// Falls back to the experiment-wide bonus scale.
    pub bonus_scale: Option<f64>,
    pub e_scale: Option<f64>,
    pub e_override: Option<f64>,
}

impl ArmSpec {
    pub fn new(algorithm: Algorithm, epsilon: f64) -> Self {
        let label = match algorithm {
            Algorithm::Jdp | Algorithm::Ldp => format!("{}:eps={}", algorithm.name(), epsilon),
            _ => algorithm.name().to_string(),
        };
        Self {
            label,
            algorithm,
            epsilon,
            bonus_scale: None,
            e_scale: None,
            e_override: None,
        }
    }
}

impl FromStr for ArmSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let algorithm = match kind.trim() {
            "ucbvi" | "none" => Algorithm::Ucbvi,
            "hoeffding" => Algorithm::Hoeffding,
            "jdp" | "central" => Algorithm::Jdp,
            "ldp" | "local" => Algorithm::Ldp,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown arm kind {other:?} (expected ucbvi, hoeffding, jdp or ldp)"
                )))
            }
        };
        let mut arm = ArmSpec::new(algorithm, 1.0);
        let mut label = None;
        let number = |key: &str, v: &str| {
            v.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("arm {text:?}: {key} expects a number, got {v:?}"))
            })
        };
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("arm {text:?}: expected key=value, got {item:?}"))
            })?;
            match key.trim() {
                "eps" | "epsilon" => arm.epsilon = number(key, value)?,
                "bonus" | "bonus_scale" => arm.bonus_scale = Some(number(key, value)?),
                "e_scale" => arm.e_scale = Some(number(key, value)?),
                "e" => arm.e_override = Some(number(key, value)?),
                "label" => label = Some(value.trim().to_string()),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "arm {text:?}: unknown key {other:?}"
                    )))
                }
            }
        }
        if !(arm.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "arm {text:?}: eps must be positive"
            )));
        }
        arm.label = label.unwrap_or_else(|| {
            ArmSpec {
                label: String::new(),
                ..arm.clone()
            }
            .default_label()
        });
        Ok(arm)
    }
}

impl ArmSpec {
    fn default_label(&self) -> String {
        let mut label = ArmSpec::new(self.algorithm, self.epsilon).label;
        if let Some(b) = self.bonus_scale {
            let _ = write!(label, ",bonus={b}");
        }
        if let Some(e) = self.e_scale {
            let _ = write!(label, ",e_scale={e}");
        }
        if let Some(e) = self.e_override {
            let _ = write!(label, ",e={e}");
        }
        label
    }
}

impl TryFrom<String> for ArmSpec {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<ArmSpec> for String {
    fn from(arm: ArmSpec) -> String {
        arm.to_string()
    }
}

impl fmt::Display for ArmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:eps={}", self.algorithm.name(), self.epsilon)?;
        if let Some(b) = self.bonus_scale {
            write!(f, ",bonus={b}")?;
        }
        if let Some(e) = self.e_scale {
            write!(f, ",e_scale={e}")?;
        }
        if let Some(e) = self.e_override {
            write!(f, ",e={e}")?;
        }
        write!(f, ",label={}", self.label)
    }
}

fn default_env() -> String {
    "riverswim".into()
}
fn default_states() -> usize {
    6
}
fn default_horizon() -> usize {
    20
}
fn default_runs() -> usize {
    5
}
fn default_bonus_scale() -> f64 {
    0.1
}
fn default_beta() -> f64 {
    0.1
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// `"riverswim"` or the path of an environment JSON file.
    #[serde(default = "default_env")]
    pub environment: String,
    /// Chain length for the built-in environment.
    #[serde(default = "default_states")]
    pub states: usize,
    /// Horizon for the built-in environment (a loaded file carries its own).
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    pub episodes: u64,
    pub arms: Vec<ArmSpec>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Spacing of aggregate checkpoints; defaults to `max(1, K / 500)`.
    #[serde(default)]
    pub checkpoint_stride: Option<u64>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_bonus_scale")]
    pub bonus_scale: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

impl ExperimentSpec {
    pub fn new(episodes: u64, arms: Vec<ArmSpec>) -> Self {
        Self {
            environment: default_env(),
            states: default_states(),
            horizon: default_horizon(),
            episodes,
            arms,
            runs: default_runs(),
            base_seed: 0,
            checkpoint_stride: None,
            output_dir: default_output(),
            bonus_scale: default_bonus_scale(),
            beta: default_beta(),
        }
    }

    pub fn from_json_str(text: &str, path: impl Into<PathBuf>) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Parse {
            path: path.into(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.arms.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one arm is required".into(),
            ));
        }
        if self.episodes == 0 {
            return Err(Error::InvalidArgument("episodes must be positive".into()));
        }
        if self.checkpoint_stride == Some(0) {
            return Err(Error::InvalidArgument(
                "checkpoint stride must be positive".into(),
            ));
        }
        let mut labels: Vec<&str> = self.arms.iter().map(|a| a.label.as_str()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate arm label {:?}",
                w[0]
            )));
        }
        if let Some(bad) = self
            .arms
            .iter()
            .find(|a| a.label.contains(['\n', '"', ',']))
        {
            return Err(Error::InvalidArgument(format!(
                "arm label {:?} may not contain commas, quotes or newlines",
                bad.label
            )));
        }
        Ok(())
    }

    pub fn stride(&self) -> u64 {
        self.checkpoint_stride
            .unwrap_or((self.episodes / 500).max(1))
    }

    /// Builds or loads the environment.
    pub fn environment(&self) -> Result<TabularMdp> {
        if self.environment == "riverswim" {
            return build_riverswim(self.states, self.horizon, &RiverSwimParams::default());
        }
        TabularMdp::load(&self.environment)
    }

    /// The run configuration for `arm` and run index `run`. The seed depends
    /// only on the run index, so every arm sees the same seeds and reordering
    /// arms leaves each trace unchanged.
    pub fn run_config(&self, arm: &ArmSpec, run: usize) -> RunConfig {
        RunConfig {
            label: arm.label.clone(),
            episodes: self.episodes,
            beta: self.beta,
            epsilon: arm.epsilon,
            privatizer: arm.algorithm.privatizer(),
            bonus_rule: match arm.algorithm {
                Algorithm::Hoeffding => BonusRule::Hoeffding,
                _ => BonusRule::Bernstein,
            },
            bonus_scale: arm.bonus_scale.unwrap_or(self.bonus_scale),
            e_override: arm.e_override,
            e_scale: arm.e_scale.unwrap_or(1.0),
            zero_noise: false,
            seed: self.base_seed.wrapping_add(run as u64),
        }
    }
}

/// Mean and standard error of the cumulative regret of one arm at the checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArmAggregate {
    pub label: String,
    pub checkpoints: Vec<u64>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub runs: usize,
}

impl ArmAggregate {
    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_std_error(&self) -> f64 {
        self.std_error.last().copied().unwrap_or(0.0)
    }
}

/// Episodes `stride, 2·stride, …` with `K` always last.
pub fn checkpoints(episodes: u64, stride: u64) -> Vec<u64> {
    let stride = stride.max(1);
    let mut points: Vec<u64> = (1..=episodes / stride).map(|i| i * stride).collect();
    if points.last() != Some(&episodes) {
        points.push(episodes);
    }
    points
}

/// Sample mean and standard error (`sd / sqrt(n)`, zero for a single run).
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn aggregate(label: &str, records: &[&RegretRecord], stride: u64) -> ArmAggregate {
    let episodes = records
        .iter()
        .map(|r| r.cumulative.len())
        .min()
        .unwrap_or(0) as u64;
    let points = if episodes == 0 {
        Vec::new()
    } else {
        checkpoints(episodes, stride)
    };
    let mut mean = Vec::with_capacity(points.len());
    let mut std_error = Vec::with_capacity(points.len());
    let mut column = Vec::with_capacity(records.len());
    for &k in &points {
        column.clear();
        column.extend(records.iter().map(|r| r.cumulative[k as usize - 1]));
        let (m, se) = mean_and_std_error(&column);
        mean.push(m);
        std_error.push(se);
    }
    ArmAggregate {
        label: label.to_string(),
        checkpoints: points,
        mean,
        std_error,
        runs: records.len(),
    }
}

/// All traces of one experiment, in spec order: `records[arm][run]`.
#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub records: Vec<Vec<RegretRecord>>,
    pub aggregates: Vec<ArmAggregate>,
}

impl ExperimentReport {
    pub fn arm(&self, label: &str) -> Option<(&[RegretRecord], &ArmAggregate)> {
        let i = self.spec.arms.iter().position(|a| a.label == label)?;
        Some((&self.records[i], &self.aggregates[i]))
    }

    /// Writes `runs.csv`, `aggregate.csv` and `regret.svg` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let runs = dir.join("runs.csv");
        let agg = dir.join("aggregate.csv");
        let svg = dir.join("regret.svg");
        let all: Vec<&RegretRecord> = self.records.iter().flatten().collect();
        emit_csv(&all, &runs)?;
        emit_aggregate_csv(&self.aggregates, &agg)?;
        emit_svg_chart(&self.aggregates, &svg)?;
        Ok(vec![runs, agg, svg])
    }
}

fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn run_one(mdp: &TabularMdp, algorithm: Algorithm, config: &RunConfig) -> Result<RegretRecord> {
    match algorithm {
        Algorithm::Hoeffding => ucbvi_hoeffding_baseline(mdp, config),
        _ => dp_ucbvi_run(mdp, config),
    }
}

/// Runs every arm × run (in parallel, capped by `DPRL_THREADS`) and aggregates.
/// Nothing is written; see [`ExperimentReport::write_outputs`].
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let mdp = spec.environment()?;
    let jobs: Vec<(usize, usize)> = (0..spec.arms.len())
        .flat_map(|a| (0..spec.runs).map(move |r| (a, r)))
        .collect();
    let execute = || -> Result<Vec<RegretRecord>> {
        jobs.par_iter()
            .map(|&(a, r)| {
                let arm = &spec.arms[a];
                run_one(&mdp, arm.algorithm, &spec.run_config(arm, r))
            })
            .collect()
    };
    let flat = match thread_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?
            .install(execute)?,
        None => execute()?,
    };
    let mut flat = flat.into_iter();
    let records: Vec<Vec<RegretRecord>> = spec
        .arms
        .iter()
        .map(|_| flat.by_ref().take(spec.runs).collect())
        .collect();
    let stride = spec.stride();
    let aggregates = spec
        .arms
        .iter()
        .zip(&records)
        .map(|(arm, recs)| aggregate(&arm.label, &recs.iter().collect::<Vec<_>>(), stride))
        .collect();
    Ok(ExperimentReport {
        spec: spec.clone(),
        records,
        aggregates,
    })
}

/// Decimal rendering with 10 significant digits and no trailing zeros.
pub fn format_sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.9e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if !(-7..=15).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        let _ = write!(out, "e{exp}");
    } else if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(digits);
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            out.push_str(digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Per-episode traces, one row per (record, episode). Run indices count
/// records within each arm label, in the order given.
pub fn emit_csv(records: &[&RegretRecord], path: &Path) -> Result<()> {
    write_file(path, &render_csv(records))
}

pub fn render_csv(records: &[&RegretRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut seen: Vec<(&str, usize)> = Vec::new();
    for rec in records {
        let run = match seen.iter_mut().find(|(label, _)| *label == rec.arm) {
            Some((_, n)) => {
                *n += 1;
                *n - 1
            }
            None => {
                seen.push((&rec.arm, 1));
                0
            }
        };
        for (k, (r, c)) in rec
            .per_episode_regret
            .iter()
            .zip(&rec.cumulative)
            .enumerate()
        {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                k + 1,
                rec.arm,
                run,
                format_sig10(*r),
                format_sig10(*c)
            );
        }
    }
    out
}

pub fn emit_aggregate_csv(aggregates: &[ArmAggregate], path: &Path) -> Result<()> {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for agg in aggregates {
        for ((k, m), se) in agg.checkpoints.iter().zip(&agg.mean).zip(&agg.std_error) {
            let _ = writeln!(
                out,
                "{k},{},{},{},{}",
                agg.label,
                format_sig10(*m),
                format_sig10(*se),
                agg.runs
            );
        }
    }
    write_file(path, &out)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Line chart of mean cumulative regret with a ±1 standard-error band per arm.
pub fn render_svg_chart(aggregates: &[ArmAggregate]) -> String {
    let (width, height) = (800.0, 500.0);
    let (left, right, top, bottom) = (80.0, 200.0, 30.0, 60.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let x_max = aggregates
        .iter()
        .filter_map(|a| a.checkpoints.last())
        .copied()
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let y_top = aggregates
        .iter()
        .flat_map(|a| a.mean.iter().zip(&a.std_error).map(|(m, s)| m + s))
        .fold(0.0f64, f64::max);
    let y_max = if y_top > 0.0 { y_top * 1.05 } else { 1.0 };
    let px = |k: f64| left + plot_w * k / x_max;
    let py = |v: f64| top + plot_h * (1.0 - v.max(0.0) / y_max);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let (x0, y0, x1, y1) = (left, top + plot_h, left + plot_w, top);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (tx, ty) = (px(f * x_max), py(f * y_max));
        let _ = writeln!(
            svg,
            r#"<line x1="{tx}" y1="{y0}" x2="{tx}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{tx}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            format_tick(f * x_max)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ty}" x2="{x0}" y2="{ty}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            ty + 4.0,
            format_tick(f * y_max)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">episode</text>"#,
        left + plot_w / 2.0,
        height - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">cumulative regret</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );

    for (i, agg) in aggregates.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let upper = agg
            .checkpoints
            .iter()
            .zip(agg.mean.iter().zip(&agg.std_error));
        let mut band: Vec<String> = upper
            .clone()
            .map(|(&k, (m, s))| format!("{:.2},{:.2}", px(k as f64), py(m + s)))
            .collect();
        band.extend(
            upper
                .rev()
                .map(|(&k, (m, s))| format!("{:.2},{:.2}", px(k as f64), py(m - s))),
        );
        let _ = writeln!(
            svg,
            r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = agg
            .checkpoints
            .iter()
            .zip(&agg.mean)
            .map(|(&k, &m)| format!("{:.2},{:.2}", px(k as f64), py(m)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="mean" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.join(" ")
        );
        let ly = top + 20.0 * i as f64 + 10.0;
        let lx = left + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            xml_escape(&agg.label)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="10">shaded: ±1 std. error</text>"#,
        left + plot_w + 15.0,
        top + 20.0 * aggregates.len() as f64 + 14.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    if v >= 10_000.0 {
        format!("{:.0}k", v / 1000.0)
    } else if v >= 10.0 || v == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

pub fn emit_svg_chart(aggregates: &[ArmAggregate], path: &Path) -> Result<()> {
    write_file(path, &render_svg_chart(aggregates))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arm_parsing() {
        let arm: ArmSpec = "jdp:eps=0.1".parse().unwrap();
        assert_eq!(arm.algorithm, Algorithm::Jdp);
        assert_eq!(arm.epsilon, 0.1);
        assert_eq!(arm.label, "jdp:eps=0.1");
        let arm: ArmSpec = "ldp:eps=1,bonus=0.05,e_scale=0.5,label=local"
            .parse()
            .unwrap();
        assert_eq!(arm.bonus_scale, Some(0.05));
        assert_eq!(arm.e_scale, Some(0.5));
        assert_eq!(arm.label, "local");
        assert_eq!("ucbvi".parse::<ArmSpec>().unwrap().label, "ucbvi");
        let back: ArmSpec = arm.to_string().parse().unwrap();
        assert_eq!(back, arm);
        for bad in ["foo", "jdp:eps", "jdp:eps=x", "jdp:eps=-1", "jdp:color=red"] {
            assert!(bad.parse::<ArmSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spec_json_defaults_and_errors() {
        let spec = ExperimentSpec::from_json_str(
            r#"{"episodes": 10, "arms": ["ucbvi", "jdp:eps=1"]}"#,
            "x",
        )
        .unwrap();
        assert_eq!(spec.runs, 5);
        assert_eq!(spec.bonus_scale, 0.1);
        assert_eq!(spec.arms[1].algorithm, Algorithm::Jdp);
        assert_eq!(spec.stride(), 1);
        let err = ExperimentSpec::from_json_str(r#"{"episodes": 10, "arms": ["nope"]}"#, "x")
            .unwrap_err();
        assert!(err.is_config_error());
        let mut spec = spec;
        spec.runs = 0;
        assert!(spec.validate().is_err());
        spec.runs = 1;
        spec.arms.clear();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(10, 3), vec![3, 6, 9, 10]);
        assert_eq!(checkpoints(9, 3), vec![3, 6, 9]);
        assert_eq!(checkpoints(1, 100), vec![1]);
    }

    #[test]
    fn std_error_matches_hand_computation() {
        let (m, se) = mean_and_std_error(&[1.0, 2.0, 3.0, 6.0]);
        assert_eq!(m, 3.0);
        // sample variance 14/3
        assert!((se - (14.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_std_error(&[4.0]), (4.0, 0.0));
    }

    #[test]
    fn sig10_formatting() {
        assert_eq!(format_sig10(0.0), "0");
        assert_eq!(format_sig10(1.5), "1.5");
        assert_eq!(format_sig10(-2.0), "-2");
        assert_eq!(format_sig10(1234567.891234), "1234567.891");
        assert_eq!(format_sig10(0.000123456789012), "0.000123456789");
        assert_eq!(format_sig10(99999999999.9), "100000000000");
        assert_eq!(format_sig10(1e-12), "1e-12");
        assert_eq!(format_sig10(1.0 / 3.0), "0.3333333333");
    }

    #[test]
    fn empty_record_set_is_header_only() {
        assert_eq!(render_csv(&[]), format!("{CSV_HEADER}\n"));
    }
}
