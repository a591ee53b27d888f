//! Privatizers turn the true counters into private counts that satisfy the
//! accuracy contract the planner relies on:
//!
//! 1. every private counter is within `E` of its true value,
//! 2. `Ñ(s,a) = Σ_{s'} Ñ(s,a,s') >= N(s,a)` and `Ñ(s,a,s') > 0`.
//!
//! All three implementations share one post-processing path: noisy
//! `N̂(s,a,s')`, `N̂(s,a)` are projected onto the consistency constraints with
//! slack `E/4` and then shifted by `E/(2S)` per destination.

use ndarray::{s, Array3, Array4, Zip};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Trajectory;
use crate::mechanisms::{laplace_sum_bound, tree_depth, BinaryMechanismCounter, LaplaceNoise};
use crate::projection::{finalize_into, project_into};
use crate::stats::CountTables;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrivatizerKind {
    /// Non-private passthrough.
    None,
    /// Joint DP through Binary Mechanism counters.
    Central,
    /// Local DP through per-episode Laplace perturbation.
    Local,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivatizerConfig {
    pub kind: PrivatizerKind,
    pub epsilon: f64,
    pub beta: f64,
    /// Episode budget `K`.
    pub episodes: u64,
    pub horizon: usize,
    pub states: usize,
    pub actions: usize,
    /// Replaces the computed accuracy bound `E` outright.
    pub e_override: Option<f64>,
    /// Multiplier on the computed `E` (ignored when `e_override` is set).
    pub e_scale: f64,
    /// Test hook: mechanisms add no noise.
    pub zero_noise: bool,
}

impl PrivatizerConfig {
    pub fn new(
        kind: PrivatizerKind,
        epsilon: f64,
        beta: f64,
        episodes: u64,
        (horizon, states, actions): (usize, usize, usize),
    ) -> Self {
        Self {
            kind,
            epsilon,
            beta,
            episodes,
            horizon,
            states,
            actions,
            e_override: None,
            e_scale: 1.0,
            zero_noise: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if self.episodes == 0 || self.horizon == 0 || self.states == 0 || self.actions == 0 {
            return Err(Error::InvalidArgument(
                "K, H, S and A must be positive".into(),
            ));
        }
        if let Some(e) = self.e_override {
            if !(e >= 0.0) || !e.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "E override must be nonnegative, got {e}"
                )));
            }
        }
        if !(self.e_scale >= 0.0) || !self.e_scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "E scale must be nonnegative, got {}",
                self.e_scale
            )));
        }
        Ok(())
    }

    /// `HSA + HS²A + HSA`: visit, transition and reward streams.
    pub fn stream_count(&self) -> u64 {
        let hsa = (self.horizon * self.states * self.actions) as u64;
        2 * hsa + hsa * self.states as u64
    }

    /// Per-node budget of the Binary Mechanism counters,
    /// `ε / (3 H D)` with `D = floor(log2 K) + 1` tree levels.
    pub fn central_eps_prime(&self) -> f64 {
        self.epsilon / (3.0 * self.horizon as f64 * tree_depth(self.episodes) as f64)
    }

    /// Laplace scale of the local perturbation, `3H / ε`.
    pub fn local_scale(&self) -> f64 {
        3.0 * self.horizon as f64 / self.epsilon
    }
}

/// Accuracy bound `E` before overrides: with probability at least `1 - β/3`
/// every noisy counter over all streams and episodes is within `E/4` of the truth.
pub fn raw_e_bound(config: &PrivatizerConfig) -> f64 {
    let per_stream_beta = config.beta / (3.0 * config.stream_count() as f64);
    match config.kind {
        PrivatizerKind::None => 0.0,
        PrivatizerKind::Central => {
            // a release sums at most D Laplace(1/ε') draws; union over all K releases
            let delta = per_stream_beta / config.episodes as f64;
            let depth = tree_depth(config.episodes) as u64;
            4.0 * laplace_sum_bound(1.0 / config.central_eps_prime(), depth, delta)
        }
        PrivatizerKind::Local => {
            let delta = per_stream_beta / config.episodes as f64;
            4.0 * laplace_sum_bound(config.local_scale(), config.episodes, delta)
        }
    }
}

/// The `E` a privatizer built from `config` works with.
pub fn privatizer_e_bound(config: &PrivatizerConfig) -> f64 {
    config
        .e_override
        .unwrap_or_else(|| config.e_scale * raw_e_bound(config))
}

/// Per-trajectory privacy accounting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrivacyBudget {
    pub streams: u64,
    /// Budget spent per noisy release unit (tree node or perturbed cell).
    pub unit_epsilon: f64,
    /// Noisy units one trajectory can influence in a single stream family.
    pub units_per_family: u64,
    pub families: u64,
    pub per_trajectory_epsilon: f64,
}

impl PrivacyBudget {
    pub fn for_config(config: &PrivatizerConfig) -> Self {
        let h = config.horizon as u64;
        let (unit_epsilon, units_per_family) = match config.kind {
            PrivatizerKind::None => (0.0, 0),
            PrivatizerKind::Central => (
                config.central_eps_prime(),
                h * tree_depth(config.episodes) as u64,
            ),
            // one episode's indicators have l1 sensitivity H against scale 3H/ε
            PrivatizerKind::Local => (config.epsilon / (3.0 * h as f64), h),
        };
        Self {
            streams: config.stream_count(),
            unit_epsilon,
            units_per_family,
            families: 3,
            per_trajectory_epsilon: 3.0 * units_per_family as f64 * unit_epsilon,
        }
    }
}

/// Private counters handed to the planner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivateCounts {
    /// `Ñ_h(s, a)`
    pub visits: Array3<f64>,
    /// `Ñ_h(s, a, s')`
    pub transitions: Array4<f64>,
    /// `R̃_h(s, a)`
    pub rewards: Array3<f64>,
    pub e_bound: f64,
}

impl PrivateCounts {
    pub fn zeros(horizon: usize, states: usize, actions: usize, e_bound: f64) -> Self {
        Self {
            visits: Array3::zeros((horizon, states, actions)),
            transitions: Array4::zeros((horizon, states, actions, states)),
            rewards: Array3::zeros((horizon, states, actions)),
            e_bound,
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.visits.dim()
    }

    /// `Ñ_h(s) = Σ_a Ñ_h(s, a)`.
    pub fn state_visits(&self, h: usize, s: usize) -> f64 {
        self.visits.slice(s![h, s, ..]).sum()
    }

    /// Exact marginal consistency `Ñ(s,a) = Σ_{s'} Ñ(s,a,s')`.
    pub fn is_consistent(&self) -> bool {
        let (hn, sn, an) = self.dims();
        for h in 0..hn {
            for s in 0..sn {
                for a in 0..an {
                    let row_sum = self
                        .transitions
                        .slice(s![h, s, a, ..])
                        .iter()
                        .fold(0.0, |acc, &v| acc + v);
                    if row_sum != self.visits[[h, s, a]] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether both items of the accuracy contract hold against `truth`.
    pub fn satisfies_contract(&self, truth: &CountTables) -> bool {
        let e = self.e_bound;
        let within = |private: f64, real: f64| (private - real).abs() <= e;
        let counts_ok = Zip::from(&self.transitions)
            .and(&truth.transitions)
            .all(|&p, &t| within(p, t as f64) && (e == 0.0 || p > 0.0));
        let visits_ok = Zip::from(&self.visits)
            .and(&truth.visits)
            .all(|&p, &t| within(p, t as f64) && p >= t as f64);
        let rewards_ok = Zip::from(&self.rewards)
            .and(&truth.rewards)
            .all(|&p, &t| within(p, t));
        counts_ok && visits_ok && rewards_ok && self.is_consistent()
    }
}

/// A source of private counts, advanced once per episode.
pub trait Privatizer: Send {
    fn config(&self) -> &PrivatizerConfig;

    fn e_bound(&self) -> f64;

    /// Counts for the next episode's planning step (all zero before the first episode).
    fn current(&self) -> &PrivateCounts;

    /// Consume one finished episode. `counts` must already include `traj`.
    fn on_episode_end(
        &mut self,
        counts: &CountTables,
        traj: &Trajectory,
        rng: &mut dyn RngCore,
    ) -> Result<&PrivateCounts>;

    /// Noisy releases `(N̂(s,a), N̂(s,a,s'))` before projection, for audits.
    fn noisy_counts(&self) -> (&Array3<f64>, &Array4<f64>);
}

pub fn build_privatizer(config: &PrivatizerConfig) -> Result<Box<dyn Privatizer>> {
    config.validate()?;
    Ok(match config.kind {
        PrivatizerKind::None => Box::new(NonePrivatizer::new(config.clone())),
        PrivatizerKind::Central => Box::new(CentralPrivatizer::new(config.clone())?),
        PrivatizerKind::Local => Box::new(LocalPrivatizer::new(config.clone())?),
    })
}

/// Buffers shared by every privatizer: the noisy releases and the projected result.
#[derive(Clone, Debug)]
struct Released {
    noisy_visits: Array3<f64>,
    noisy_transitions: Array4<f64>,
    out: PrivateCounts,
    scratch: Vec<f64>,
    episodes: u64,
}

impl Released {
    fn new(config: &PrivatizerConfig, e_bound: f64) -> Self {
        let (hn, sn, an) = (config.horizon, config.states, config.actions);
        Self {
            noisy_visits: Array3::zeros((hn, sn, an)),
            noisy_transitions: Array4::zeros((hn, sn, an, sn)),
            out: PrivateCounts::zeros(hn, sn, an, e_bound),
            scratch: vec![0.0; sn],
            episodes: 0,
        }
    }

    fn begin_episode(
        &mut self,
        config: &PrivatizerConfig,
        counts: &CountTables,
        traj: &Trajectory,
    ) -> Result<()> {
        if self.episodes >= config.episodes {
            return Err(Error::InvalidState(format!(
                "episode budget K = {} exhausted",
                config.episodes
            )));
        }
        if counts.dims() != (config.horizon, config.states, config.actions)
            || traj.steps.len() != config.horizon
        {
            return Err(Error::Structural(
                "counters or trajectory do not match privatizer dimensions".into(),
            ));
        }
        self.episodes += 1;
        Ok(())
    }

    /// Project `noisy_*` into `out` with slack `E/4` and shift by `E/(2S)`.
    fn post_process(&mut self) {
        let e = self.out.e_bound;
        let slack = e / 4.0;
        let (hn, sn, an) = self.out.dims();
        for h in 0..hn {
            for s in 0..sn {
                for a in 0..an {
                    let dest = self.noisy_transitions.slice(s![h, s, a, ..]);
                    let dest = dest.as_slice().expect("contiguous rows");
                    project_into(dest, self.noisy_visits[[h, s, a]], slack, &mut self.scratch);
                    let total = finalize_into(&mut self.scratch, e);
                    self.out
                        .transitions
                        .slice_mut(s![h, s, a, ..])
                        .as_slice_mut()
                        .expect("contiguous rows")
                        .copy_from_slice(&self.scratch);
                    self.out.visits[[h, s, a]] = total;
                }
            }
        }
    }
}

/// Non-private baseline: the noisy counts are the true counts.
#[derive(Clone, Debug)]
pub struct NonePrivatizer {
    config: PrivatizerConfig,
    released: Released,
}

impl NonePrivatizer {
    pub fn new(config: PrivatizerConfig) -> Self {
        let e = privatizer_e_bound(&config);
        let released = Released::new(&config, e);
        Self { config, released }
    }
}

impl Privatizer for NonePrivatizer {
    fn config(&self) -> &PrivatizerConfig {
        &self.config
    }

    fn e_bound(&self) -> f64 {
        self.released.out.e_bound
    }

    fn current(&self) -> &PrivateCounts {
        &self.released.out
    }

    fn on_episode_end(
        &mut self,
        counts: &CountTables,
        traj: &Trajectory,
        _rng: &mut dyn RngCore,
    ) -> Result<&PrivateCounts> {
        self.released.begin_episode(&self.config, counts, traj)?;
        let r = &mut self.released;
        Zip::from(&mut r.noisy_visits)
            .and(&counts.visits)
            .for_each(|n, &c| *n = c as f64);
        Zip::from(&mut r.noisy_transitions)
            .and(&counts.transitions)
            .for_each(|n, &c| *n = c as f64);
        r.out.rewards.assign(&counts.rewards);
        r.post_process();
        Ok(&self.released.out)
    }

    fn noisy_counts(&self) -> (&Array3<f64>, &Array4<f64>) {
        (
            &self.released.noisy_visits,
            &self.released.noisy_transitions,
        )
    }
}

/// Joint-DP privatizer: one Binary Mechanism counter per visit, transition and
/// reward stream, each run at `ε' = ε / (3 H D)`.
///
/// Every stream receives a value each episode (the indicator or realized
/// reward, zero when the cell was not visited), so untouched cells are released
/// with noise like any other.
#[derive(Clone, Debug)]
pub struct CentralPrivatizer {
    config: PrivatizerConfig,
    visit_counters: Vec<BinaryMechanismCounter>,
    transition_counters: Vec<BinaryMechanismCounter>,
    reward_counters: Vec<BinaryMechanismCounter>,
    released: Released,
}

impl CentralPrivatizer {
    pub fn new(config: PrivatizerConfig) -> Result<Self> {
        config.validate()?;
        let eps_prime = config.central_eps_prime();
        let make = |n: usize| -> Result<Vec<BinaryMechanismCounter>> {
            (0..n)
                .map(|_| {
                    if config.zero_noise {
                        BinaryMechanismCounter::zero_noise(config.episodes, eps_prime)
                    } else {
                        BinaryMechanismCounter::new(config.episodes, eps_prime)
                    }
                })
                .collect()
        };
        let hsa = config.horizon * config.states * config.actions;
        let e = privatizer_e_bound(&config);
        Ok(Self {
            visit_counters: make(hsa)?,
            transition_counters: make(hsa * config.states)?,
            reward_counters: make(hsa)?,
            released: Released::new(&config, e),
            config,
        })
    }

    pub fn budget(&self) -> PrivacyBudget {
        PrivacyBudget::for_config(&self.config)
    }

    pub fn eps_prime(&self) -> f64 {
        self.config.central_eps_prime()
    }
}

impl Privatizer for CentralPrivatizer {
    fn config(&self) -> &PrivatizerConfig {
        &self.config
    }

    fn e_bound(&self) -> f64 {
        self.released.out.e_bound
    }

    fn current(&self) -> &PrivateCounts {
        &self.released.out
    }

    fn on_episode_end(
        &mut self,
        counts: &CountTables,
        traj: &Trajectory,
        rng: &mut dyn RngCore,
    ) -> Result<&PrivateCounts> {
        self.released.begin_episode(&self.config, counts, traj)?;
        let (sn, an) = (self.config.states, self.config.actions);
        let r = &mut self.released;
        for h in 0..self.config.horizon {
            let step = traj.steps[h];
            let next = traj.next_state(h);
            for s in 0..sn {
                for a in 0..an {
                    let cell = (h * sn + s) * an + a;
                    let visited = step.state == s && step.action == a;
                    let indicator = if visited { 1.0 } else { 0.0 };
                    let reward = if visited { step.reward } else { 0.0 };

                    let vc = &mut self.visit_counters[cell];
                    vc.append(indicator, &mut *rng)?;
                    r.noisy_visits[[h, s, a]] = vc.release()?;

                    let rc = &mut self.reward_counters[cell];
                    rc.append(reward, &mut *rng)?;
                    r.out.rewards[[h, s, a]] = rc.release()?;

                    for dest in 0..sn {
                        let tc = &mut self.transition_counters[cell * sn + dest];
                        tc.append(if visited && next == dest { 1.0 } else { 0.0 }, &mut *rng)?;
                        r.noisy_transitions[[h, s, a, dest]] = tc.release()?;
                    }
                }
            }
        }
        r.post_process();
        Ok(&self.released.out)
    }

    fn noisy_counts(&self) -> (&Array3<f64>, &Array4<f64>) {
        (
            &self.released.noisy_visits,
            &self.released.noisy_transitions,
        )
    }
}

/// Local-DP privatizer: each episode's indicators and reward contributions are
/// perturbed with `Laplace(3H/ε)` before being added to running sums.
#[derive(Clone, Debug)]
pub struct LocalPrivatizer {
    config: PrivatizerConfig,
    noise: Option<LaplaceNoise>,
    released: Released,
}

impl LocalPrivatizer {
    pub fn new(config: PrivatizerConfig) -> Result<Self> {
        config.validate()?;
        let noise = if config.zero_noise {
            None
        } else {
            Some(LaplaceNoise::new(config.local_scale())?)
        };
        let e = privatizer_e_bound(&config);
        Ok(Self {
            released: Released::new(&config, e),
            noise,
            config,
        })
    }

    pub fn budget(&self) -> PrivacyBudget {
        PrivacyBudget::for_config(&self.config)
    }
}

impl Privatizer for LocalPrivatizer {
    fn config(&self) -> &PrivatizerConfig {
        &self.config
    }

    fn e_bound(&self) -> f64 {
        self.released.out.e_bound
    }

    fn current(&self) -> &PrivateCounts {
        &self.released.out
    }

    fn on_episode_end(
        &mut self,
        counts: &CountTables,
        traj: &Trajectory,
        rng: &mut dyn RngCore,
    ) -> Result<&PrivateCounts> {
        self.released.begin_episode(&self.config, counts, traj)?;
        let (sn, an) = (self.config.states, self.config.actions);
        let noise = self.noise;
        let mut perturb = |v: f64| match &noise {
            Some(lap) => v + lap.sample(&mut *rng),
            None => v,
        };
        let r = &mut self.released;
        for h in 0..self.config.horizon {
            let step = traj.steps[h];
            let next = traj.next_state(h);
            for s in 0..sn {
                for a in 0..an {
                    let visited = step.state == s && step.action == a;
                    r.noisy_visits[[h, s, a]] += perturb(if visited { 1.0 } else { 0.0 });
                    r.out.rewards[[h, s, a]] += perturb(if visited { step.reward } else { 0.0 });
                    for dest in 0..sn {
                        let hit = visited && next == dest;
                        r.noisy_transitions[[h, s, a, dest]] +=
                            perturb(if hit { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        r.post_process();
        Ok(&self.released.out)
    }

    fn noisy_counts(&self) -> (&Array3<f64>, &Array4<f64>) {
        (
            &self.released.noisy_visits,
            &self.released.noisy_transitions,
        )
    }
}
