//! Ground-truth tabular episodic MDPs: construction, sampling and exact planning.
//!
//! Steps are indexed `0..H` internally; value tables carry an extra row `H`
//! holding the terminal value `0`.

use std::path::Path;

use ndarray::{s, Array1, Array2, Array3, Array4, ArrayView1};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on probability vectors summing to one.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    /// The realized reward equals its mean.
    Deterministic,
    /// The realized reward is `Bernoulli(mean)`.
    #[default]
    Bernoulli,
}

/// A finite-horizon MDP with step-dependent dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularMdp {
    states: usize,
    actions: usize,
    horizon: usize,
    /// `[h, s, a, s']`
    transitions: Array4<f64>,
    /// `[h, s, a]`
    mean_reward: Array3<f64>,
    reward_kind: RewardKind,
    initial: Array1<f64>,
}

impl TabularMdp {
    pub fn new(
        transitions: Array4<f64>,
        mean_reward: Array3<f64>,
        initial: Array1<f64>,
        reward_kind: RewardKind,
    ) -> Result<Self> {
        let (horizon, states, actions, next) = transitions.dim();
        if horizon == 0 || states == 0 || actions == 0 {
            return Err(Error::InvalidModel(
                "S, A and H must all be at least 1".into(),
            ));
        }
        if next != states {
            return Err(Error::InvalidModel(format!(
                "transition rows have length {next}, expected S = {states}"
            )));
        }
        if mean_reward.dim() != (horizon, states, actions) {
            return Err(Error::InvalidModel(format!(
                "reward table has shape {:?}, expected {:?}",
                mean_reward.dim(),
                (horizon, states, actions)
            )));
        }
        if initial.len() != states {
            return Err(Error::InvalidModel(format!(
                "d1 has length {}, expected S = {states}",
                initial.len()
            )));
        }
        for h in 0..horizon {
            for s in 0..states {
                for a in 0..actions {
                    let row = transitions.slice(s![h, s, a, ..]);
                    check_distribution(row, &format!("P[{h}][{s}][{a}]"))?;
                    let r = mean_reward[[h, s, a]];
                    if !(0.0..=1.0).contains(&r) {
                        return Err(Error::InvalidModel(format!(
                            "r[{h}][{s}][{a}] = {r} is outside [0, 1]"
                        )));
                    }
                }
            }
        }
        check_distribution(initial.view(), "d1")?;
        Ok(Self {
            states,
            actions,
            horizon,
            transitions,
            mean_reward,
            reward_kind,
            initial,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn reward_kind(&self) -> RewardKind {
        self.reward_kind
    }

    pub fn transitions(&self) -> &Array4<f64> {
        &self.transitions
    }

    pub fn mean_reward(&self) -> &Array3<f64> {
        &self.mean_reward
    }

    pub fn initial(&self) -> &Array1<f64> {
        &self.initial
    }

    pub fn transition_row(&self, h: usize, s: usize, a: usize) -> ArrayView1<'_, f64> {
        self.transitions.slice(s![h, s, a, ..])
    }

    /// Same model with a different reward sampling mode.
    pub fn with_reward_kind(mut self, kind: RewardKind) -> Self {
        self.reward_kind = kind;
        self
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: EnvFile = serde_json::from_str(text).map_err(|e| {
            Error::InvalidModel(format!("line {} column {}: {}", e.line(), e.column(), e))
        })?;
        file.into_mdp()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::InvalidModel(msg) => Error::InvalidModel(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        let file = EnvFile {
            states: self.states,
            actions: self.actions,
            horizon: self.horizon,
            transitions: (0..self.horizon)
                .map(|h| {
                    (0..self.states)
                        .map(|s| {
                            (0..self.actions)
                                .map(|a| self.transition_row(h, s, a).to_vec())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
            rewards: (0..self.horizon)
                .map(|h| {
                    (0..self.states)
                        .map(|s| self.mean_reward.slice(s![h, s, ..]).to_vec())
                        .collect()
                })
                .collect(),
            d1: self.initial.to_vec(),
            reward_kind: self.reward_kind,
        };
        serde_json::to_string_pretty(&file).expect("environment serializes")
    }
}

fn check_distribution(row: ArrayView1<'_, f64>, field: &str) -> Result<()> {
    if let Some((i, p)) = row.iter().enumerate().find(|(_, p)| !(**p >= 0.0)) {
        return Err(Error::InvalidModel(format!(
            "{field}[{i}] = {p} is negative or not a number"
        )));
    }
    let total: f64 = row.sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidModel(format!(
            "{field} sums to {total}, expected 1 within {PROB_TOL:e}"
        )));
    }
    Ok(())
}

/// On-disk environment description.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvFile {
    #[serde(rename = "S")]
    states: usize,
    #[serde(rename = "A")]
    actions: usize,
    #[serde(rename = "H")]
    horizon: usize,
    #[serde(rename = "P")]
    transitions: Vec<Vec<Vec<Vec<f64>>>>,
    #[serde(rename = "r")]
    rewards: Vec<Vec<Vec<f64>>>,
    d1: Vec<f64>,
    #[serde(default)]
    reward_kind: RewardKind,
}

impl EnvFile {
    fn into_mdp(self) -> Result<TabularMdp> {
        let (hn, sn, an) = (self.horizon, self.states, self.actions);
        let shape_err = |field: String, got: usize, want: usize| {
            Error::InvalidModel(format!("{field} has length {got}, expected {want}"))
        };
        if self.transitions.len() != hn {
            return Err(shape_err("P".into(), self.transitions.len(), hn));
        }
        if self.rewards.len() != hn {
            return Err(shape_err("r".into(), self.rewards.len(), hn));
        }
        let mut p = Array4::<f64>::zeros((hn, sn, an, sn));
        let mut r = Array3::<f64>::zeros((hn, sn, an));
        for (h, (p_h, r_h)) in self.transitions.iter().zip(&self.rewards).enumerate() {
            if p_h.len() != sn {
                return Err(shape_err(format!("P[{h}]"), p_h.len(), sn));
            }
            if r_h.len() != sn {
                return Err(shape_err(format!("r[{h}]"), r_h.len(), sn));
            }
            for (s, (p_hs, r_hs)) in p_h.iter().zip(r_h).enumerate() {
                if p_hs.len() != an {
                    return Err(shape_err(format!("P[{h}][{s}]"), p_hs.len(), an));
                }
                if r_hs.len() != an {
                    return Err(shape_err(format!("r[{h}][{s}]"), r_hs.len(), an));
                }
                for (a, row) in p_hs.iter().enumerate() {
                    if row.len() != sn {
                        return Err(shape_err(format!("P[{h}][{s}][{a}]"), row.len(), sn));
                    }
                    for (next, &prob) in row.iter().enumerate() {
                        p[[h, s, a, next]] = prob;
                    }
                    r[[h, s, a]] = r_hs[a];
                }
            }
        }
        if self.d1.len() != sn {
            return Err(shape_err("d1".into(), self.d1.len(), sn));
        }
        TabularMdp::new(p, r, Array1::from(self.d1), self.reward_kind)
    }
}

/// Deterministic, possibly step-dependent policy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    /// `[h, s] -> action`
    actions: Array2<usize>,
}

impl Policy {
    pub fn new(actions: Array2<usize>, num_actions: usize) -> Result<Self> {
        if let Some(&bad) = actions.iter().find(|&&a| a >= num_actions) {
            return Err(Error::InvalidArgument(format!(
                "policy action {bad} out of range for A = {num_actions}"
            )));
        }
        Ok(Self { actions })
    }

    pub fn constant(horizon: usize, states: usize, action: usize) -> Self {
        Self {
            actions: Array2::from_elem((horizon, states), action),
        }
    }

    #[inline]
    pub fn action(&self, h: usize, s: usize) -> usize {
        self.actions[[h, s]]
    }

    pub fn table(&self) -> &Array2<usize> {
        &self.actions
    }

    pub(crate) fn from_table(actions: Array2<usize>) -> Self {
        Self { actions }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
}

/// One episode: `H` steps followed by the state reached after the last action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    pub terminal_state: usize,
}

impl Trajectory {
    pub fn initial_state(&self) -> usize {
        self.steps[0].state
    }

    /// State reached after step `h`.
    pub fn next_state(&self, h: usize) -> usize {
        self.steps
            .get(h + 1)
            .map_or(self.terminal_state, |step| step.state)
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|st| st.reward).sum()
    }
}

fn sample_index<R: Rng + ?Sized>(probs: ArrayView1<'_, f64>, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    // u landed in the rounding gap above the accumulated mass
    last
}

pub fn sample_episode<R: Rng + ?Sized>(
    mdp: &TabularMdp,
    policy: &Policy,
    rng: &mut R,
) -> Trajectory {
    let mut state = sample_index(mdp.initial.view(), rng);
    let mut steps = Vec::with_capacity(mdp.horizon);
    for h in 0..mdp.horizon {
        let action = policy.action(h, state);
        let mean = mdp.mean_reward[[h, state, action]];
        let reward = match mdp.reward_kind {
            RewardKind::Deterministic => mean,
            RewardKind::Bernoulli => {
                if rng.gen::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
        };
        steps.push(Step {
            state,
            action,
            reward,
        });
        state = sample_index(mdp.transition_row(h, state, action), rng);
    }
    Trajectory {
        steps,
        terminal_state: state,
    }
}

/// Output of exact backward induction on the true model.
#[derive(Clone, Debug)]
pub struct OptimalSolution {
    /// `[h, s]`, with row `H` identically zero.
    pub values: Array2<f64>,
    /// `[h, s, a]`
    pub q_values: Array3<f64>,
    pub policy: Policy,
}

impl OptimalSolution {
    /// Optimal expected return from the initial-state distribution.
    pub fn initial_value(&self, mdp: &TabularMdp) -> f64 {
        mdp.initial.dot(&self.values.row(0))
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax_lowest(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

pub fn exact_value_iteration(mdp: &TabularMdp) -> OptimalSolution {
    let (hn, sn, an) = (mdp.horizon, mdp.states, mdp.actions);
    let mut values = Array2::<f64>::zeros((hn + 1, sn));
    let mut q_values = Array3::<f64>::zeros((hn, sn, an));
    let mut actions = Array2::<usize>::zeros((hn, sn));
    for h in (0..hn).rev() {
        for s in 0..sn {
            for a in 0..an {
                q_values[[h, s, a]] = mdp.mean_reward[[h, s, a]]
                    + mdp.transition_row(h, s, a).dot(&values.row(h + 1));
            }
            let (best_a, best_q) = argmax_lowest(q_values.slice(s![h, s, ..]).iter().copied());
            values[[h, s]] = best_q;
            actions[[h, s]] = best_a;
        }
    }
    OptimalSolution {
        values,
        q_values,
        policy: Policy::from_table(actions),
    }
}

/// Exact value of a deterministic policy; `[h, s]` with terminal row `H`.
pub fn policy_evaluation(mdp: &TabularMdp, policy: &Policy) -> Array2<f64> {
    let (hn, sn) = (mdp.horizon, mdp.states);
    let mut values = Array2::<f64>::zeros((hn + 1, sn));
    for h in (0..hn).rev() {
        for s in 0..sn {
            let a = policy.action(h, s);
            values[[h, s]] =
                mdp.mean_reward[[h, s, a]] + mdp.transition_row(h, s, a).dot(&values.row(h + 1));
        }
    }
    values
}

/// RiverSwim dynamics. Action 0 is "left", action 1 is "right".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RiverSwimParams {
    /// Interior states, action right.
    pub right_advance: f64,
    pub right_stay: f64,
    pub right_back: f64,
    /// State 0, action right.
    pub left_end_advance: f64,
    pub left_end_stay: f64,
    /// State S-1, action right.
    pub right_end_stay: f64,
    pub right_end_back: f64,
    pub reward_left: f64,
    pub reward_right: f64,
    pub reward_kind: RewardKind,
}

impl Default for RiverSwimParams {
    fn default() -> Self {
        Self {
            right_advance: 0.3,
            right_stay: 0.6,
            right_back: 0.1,
            left_end_advance: 0.3,
            left_end_stay: 0.7,
            right_end_stay: 0.9,
            right_end_back: 0.1,
            reward_left: 0.05,
            reward_right: 1.0,
            reward_kind: RewardKind::Bernoulli,
        }
    }
}

pub fn build_riverswim(
    states: usize,
    horizon: usize,
    params: &RiverSwimParams,
) -> Result<TabularMdp> {
    if states < 2 {
        return Err(Error::InvalidArgument(format!(
            "RiverSwim needs at least 2 states, got {states}"
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let groups: [(&str, &[f64]); 3] = [
        (
            "interior",
            &[params.right_advance, params.right_stay, params.right_back],
        ),
        ("left end", &[params.left_end_advance, params.left_end_stay]),
        ("right end", &[params.right_end_stay, params.right_end_back]),
    ];
    for (name, probs) in groups {
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "RiverSwim {name} probabilities must be nonnegative: {probs:?}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidArgument(format!(
                "RiverSwim {name} probabilities sum to {total}, expected 1"
            )));
        }
    }

    const LEFT: usize = 0;
    const RIGHT: usize = 1;
    let last = states - 1;
    let mut p = Array4::<f64>::zeros((horizon, states, 2, states));
    let mut r = Array3::<f64>::zeros((horizon, states, 2));
    for h in 0..horizon {
        for s in 0..states {
            p[[h, s, LEFT, s.saturating_sub(1)]] = 1.0;
            if s == 0 {
                p[[h, s, RIGHT, 1]] += params.left_end_advance;
                p[[h, s, RIGHT, 0]] += params.left_end_stay;
            } else if s == last {
                p[[h, s, RIGHT, s]] += params.right_end_stay;
                p[[h, s, RIGHT, s - 1]] += params.right_end_back;
            } else {
                p[[h, s, RIGHT, s + 1]] += params.right_advance;
                p[[h, s, RIGHT, s]] += params.right_stay;
                p[[h, s, RIGHT, s - 1]] += params.right_back;
            }
        }
        r[[h, 0, LEFT]] = params.reward_left;
        r[[h, last, RIGHT]] = params.reward_right;
    }
    let mut d1 = Array1::<f64>::zeros(states);
    d1[0] = 1.0;
    TabularMdp::new(p, r, d1, params.reward_kind)
}
