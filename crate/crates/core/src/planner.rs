//! Optimistic value iteration on private counts with a variance-aware bonus,
//! and the episode loop that deploys the greedy policy and feeds the privatizer.

use ndarray::{s, Array2, Array3, Array4, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{
    argmax_lowest, exact_value_iteration, policy_evaluation, sample_episode, OptimalSolution,
    Policy, TabularMdp, Trajectory, PROB_TOL,
};
use crate::privatizer::{build_privatizer, PrivateCounts, PrivatizerConfig, PrivatizerKind};
use crate::stats::CountTables;

/// Log factor `ln(30 H S A T / β)` with `T = H K`.
pub fn iota(horizon: usize, states: usize, actions: usize, episodes: u64, beta: f64) -> f64 {
    let t = horizon as f64 * episodes as f64;
    (30.0 * horizon as f64 * states as f64 * actions as f64 * t / beta).ln()
}

/// Which exploration bonus the planner adds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BonusRule {
    /// Variance-aware bonus with the privacy term.
    #[default]
    Bernstein,
    /// `H sqrt(ι / N)`.
    Hoeffding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub label: String,
    pub episodes: u64,
    pub beta: f64,
    pub epsilon: f64,
    pub privatizer: PrivatizerKind,
    pub bonus_rule: BonusRule,
    /// Multiplier on the whole bonus; `1.0` keeps the theoretical constants.
    pub bonus_scale: f64,
    pub e_override: Option<f64>,
    pub e_scale: f64,
    pub zero_noise: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            label: String::new(),
            episodes: 1000,
            beta: 0.1,
            epsilon: 1.0,
            privatizer: PrivatizerKind::None,
            bonus_rule: BonusRule::Bernstein,
            bonus_scale: 1.0,
            e_override: None,
            e_scale: 1.0,
            zero_noise: false,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::InvalidArgument("episodes must be positive".into()));
        }
        if !(self.bonus_scale >= 0.0) || !self.bonus_scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bonus scale must be nonnegative, got {}",
                self.bonus_scale
            )));
        }
        Ok(())
    }

    pub fn privatizer_config(&self, mdp: &TabularMdp) -> PrivatizerConfig {
        let mut pc = PrivatizerConfig::new(
            self.privatizer,
            self.epsilon,
            self.beta,
            self.episodes,
            (mdp.horizon(), mdp.states(), mdp.actions()),
        );
        pc.e_override = self.e_override;
        pc.e_scale = self.e_scale;
        pc.zero_noise = self.zero_noise;
        pc
    }
}

/// Private model estimates for one planning step.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimates {
    /// `P̃_h(s' | s, a)`; unvisited cells hold the uniform row.
    pub transitions: Array4<f64>,
    /// `r̃_h(s, a)` clipped to `[0, 1]`.
    pub rewards: Array3<f64>,
    /// `Ñ_h(s, a) > 0`.
    pub known: Array3<bool>,
}

pub fn private_estimates(pc: &PrivateCounts) -> Result<Estimates> {
    let (hn, sn, an) = pc.dims();
    let mut transitions = Array4::<f64>::zeros((hn, sn, an, sn));
    let mut rewards = Array3::<f64>::zeros((hn, sn, an));
    let mut known = Array3::from_elem((hn, sn, an), false);
    let uniform = 1.0 / sn as f64;
    for h in 0..hn {
        for s in 0..sn {
            for a in 0..an {
                let n = pc.visits[[h, s, a]];
                let dest = pc.transitions.slice(s![h, s, a, ..]);
                if let Some(bad) = dest.iter().find(|&&v| !(v >= 0.0)) {
                    return Err(Error::ContractViolation(format!(
                        "negative destination count {bad} at ({h}, {s}, {a})"
                    )));
                }
                if n > 0.0 {
                    for (out, &v) in transitions.slice_mut(s![h, s, a, ..]).iter_mut().zip(dest) {
                        *out = v / n;
                    }
                    rewards[[h, s, a]] = (pc.rewards[[h, s, a]] / n).clamp(0.0, 1.0);
                    known[[h, s, a]] = true;
                } else if dest.iter().any(|&v| v != 0.0) {
                    return Err(Error::ContractViolation(format!(
                        "Ñ = {n} at ({h}, {s}, {a}) with nonzero destination mass"
                    )));
                } else {
                    transitions.slice_mut(s![h, s, a, ..]).fill(uniform);
                }
            }
        }
    }
    Ok(Estimates {
        transitions,
        rewards,
        known,
    })
}

/// Inputs of the variance-aware bonus at one `(h, s, a)`.
#[derive(Clone, Copy, Debug)]
pub struct BonusInputs<'a> {
    /// `Ñ_h(s, a)`
    pub visits: f64,
    /// `P̃_h(· | s, a)`
    pub next_probs: ArrayView1<'a, f64>,
    /// `Ṽ_{h+1}`
    pub next_values: ArrayView1<'a, f64>,
    /// `Ñ_{h+1}(s') = Σ_a Ñ_{h+1}(s', a)`; `None` at the last step, where the
    /// next-step value is identically zero and the correction term vanishes.
    pub next_state_visits: Option<ArrayView1<'a, f64>>,
    pub horizon: usize,
    pub states: usize,
    pub actions: usize,
    pub iota: f64,
    pub e_bound: f64,
    pub scale: f64,
}

/// `scale * [2 sqrt(Var·ι/Ñ) + sqrt(2ι/Ñ) + 20HSEι/Ñ + 4 sqrt(ι) sqrt(Σ P̃ min{…, H²} / Ñ)]`,
/// or `+∞` when `Ñ_h(s, a) <= 0`.
pub fn bernstein_bonus(inp: &BonusInputs<'_>) -> f64 {
    let n = inp.visits;
    if !(n > 0.0) {
        return f64::INFINITY;
    }
    let (h, s, a) = (inp.horizon as f64, inp.states as f64, inp.actions as f64);
    let iota = inp.iota;
    let e = inp.e_bound;

    let mean = inp.next_probs.dot(&inp.next_values);
    let second = inp
        .next_probs
        .iter()
        .zip(inp.next_values)
        .map(|(p, v)| p * v * v)
        .sum::<f64>();
    let variance = (second - mean * mean).max(0.0);

    let variance_term = 2.0 * (variance * iota / n).sqrt();
    let reward_term = (2.0 * iota / n).sqrt();
    let privacy_term = 20.0 * h * s * e * iota / n;

    let correction = match inp.next_state_visits {
        None => 0.0,
        Some(next_visits) => {
            const C: f64 = 1000.0 * 1000.0;
            let iota2 = iota * iota;
            let iota4 = iota2 * iota2;
            let c1 = C * h.powi(3) * s * a * iota2;
            let c2 = C * h.powi(4) * s.powi(4) * a * a * e * e * iota4;
            let c3 = C * h.powi(6) * s.powi(4) * a * a * iota4;
            let cap = h * h;
            let weighted: f64 = inp
                .next_probs
                .iter()
                .zip(next_visits)
                .map(|(&p, &m)| {
                    let inner = if m > 0.0 {
                        (c1 / m + (c2 + c3) / (m * m)).min(cap)
                    } else {
                        cap
                    };
                    p * inner
                })
                .sum();
            4.0 * iota.sqrt() * (weighted / n).sqrt()
        }
    };

    inp.scale * (variance_term + reward_term + privacy_term + correction)
}

/// `scale * H * sqrt(ι / N)`, or `+∞` for unvisited cells.
pub fn hoeffding_bonus(visits: f64, horizon: usize, iota: f64, scale: f64) -> f64 {
    if !(visits > 0.0) {
        return f64::INFINITY;
    }
    scale * horizon as f64 * (iota / visits).sqrt()
}

/// Everything computed during one planning sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannerState {
    /// `Q̃_h(s, a)`, in `[0, H]`.
    pub q: Array3<f64>,
    /// `Ṽ_h(s)` with terminal row `H` equal to zero.
    pub v: Array2<f64>,
    pub estimates: Estimates,
    /// `b_h(s, a)`; `+∞` for unvisited cells.
    pub bonus: Array3<f64>,
    pub iota: f64,
    pub bonus_scale: f64,
}

impl PlannerState {
    /// Largest `|Σ P̃ - 1|` over all rows, and the smallest entry.
    pub fn transition_row_audit(&self) -> (f64, f64) {
        let t = &self.estimates.transitions;
        let (hn, sn, an, _) = t.dim();
        let mut worst = 0.0f64;
        let mut min_p = f64::INFINITY;
        for h in 0..hn {
            for s in 0..sn {
                for a in 0..an {
                    let row = t.slice(s![h, s, a, ..]);
                    worst = worst.max((row.sum() - 1.0).abs());
                    min_p = row.iter().fold(min_p, |m, &p| m.min(p));
                }
            }
        }
        (worst, min_p)
    }
}

/// One backward sweep `Q̃_h = min{Q̃_prev_h, H, r̃ + P̃ Ṽ_{h+1} + b}` for
/// `h = H..1`, with greedy lowest-index action choice. `bonus` receives
/// `(h, s, a, Ṽ_{h+1})` and may return `+∞`.
pub fn optimistic_backup<F>(
    prev_q: &Array3<f64>,
    estimates: Estimates,
    mut bonus: F,
) -> (PlannerState, Policy)
where
    F: FnMut(usize, usize, usize, ArrayView1<'_, f64>) -> f64,
{
    let (hn, sn, an) = prev_q.dim();
    let cap = hn as f64;
    let mut q = Array3::<f64>::zeros((hn, sn, an));
    let mut v = Array2::<f64>::zeros((hn + 1, sn));
    let mut bonuses = Array3::<f64>::zeros((hn, sn, an));
    let mut actions = Array2::<usize>::zeros((hn, sn));
    for h in (0..hn).rev() {
        let (upper, lower) = v.view_mut().split_at(ndarray::Axis(0), h + 1);
        let next_v = lower.row(0);
        for s in 0..sn {
            for a in 0..an {
                let b = bonus(h, s, a, next_v);
                bonuses[[h, s, a]] = b;
                let backup = estimates.rewards[[h, s, a]]
                    + estimates.transitions.slice(s![h, s, a, ..]).dot(&next_v)
                    + b;
                q[[h, s, a]] = prev_q[[h, s, a]].min(cap).min(backup);
            }
        }
        let mut upper = upper;
        for s in 0..sn {
            let (best_a, best_q) = argmax_lowest(q.slice(s![h, s, ..]).iter().copied());
            upper[[h, s]] = best_q;
            actions[[h, s]] = best_a;
        }
    }
    let state = PlannerState {
        q,
        v,
        estimates,
        bonus: bonuses,
        iota: f64::NAN,
        bonus_scale: f64::NAN,
    };
    (state, Policy::from_table(actions))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerParams {
    pub rule: BonusRule,
    pub bonus_scale: f64,
    pub iota: f64,
}

/// Plan episode `k` from the private counts and the previous episode's `Q̃`.
pub fn backward_induction(
    prev_q: &Array3<f64>,
    pc: &PrivateCounts,
    params: &PlannerParams,
) -> Result<(PlannerState, Policy)> {
    let (hn, sn, an) = pc.dims();
    if prev_q.dim() != (hn, sn, an) {
        return Err(Error::Structural(format!(
            "previous Q has shape {:?}, counts have {:?}",
            prev_q.dim(),
            (hn, sn, an)
        )));
    }
    let estimates = private_estimates(pc)?;
    let state_visits = Array2::from_shape_fn((hn, sn), |(h, s)| pc.state_visits(h, s));
    let transitions = estimates.transitions.clone();
    let e = pc.e_bound;
    let (mut state, policy) = optimistic_backup(prev_q, estimates, |h, s, a, next_v| {
        let visits = pc.visits[[h, s, a]];
        match params.rule {
            BonusRule::Hoeffding => hoeffding_bonus(visits, hn, params.iota, params.bonus_scale),
            BonusRule::Bernstein => bernstein_bonus(&BonusInputs {
                visits,
                next_probs: transitions.slice(s![h, s, a, ..]),
                next_values: next_v,
                next_state_visits: (h + 1 < hn).then(|| state_visits.row(h + 1)),
                horizon: hn,
                states: sn,
                actions: an,
                iota: params.iota,
                e_bound: e,
                scale: params.bonus_scale,
            }),
        }
    });
    state.iota = params.iota;
    state.bonus_scale = params.bonus_scale;
    Ok((state, policy))
}

/// Post-hoc checks accumulated over a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunAudit {
    /// Largest `|Σ_{s'} P̃(s'|s,a) - 1|` over every row built during the run.
    pub max_row_sum_error: f64,
    /// Smallest transition estimate built during the run.
    pub min_transition_estimate: f64,
    /// `Q̃^{k} <= Q̃^{k-1}` cellwise at every episode.
    pub q_monotone: bool,
    /// `0 <= Q̃ <= H` at every episode.
    pub q_in_range: bool,
    /// Episodes where `Ṽ_1(s) >= V*_1(s)` for every `s`.
    pub optimistic_episodes: u64,
}

/// Output of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub arm: String,
    pub seed: u64,
    /// `V*_1(s_1^k) - V^{π_k}_1(s_1^k)` for `k = 1..K`.
    pub per_episode_regret: Vec<f64>,
    /// Prefix sums of `per_episode_regret`.
    pub cumulative: Vec<f64>,
    /// The private counts met the accuracy contract at every episode.
    pub assumption1_held: bool,
    pub audit: RunAudit,
}

impl RegretRecord {
    pub fn final_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Read-only view handed to a [`RunObserver`] after each episode.
pub struct EpisodeView<'a> {
    /// 1-based episode index.
    pub episode: u64,
    /// Planning output used to act in this episode.
    pub planner: &'a PlannerState,
    pub policy: &'a Policy,
    pub trajectory: &'a Trajectory,
    /// Counters after this episode.
    pub true_counts: &'a CountTables,
    /// Private counts after this episode (input to the next plan).
    pub private_counts: &'a PrivateCounts,
    pub optimal: &'a OptimalSolution,
    pub regret: f64,
}

pub trait RunObserver {
    fn on_episode(&mut self, view: &EpisodeView<'_>);
}

impl RunObserver for () {
    fn on_episode(&mut self, _view: &EpisodeView<'_>) {}
}

impl<F: FnMut(&EpisodeView<'_>)> RunObserver for F {
    fn on_episode(&mut self, view: &EpisodeView<'_>) {
        self(view)
    }
}

/// Environment and privatizer randomness for a run; independent streams of one seed.
fn run_rngs(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let env = ChaCha8Rng::seed_from_u64(seed);
    let mut noise = ChaCha8Rng::seed_from_u64(seed);
    noise.set_stream(1);
    (env, noise)
}

/// DP-UCBVI with the privatizer named in `config`.
pub fn dp_ucbvi_run(mdp: &TabularMdp, config: &RunConfig) -> Result<RegretRecord> {
    run_with_observer(mdp, config, &mut ())
}

/// Non-private UCBVI with the Hoeffding bonus on the true counts.
pub fn ucbvi_hoeffding_baseline(mdp: &TabularMdp, config: &RunConfig) -> Result<RegretRecord> {
    let config = RunConfig {
        privatizer: PrivatizerKind::None,
        bonus_rule: BonusRule::Hoeffding,
        e_override: None,
        zero_noise: false,
        ..config.clone()
    };
    run_with_observer(mdp, &config, &mut ())
}

pub fn run_with_observer(
    mdp: &TabularMdp,
    config: &RunConfig,
    observer: &mut dyn RunObserver,
) -> Result<RegretRecord> {
    config.validate()?;
    let (hn, sn, an) = (mdp.horizon(), mdp.states(), mdp.actions());
    let mut privatizer = build_privatizer(&config.privatizer_config(mdp))?;
    let params = PlannerParams {
        rule: config.bonus_rule,
        bonus_scale: config.bonus_scale,
        iota: iota(hn, sn, an, config.episodes, config.beta),
    };
    let optimal = exact_value_iteration(mdp);
    let (mut env_rng, mut noise_rng) = run_rngs(config.seed);

    let mut counts = CountTables::new(hn, sn, an);
    let mut prev_q = Array3::from_elem((hn, sn, an), hn as f64);
    let k_total = config.episodes as usize;
    let mut per_episode = Vec::with_capacity(k_total);
    let mut cumulative = Vec::with_capacity(k_total);
    let mut running = 0.0;
    let mut assumption1_held = true;
    let mut audit = RunAudit {
        max_row_sum_error: 0.0,
        min_transition_estimate: f64::INFINITY,
        q_monotone: true,
        q_in_range: true,
        optimistic_episodes: 0,
    };

    for k in 1..=config.episodes {
        let (state, policy) = backward_induction(&prev_q, privatizer.current(), &params)?;

        let (row_err, min_p) = state.transition_row_audit();
        audit.max_row_sum_error = audit.max_row_sum_error.max(row_err);
        audit.min_transition_estimate = audit.min_transition_estimate.min(min_p);
        audit.q_monotone &= state.q.iter().zip(&prev_q).all(|(new, old)| new <= old);
        audit.q_in_range &= state.q.iter().all(|&q| (0.0..=hn as f64).contains(&q));
        if (0..sn).all(|s| state.v[[0, s]] >= optimal.values[[0, s]] - 1e-10) {
            audit.optimistic_episodes += 1;
        }

        let traj = sample_episode(mdp, &policy, &mut env_rng);
        let s1 = traj.initial_state();
        let v_pi = policy_evaluation(mdp, &policy);
        let regret = optimal.values[[0, s1]] - v_pi[[0, s1]];
        running += regret;
        per_episode.push(regret);
        cumulative.push(running);

        counts.update_with_trajectory(&traj)?;
        let pc = privatizer.on_episode_end(&counts, &traj, &mut noise_rng)?;
        assumption1_held &= pc.satisfies_contract(&counts);

        observer.on_episode(&EpisodeView {
            episode: k,
            planner: &state,
            policy: &policy,
            trajectory: &traj,
            true_counts: &counts,
            private_counts: pc,
            optimal: &optimal,
            regret,
        });
        prev_q = state.q;
    }

    Ok(RegretRecord {
        arm: config.label.clone(),
        seed: config.seed,
        per_episode_regret: per_episode,
        cumulative,
        assumption1_held,
        audit,
    })
}

/// True when every row is a probability vector within [`PROB_TOL`].
pub fn rows_are_distributions(transitions: &Array4<f64>) -> bool {
    let (hn, sn, an, _) = transitions.dim();
    (0..hn).all(|h| {
        (0..sn).all(|s| {
            (0..an).all(|a| {
                let row = transitions.slice(s![h, s, a, ..]);
                row.iter().all(|&p| p >= 0.0) && (row.sum() - 1.0).abs() <= PROB_TOL
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{build_riverswim, RiverSwimParams};
    use ndarray::{arr1, Array1};

    #[test]
    fn estimates_follow_count_ratios() {
        let mut pc = PrivateCounts::zeros(1, 2, 1, 4.0);
        pc.transitions[[0, 0, 0, 0]] = 4.5;
        pc.transitions[[0, 0, 0, 1]] = 6.5;
        pc.visits[[0, 0, 0]] = 11.0;
        pc.rewards[[0, 0, 0]] = 15.0;
        pc.transitions[[0, 1, 0, 0]] = 5.0;
        pc.transitions[[0, 1, 0, 1]] = 5.0;
        pc.visits[[0, 1, 0]] = 10.0;
        pc.rewards[[0, 1, 0]] = -2.0;
        let est = private_estimates(&pc).unwrap();
        assert_eq!(est.transitions[[0, 0, 0, 0]], 4.5 / 11.0);
        assert_eq!(est.transitions[[0, 0, 0, 1]], 6.5 / 11.0);
        assert!((est.transitions.slice(s![0, 0, 0, ..]).sum() - 1.0).abs() <= PROB_TOL);
        assert_eq!(est.rewards[[0, 0, 0]], 1.0);
        assert_eq!(est.rewards[[0, 1, 0]], 0.0);
    }

    #[test]
    fn estimates_reject_broken_contract() {
        let mut pc = PrivateCounts::zeros(1, 2, 1, 0.0);
        pc.transitions[[0, 0, 0, 1]] = 1.0;
        assert!(matches!(
            private_estimates(&pc),
            Err(Error::ContractViolation(_))
        ));
        let mut pc = PrivateCounts::zeros(1, 2, 1, 0.0);
        pc.visits[[0, 0, 0]] = 1.0;
        pc.transitions[[0, 0, 0, 0]] = 2.0;
        pc.transitions[[0, 0, 0, 1]] = -1.0;
        assert!(private_estimates(&pc).is_err());
    }

    fn inputs<'a>(
        n: f64,
        p: &'a Array1<f64>,
        v: &'a Array1<f64>,
        next: Option<&'a Array1<f64>>,
        e: f64,
    ) -> BonusInputs<'a> {
        BonusInputs {
            visits: n,
            next_probs: p.view(),
            next_values: v.view(),
            next_state_visits: next.map(|m| m.view()),
            horizon: 2,
            states: 2,
            actions: 1,
            iota: 1.0,
            e_bound: e,
            scale: 1.0,
        }
    }

    #[test]
    fn bonus_constant_next_value_drops_variance_term() {
        let p = arr1(&[0.3, 0.7]);
        let v = arr1(&[1.5, 1.5]);
        let m = arr1(&[50.0, 50.0]);
        let b = bernstein_bonus(&inputs(100.0, &p, &v, Some(&m), 1.0));
        // sqrt(2/100) + 20*2*2*1/100 + 4*sqrt(H^2/100)
        let expect = (0.02f64).sqrt() + 0.8 + 4.0 * (4.0f64 / 100.0).sqrt();
        assert!((b - expect).abs() < 1e-12, "{b} vs {expect}");
    }

    #[test]
    fn bonus_vanishes_with_huge_counts() {
        let p = arr1(&[0.5, 0.5]);
        let v = arr1(&[0.0, 2.0]);
        let m = arr1(&[1e12, 1e12]);
        let mut inp = inputs(1e12, &p, &v, Some(&m), 0.0);
        inp.iota = 10.0;
        assert!(bernstein_bonus(&inp) <= 1e-4);
    }

    #[test]
    fn bonus_is_infinite_without_visits() {
        let p = arr1(&[0.5, 0.5]);
        let v = arr1(&[0.0, 2.0]);
        assert!(bernstein_bonus(&inputs(0.0, &p, &v, None, 0.0)).is_infinite());
        assert!(hoeffding_bonus(0.0, 5, 1.0, 1.0).is_infinite());
        assert!(hoeffding_bonus(1e16, 5, 1.0, 1.0) < 1e-6);
    }

    #[test]
    fn first_episode_is_all_horizon_and_action_zero() {
        let pc = PrivateCounts::zeros(3, 4, 2, 0.0);
        let prev = Array3::from_elem((3, 4, 2), 3.0);
        let params = PlannerParams {
            rule: BonusRule::Bernstein,
            bonus_scale: 1.0,
            iota: 5.0,
        };
        let (state, policy) = backward_induction(&prev, &pc, &params).unwrap();
        assert!(state.q.iter().all(|&q| q == 3.0));
        assert!(policy.table().iter().all(|&a| a == 0));
    }

    #[test]
    fn zero_bonus_on_true_model_is_bellman_backup() {
        let mdp = build_riverswim(5, 7, &RiverSwimParams::default()).unwrap();
        let opt = exact_value_iteration(&mdp);
        let est = Estimates {
            transitions: mdp.transitions().clone(),
            rewards: mdp.mean_reward().clone(),
            known: Array3::from_elem((7, 5, 2), true),
        };
        let prev = Array3::from_elem((7, 5, 2), 7.0);
        let (state, policy) = optimistic_backup(&prev, est, |_, _, _, _| 0.0);
        for (a, b) in state.q.iter().zip(opt.q_values.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(policy, opt.policy);
    }

    #[test]
    fn single_episode_regret_uses_initial_policy() {
        let mdp = build_riverswim(6, 20, &RiverSwimParams::default()).unwrap();
        let config = RunConfig {
            episodes: 1,
            seed: 3,
            ..Default::default()
        };
        let rec = dp_ucbvi_run(&mdp, &config).unwrap();
        let opt = exact_value_iteration(&mdp);
        let v_left = policy_evaluation(&mdp, &Policy::constant(20, 6, 0));
        assert_eq!(rec.per_episode_regret.len(), 1);
        assert!((rec.cumulative[0] - (opt.values[[0, 0]] - v_left[[0, 0]])).abs() < 1e-12);
        let base = ucbvi_hoeffding_baseline(&mdp, &config).unwrap();
        assert_eq!(base.cumulative, rec.cumulative);
    }

    #[test]
    fn runs_are_deterministic() {
        let mdp = build_riverswim(4, 5, &RiverSwimParams::default()).unwrap();
        for kind in [
            PrivatizerKind::None,
            PrivatizerKind::Central,
            PrivatizerKind::Local,
        ] {
            let config = RunConfig {
                episodes: 60,
                privatizer: kind,
                bonus_scale: 0.05,
                e_scale: 0.01,
                seed: 21,
                ..Default::default()
            };
            assert_eq!(
                dp_ucbvi_run(&mdp, &config).unwrap(),
                dp_ucbvi_run(&mdp, &config).unwrap()
            );
        }
    }
}
