//! True (non-private) visitation and reward counters.

use ndarray::{Array3, Array4, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Trajectory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTables {
    /// `N_h(s, a)`, indexed `[h, s, a]`.
    pub visits: Array3<u64>,
    /// `N_h(s, a, s')`, indexed `[h, s, a, s']`.
    pub transitions: Array4<u64>,
    /// Accumulated realized reward, indexed `[h, s, a]`.
    pub rewards: Array3<f64>,
    pub episodes_seen: u64,
}

impl CountTables {
    pub fn new(horizon: usize, states: usize, actions: usize) -> Self {
        Self {
            visits: Array3::zeros((horizon, states, actions)),
            transitions: Array4::zeros((horizon, states, actions, states)),
            rewards: Array3::zeros((horizon, states, actions)),
            episodes_seen: 0,
        }
    }

    /// `(H, S, A)`
    pub fn dims(&self) -> (usize, usize, usize) {
        self.visits.dim()
    }

    pub fn update_with_trajectory(&mut self, traj: &Trajectory) -> Result<()> {
        let (hn, sn, an) = self.dims();
        if traj.steps.len() != hn {
            return Err(Error::Structural(format!(
                "trajectory has {} steps, counters expect H = {hn}",
                traj.steps.len()
            )));
        }
        // validate everything before mutating so a bad trajectory leaves the tables intact
        for (h, step) in traj.steps.iter().enumerate() {
            let next = traj.next_state(h);
            if step.state >= sn || next >= sn || step.action >= an {
                return Err(Error::Structural(format!(
                    "step {h} ({}, {}, {next}) out of range for S = {sn}, A = {an}",
                    step.state, step.action
                )));
            }
        }
        for (h, step) in traj.steps.iter().enumerate() {
            let (s, a) = (step.state, step.action);
            self.visits[[h, s, a]] += 1;
            self.transitions[[h, s, a, traj.next_state(h)]] += 1;
            self.rewards[[h, s, a]] += step.reward;
        }
        self.episodes_seen += 1;
        Ok(())
    }

    /// Checks the three structural invariants; returns a description of the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let summed = self.transitions.sum_axis(Axis(3));
        if summed != self.visits {
            return Err("N(s,a) differs from the sum over destinations".into());
        }
        for (h, layer) in self.visits.outer_iter().enumerate() {
            let total: u64 = layer.sum();
            if total != self.episodes_seen {
                return Err(format!(
                    "step {h} has {total} visits but {} episodes were seen",
                    self.episodes_seen
                ));
            }
        }
        for (idx, &r) in self.rewards.indexed_iter() {
            if r < 0.0 || r > self.visits[idx] as f64 {
                return Err(format!(
                    "reward total {r} at {idx:?} exceeds its visit count"
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("counters serialize")
    }
}
