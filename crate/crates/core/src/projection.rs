//! Post-processing of noisy visitation counts.
//!
//! Given noisy per-destination counts `d` and a noisy marginal `T`, find
//! nonnegative `x` minimizing `max_i |x_i - d_i|` subject to
//! `|sum(x) - T| <= slack`, then shift upward so the private counts do not
//! underestimate the truth.
//!
//! For a fixed deviation `t` every coordinate lives in the box
//! `[max(0, d_i - t), d_i + t]`, so `t` is feasible exactly when every box is
//! nonempty and the interval of reachable sums meets the target interval.
//! Both ends of the reachable interval are monotone piecewise-linear in `t`,
//! which gives the minimal `t` in closed form after one sort.
//!
//! When `T + slack < 0` no nonnegative vector can meet the marginal; the target
//! interval is then taken as `[0, 0]`, its nearest feasible point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionProblem {
    pub noisy_dest: Vec<f64>,
    pub noisy_total: f64,
    /// Allowed deviation of `sum(x)` from `noisy_total`.
    pub slack: f64,
}

impl ProjectionProblem {
    pub fn new(noisy_dest: Vec<f64>, noisy_total: f64, slack: f64) -> Result<Self> {
        if noisy_dest.is_empty() {
            return Err(Error::InvalidArgument(
                "projection needs at least one destination".into(),
            ));
        }
        if !(slack >= 0.0) || !slack.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "slack must be nonnegative and finite, got {slack}"
            )));
        }
        if !noisy_total.is_finite() || noisy_dest.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidArgument("noisy counts must be finite".into()));
        }
        Ok(Self {
            noisy_dest,
            noisy_total,
            slack,
        })
    }

    /// Interval `sum(x)` has to land in.
    pub fn target_interval(&self) -> (f64, f64) {
        target_interval(self.noisy_total, self.slack)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSolution {
    pub x: Vec<f64>,
    pub t_star: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalizedCounts {
    pub dest: Vec<f64>,
    pub total: f64,
}

fn target_interval(total: f64, slack: f64) -> (f64, f64) {
    let hi = (total + slack).max(0.0);
    let lo = (total - slack).max(0.0);
    (lo, hi)
}

pub fn project(problem: &ProjectionProblem) -> ProjectionSolution {
    let mut x = vec![0.0; problem.noisy_dest.len()];
    let t_star = project_into(
        &problem.noisy_dest,
        problem.noisy_total,
        problem.slack,
        &mut x,
    );
    ProjectionSolution { x, t_star }
}

/// Allocation-light form of [`project`]: writes the minimizer into `x` and
/// returns the optimal deviation. Inputs are assumed validated.
pub fn project_into(dest: &[f64], total: f64, slack: f64, x: &mut [f64]) -> f64 {
    debug_assert_eq!(dest.len(), x.len());
    let n = dest.len() as f64;
    let (target_lo, target_hi) = target_interval(total, slack);

    // every box [max(0, d - t), d + t] must be nonempty
    let t_boxes = dest.iter().fold(0.0f64, |m, &d| m.max(-d));

    // smallest t with sum(max(0, d - t)) <= target_hi
    let lower_sum_at_zero: f64 = dest.iter().map(|&d| d.max(0.0)).sum();
    let t_upper_side = if lower_sum_at_zero <= target_hi {
        0.0
    } else {
        let mut sorted: Vec<f64> = dest.iter().copied().filter(|&d| d > 0.0).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut prefix = 0.0;
        let mut t = 0.0;
        for j in 0..sorted.len() {
            prefix += sorted[j];
            t = (prefix - target_hi) / (j + 1) as f64;
            let next = sorted.get(j + 1).copied().unwrap_or(0.0);
            if t >= next {
                break;
            }
        }
        t.max(0.0)
    };

    // smallest t with sum(d + t) >= target_lo, valid once t >= t_boxes
    let dest_sum: f64 = dest.iter().sum();
    let t_lower_side = ((target_lo - dest_sum) / n).max(0.0);

    let t_star = t_boxes.max(t_upper_side).max(t_lower_side);

    for (xi, &d) in x.iter_mut().zip(dest) {
        *xi = d.max(0.0).min(d + t_star);
    }
    let sum: f64 = x.iter().sum();
    if sum > target_hi {
        let room: f64 = x
            .iter()
            .zip(dest)
            .map(|(&xi, &d)| xi - (d - t_star).max(0.0))
            .sum();
        let ratio = if room > 0.0 {
            ((sum - target_hi) / room).min(1.0)
        } else {
            0.0
        };
        for (xi, &d) in x.iter_mut().zip(dest) {
            let lo = (d - t_star).max(0.0);
            *xi = (*xi - (*xi - lo) * ratio).max(lo);
        }
    } else if sum < target_lo {
        let room: f64 = x.iter().zip(dest).map(|(&xi, &d)| d + t_star - xi).sum();
        let ratio = if room > 0.0 {
            ((target_lo - sum) / room).min(1.0)
        } else {
            0.0
        };
        for (xi, &d) in x.iter_mut().zip(dest) {
            let hi = d + t_star;
            *xi = (*xi + (hi - *xi) * ratio).min(hi);
        }
    }
    t_star
}

/// Shift a projected vector so its entries are strictly positive (for `e > 0`)
/// and the marginal sits `e / 2` above the projected one.
pub fn finalize_counts(solution: &ProjectionSolution, e: f64) -> FinalizedCounts {
    let mut dest = solution.x.clone();
    let total = finalize_into(&mut dest, e);
    FinalizedCounts { dest, total }
}

/// In-place form of [`finalize_counts`]; returns the marginal, which is the
/// exact floating-point sum of the shifted entries.
pub fn finalize_into(x: &mut [f64], e: f64) -> f64 {
    let shift = e / (2.0 * x.len() as f64);
    let mut total = 0.0;
    for xi in x.iter_mut() {
        *xi += shift;
        total += *xi;
    }
    total
}

pub mod oracle {
    //! Grid-scan reference solver used to certify [`super::project`].

    use super::{target_interval, ProjectionProblem, ProjectionSolution};

    fn feasible(problem: &ProjectionProblem, t: f64) -> bool {
        let (target_lo, target_hi) = target_interval(problem.noisy_total, problem.slack);
        let mut lows = 0.0;
        let mut highs = 0.0;
        for &d in &problem.noisy_dest {
            let hi = d + t;
            if hi < 0.0 {
                return false;
            }
            lows += (d - t).max(0.0);
            highs += hi;
        }
        lows <= target_hi && highs >= target_lo
    }

    /// First grid point `m * grid` (m = 0, 1, ...) at which the problem is
    /// feasible, paired with a lowest-index-first greedy assignment.
    ///
    /// Feasibility is monotone in `t`, so the scan proceeds coarse-to-fine in
    /// powers of 64 grid steps; the result equals that of a plain linear scan.
    pub fn project_oracle(problem: &ProjectionProblem, grid: f64) -> ProjectionSolution {
        assert!(grid > 0.0, "grid must be positive");
        const FAN: u64 = 64;
        let mut step = 1u64;
        while !feasible(problem, (step as f64) * grid) {
            step *= FAN;
        }
        // first feasible multiple of `step` lies in (0, step]; refine downwards
        let mut base = 0u64;
        let mut width = step;
        if feasible(problem, 0.0) {
            width = 0;
        }
        while width > 1 {
            let sub = width / FAN;
            let mut m = 1;
            while !feasible(problem, ((base + m * sub) as f64) * grid) {
                m += 1;
            }
            base += (m - 1) * sub;
            width = sub;
        }
        let t = ((base + width) as f64) * grid;

        let (target_lo, _) = target_interval(problem.noisy_total, problem.slack);
        let mut x: Vec<f64> = problem
            .noisy_dest
            .iter()
            .map(|&d| (d - t).max(0.0))
            .collect();
        let mut missing = target_lo - x.iter().sum::<f64>();
        for (xi, &d) in x.iter_mut().zip(&problem.noisy_dest) {
            if missing <= 0.0 {
                break;
            }
            let add = (d + t - *xi).min(missing);
            *xi += add;
            missing -= add;
        }
        ProjectionSolution { x, t_star: t }
    }
}
