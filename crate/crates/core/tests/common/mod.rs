#![allow(dead_code)]

use dprl::mdp::{RewardKind, TabularMdp};
use ndarray::{Array1, Array3, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random MDP with dense rows; the initial distribution is uniform.
pub fn random_mdp(seed: u64, states: usize, actions: usize, horizon: usize) -> TabularMdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Array4::<f64>::zeros((horizon, states, actions, states));
    for h in 0..horizon {
        for s in 0..states {
            for a in 0..actions {
                let raw: Vec<f64> = (0..states).map(|_| rng.gen::<f64>() + 0.01).collect();
                let total: f64 = raw.iter().sum();
                for (t, v) in raw.iter().enumerate() {
                    p[[h, s, a, t]] = v / total;
                }
            }
        }
    }
    let r = Array3::from_shape_fn((horizon, states, actions), |_| rng.gen::<f64>());
    let d1 = Array1::from_elem(states, 1.0 / states as f64);
    TabularMdp::new(p, r, d1, RewardKind::Bernoulli).unwrap()
}

/// Value of a Markov policy given as `table[h][s]`, by direct recursion over
/// `(h, s)` without any shared code from the library.
pub fn evaluate(mdp: &TabularMdp, table: &[Vec<usize>]) -> Vec<f64> {
    let (h_n, s_n) = (mdp.horizon(), mdp.states());
    let p = mdp.transitions();
    let r = mdp.mean_reward();
    let mut next = vec![0.0; s_n];
    for h in (0..h_n).rev() {
        let mut cur = vec![0.0; s_n];
        for s in 0..s_n {
            let a = table[h][s];
            let mut v = r[[h, s, a]];
            for t in 0..s_n {
                v += p[[h, s, a, t]] * next[t];
            }
            cur[s] = v;
        }
        next = cur;
    }
    next
}

/// Best value from every start state over all `A^(S·H)` deterministic Markov policies.
pub fn brute_force_optimum(mdp: &TabularMdp) -> Vec<f64> {
    let (h_n, s_n, a_n) = (mdp.horizon(), mdp.states(), mdp.actions());
    let cells = h_n * s_n;
    let total = (a_n as u64).pow(cells as u32);
    let mut best = vec![f64::NEG_INFINITY; s_n];
    for code in 0..total {
        let mut c = code;
        let mut table = vec![vec![0; s_n]; h_n];
        for row in table.iter_mut() {
            for slot in row.iter_mut() {
                *slot = (c % a_n as u64) as usize;
                c /= a_n as u64;
            }
        }
        for (b, v) in best.iter_mut().zip(evaluate(mdp, &table)) {
            *b = b.max(v);
        }
    }
    best
}

/// Straightforward (non-incremental) Bernstein bonus, written term by term
/// from the formula and sharing nothing with the library.
#[allow(clippy::too_many_arguments)]
pub fn reference_bonus(
    h: f64,
    s: f64,
    a: f64,
    iota: f64,
    e: f64,
    n: f64,
    next_n: &[f64],
    p: &[f64],
    v: &[f64],
) -> f64 {
    let m1: f64 = p.iter().zip(v).map(|(p, v)| p * v).sum();
    let m2: f64 = p.iter().zip(v).map(|(p, v)| p * v.powi(2)).sum();
    let var = (m2 - m1.powi(2)).max(0.0);
    let t1 = 2.0 * (var * iota / n).sqrt();
    let t2 = (2.0 * iota / n).sqrt();
    let t3 = 20.0 * h * s * e * iota / n;
    let k = 1.0e6;
    let mut inner = 0.0;
    for (pi, ni) in p.iter().zip(next_n) {
        let x = k * h.powi(3) * s * a * iota.powi(2) / ni
            + k * h.powi(4) * s.powi(4) * a.powi(2) * e.powi(2) * iota.powi(4) / ni.powi(2)
            + k * h.powi(6) * s.powi(4) * a.powi(2) * iota.powi(4) / ni.powi(2);
        inner += pi * x.min(h * h);
    }
    let t4 = 4.0 * iota.sqrt() * (inner / n).sqrt();
    t1 + t2 + t3 + t4
}
