//! Monte Carlo simulation of the paid voter model.
//!
//! Every random draw comes from a ChaCha stream derived from one 64-bit
//! seed; sample `i` always uses stream `i`, so results do not depend on how
//! samples are scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::budget::budget_next;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::VectorTransitionRow;
use crate::params::ModelParams;
use crate::solver::{Policy, VectorModel};
use crate::state::{AggregateAction, VectorAction, VectorState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub num_samples: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(num_samples: usize, seed: u64) -> Result<Self> {
        let cfg = Self { num_samples, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(Error::InvalidSimConfig(
                "num_samples must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Independent generator for sample `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Advances every agent synchronously by one epoch.
///
/// Paid agents become supporters. Each unpaid agent copies the pre-step
/// label of a uniformly drawn neighbor.
pub fn step<R: Rng + ?Sized>(
    graph: &Graph,
    state: &VectorState,
    act: &VectorAction,
    rng: &mut R,
) -> Result<VectorState> {
    let n = graph.len();
    if state.len() != n || act.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: if state.len() != n {
                state.len()
            } else {
                act.len()
            },
        });
    }
    let mut next = VectorState::zeros(n);
    for i in 0..n {
        let label = if act.get(i) {
            true
        } else {
            let nbrs = graph.neighbors(i);
            if nbrs.is_empty() {
                return Err(Error::IsolatedAgent(i));
            }
            state.get(nbrs[rng.random_range(0..nbrs.len())])
        };
        next.set(i, label);
    }
    Ok(next)
}

/// Something that picks a payment vector at each epoch.
pub trait ControlPolicy {
    fn decide(&self, t: usize, state: &VectorState, budget: u64) -> Result<VectorAction>;
}

impl ControlPolicy for Policy<VectorAction> {
    fn decide(&self, t: usize, state: &VectorState, budget: u64) -> Result<VectorAction> {
        self.action_for(t, state, budget)
    }
}

/// An aggregate policy acts on label vectors through their supporter count.
impl ControlPolicy for Policy<AggregateAction> {
    fn decide(&self, t: usize, state: &VectorState, budget: u64) -> Result<VectorAction> {
        let act = self.action_at(t, state.count_ones(), budget)?;
        lift_action(state, act)
    }
}

/// Pays the lowest-indexed `act.ell` non-supporters and `act.k` supporters.
pub fn lift_action(state: &VectorState, act: AggregateAction) -> Result<VectorAction> {
    let n = state.len();
    act.check(n, state.count_ones())?;
    let mut pay = VectorAction::zeros(n);
    let (mut ell, mut k) = (act.ell, act.k);
    for i in 0..n {
        if state.get(i) && k > 0 {
            pay.set(i, true);
            k -= 1;
        } else if !state.get(i) && ell > 0 {
            pay.set(i, true);
            ell -= 1;
        }
    }
    Ok(pay)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RolloutResult {
    pub discounted_reward: f64,
    pub terminal_state: VectorState,
    /// Labels at `t = 0..=T`.
    pub states: Vec<VectorState>,
    /// Budget held at `t = 0..=T`.
    pub budget_trajectory: Vec<u64>,
}

/// Simulates one trajectory under `policy` and accumulates
/// `sum_{t=0}^{T} beta^t r(s_t)`.
pub fn rollout<P, R>(
    policy: &P,
    initial: &VectorState,
    params: &ModelParams,
    model: &VectorModel,
    rng: &mut R,
) -> Result<RolloutResult>
where
    P: ControlPolicy + ?Sized,
    R: Rng + ?Sized,
{
    let cap = model.budget_cap(params);
    let mut state = *initial;
    let mut budget = params.initial_budget.min(cap);
    let mut states = Vec::with_capacity(params.horizon + 1);
    let mut budgets = Vec::with_capacity(params.horizon + 1);
    let mut discount = 1.0;
    let mut total = 0.0;

    for t in 0..params.horizon {
        states.push(state);
        budgets.push(budget);
        let reward = model.reward(&state);
        total += discount * reward as f64;
        let act = policy.decide(t, &state, budget)?;
        let cost = model.action_cost(&state, &act);
        budget = budget_next(budget, reward, cost, cap)?;
        state = step(model.graph(), &state, &act, rng)?;
        discount *= params.beta;
    }
    states.push(state);
    budgets.push(budget);
    total += discount * model.reward(&state) as f64;

    Ok(RolloutResult {
        discounted_reward: total,
        terminal_state: state,
        states,
        budget_trajectory: budgets,
    })
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let m = xs.len() as f64;
        // Shift by the first sample so identical samples give exactly zero spread.
        let shift = xs.first().copied().unwrap_or(0.0);
        let offset = xs.iter().map(|x| x - shift).sum::<f64>() / m;
        let mean = shift + offset;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - shift - offset).powi(2)).sum::<f64>() / (m - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / m).sqrt(),
            samples: xs.len(),
        }
    }
}

/// Monte Carlo estimate of the discounted reward of `policy` from `initial`.
pub fn estimate_value<P>(
    policy: &P,
    initial: &VectorState,
    params: &ModelParams,
    model: &VectorModel,
    cfg: &SimConfig,
) -> Result<Estimate>
where
    P: ControlPolicy + Sync + ?Sized,
{
    if cfg.num_samples < 2 {
        return Err(Error::InvalidSimConfig(
            "value estimation needs at least 2 samples".into(),
        ));
    }
    let rewards = (0..cfg.num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(cfg.seed, i);
            rollout(policy, initial, params, model, &mut rng).map(|r| r.discounted_reward)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&rewards))
}

/// Frequency estimate of the one-step successor distribution.
pub fn empirical_transition_row(
    graph: &Graph,
    state: &VectorState,
    act: &VectorAction,
    cfg: &SimConfig,
) -> Result<VectorTransitionRow> {
    if cfg.num_samples < 1000 {
        return Err(Error::InvalidSimConfig(
            "empirical rows need at least 1000 samples".into(),
        ));
    }
    let draws = (0..cfg.num_samples as u64)
        .into_par_iter()
        .map(|i| step(graph, state, act, &mut substream(cfg.seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let mut counts: BTreeMap<VectorState, usize> = BTreeMap::new();
    for next in draws {
        *counts.entry(next).or_insert(0) += 1;
    }
    let mut row = VectorTransitionRow::new(graph.len());
    for (next, c) in counts {
        row.add(next, c as f64 / cfg.num_samples as f64);
    }
    Ok(row)
}
