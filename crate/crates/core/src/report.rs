//! Summaries of a solved aggregate policy.

use std::collections::BTreeMap;

use crate::budget::budget_next;
use crate::error::Result;
use crate::kernel::complete_transition_row;
use crate::params::ModelParams;
use crate::reward::reward_aggregate;
use crate::solver::Policy;
use crate::state::AggregateAction;

/// First-epoch allocation for one initial supporter count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocationRow {
    pub state: usize,
    pub pay_ns: usize,
    pub pay_s: usize,
}

impl Policy<AggregateAction> {
    pub fn action_at(&self, t: usize, s: usize, budget: u64) -> Result<AggregateAction> {
        self.lookup(t, s, || s.to_string(), budget)
    }
}

/// The `t = 0` action at the initial budget for every mixed initial state
/// `s = 1..n`.
pub fn initial_allocation_table(
    policy: &Policy<AggregateAction>,
    params: &ModelParams,
) -> Result<Vec<AllocationRow>> {
    (1..params.n)
        .map(|s| {
            let act = policy.action_at(0, s, params.initial_budget)?;
            Ok(AllocationRow {
                state: s,
                pay_ns: act.ell,
                pay_s: act.k,
            })
        })
        .collect()
}

/// Exact joint law of (supporters, budget) at every epoch when following
/// `policy` from `initial_s` with the initial budget. Entry `t` maps
/// `(s, b)` to its probability.
pub fn state_budget_distribution(
    policy: &Policy<AggregateAction>,
    params: &ModelParams,
    initial_s: usize,
) -> Result<Vec<BTreeMap<(usize, u64), f64>>> {
    let cap = params.budget_cap();
    let mut dist = BTreeMap::new();
    dist.insert((initial_s, params.initial_budget.min(cap)), 1.0);
    let mut out = vec![dist];
    for t in 0..params.horizon {
        let mut next = BTreeMap::new();
        for (&(s, b), &mass) in out.last().expect("nonempty") {
            let act = policy.action_at(t, s, b)?;
            let cost = act.cost(params.c_ns, params.c_s);
            let nb = budget_next(b, reward_aggregate(s, params.g), cost, cap)?;
            let row = complete_transition_row(params.n, s, act)?;
            for (s2, &p) in row.probs().iter().enumerate() {
                if p > 0.0 {
                    *next.entry((s2, nb)).or_insert(0.0) += mass * p;
                }
            }
        }
        out.push(next);
    }
    Ok(out)
}

/// `E[r(s_T)]` under `policy` starting from `initial_s` supporters.
pub fn expected_terminal_reward(
    policy: &Policy<AggregateAction>,
    params: &ModelParams,
    initial_s: usize,
) -> Result<f64> {
    let dists = state_budget_distribution(policy, params, initial_s)?;
    let terminal = dists.last().expect("nonempty");
    Ok(terminal
        .iter()
        .map(|(&(s, _), &p)| p * reward_aggregate(s, params.g) as f64)
        .sum())
}

/// [`expected_terminal_reward`] for every initial state `0..=n`.
pub fn reward_curve(
    policy: &Policy<AggregateAction>,
    params: &ModelParams,
) -> Result<Vec<(usize, f64)>> {
    (0..=params.n)
        .map(|s| Ok((s, expected_terminal_reward(policy, params, s)?)))
        .collect()
}
