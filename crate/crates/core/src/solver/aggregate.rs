use rayon::prelude::*;

use super::{argmax_first, reachable_grids, EpochValues, Policy, SolverLimits, ValueTable};
use crate::action::actions_by_cost;
use crate::budget::budget_next;
use crate::error::{Error, Result};
use crate::kernel::{complete_transition_row, TransitionRow};
use crate::params::ModelParams;
use crate::reward::reward_aggregate;
use crate::state::AggregateAction;

/// Result of one Bellman backup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backup {
    pub value: f64,
    pub action: AggregateAction,
}

/// Canonically ordered actions per state with their costs and kernel rows.
struct ActionTable {
    per_state: Vec<Vec<(AggregateAction, u64, TransitionRow)>>,
}

impl ActionTable {
    fn build(params: &ModelParams, cap: u64) -> Result<Self> {
        let per_state = (0..=params.n)
            .map(|s| {
                actions_by_cost(params, s)
                    .into_iter()
                    .map(|a| (a, a.cost(params.c_ns, params.c_s)))
                    .take_while(|&(_, cost)| cost <= cap)
                    .map(|(a, cost)| Ok((a, cost, complete_transition_row(params.n, s, a)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { per_state })
    }

    fn affordable(&self, s: usize, budget: u64) -> &[(AggregateAction, u64, TransitionRow)] {
        let list = &self.per_state[s];
        let end = list.partition_point(|&(_, cost, _)| cost <= budget);
        &list[..end]
    }
}

/// One step of the Bellman recursion at supporter count `s` and `budget`,
/// given the values of the following epoch.
///
/// Maximizes `r(s) + beta * sum_s' p(s, s', a) v_next(s', b')` over affordable
/// actions, where `b'` follows [`budget_next`]. Ties go to the cheaper action,
/// then to fewer paid non-supporters.
pub fn bellman_backup(
    params: &ModelParams,
    next: EpochValues<'_>,
    s: usize,
    budget: u64,
) -> Result<Backup> {
    if s > params.n {
        return Err(Error::StateOutOfRange {
            state: s,
            n: params.n,
        });
    }
    let candidates = actions_by_cost(params, s)
        .into_iter()
        .map(|a| (a, a.cost(params.c_ns, params.c_s)))
        .take_while(|&(_, cost)| cost <= budget)
        .map(|(a, cost)| Ok((a, cost, complete_transition_row(params.n, s, a)?)))
        .collect::<Result<Vec<_>>>()?;
    backup(params, next, s, budget, &candidates)
}

/// Value of taking `act` at `(s, budget)` and acting optimally afterwards.
pub fn action_value(
    params: &ModelParams,
    next: EpochValues<'_>,
    s: usize,
    budget: u64,
    act: AggregateAction,
) -> Result<f64> {
    let row = complete_transition_row(params.n, s, act)?;
    let cost = act.cost(params.c_ns, params.c_s);
    if cost > budget {
        return Err(Error::Overspend { cost, budget });
    }
    Ok(backup(params, next, s, budget, &[(act, cost, row)])?.value)
}

fn backup(
    params: &ModelParams,
    next: EpochValues<'_>,
    s: usize,
    budget: u64,
    actions: &[(AggregateAction, u64, TransitionRow)],
) -> Result<Backup> {
    let reward = reward_aggregate(s, params.g);
    let cap = next.grid.cap();
    let width = next.grid.len();
    let mut candidates = Vec::with_capacity(actions.len());
    for (act, cost, row) in actions {
        let nb = budget_next(budget, reward, *cost, cap)?;
        let bi = next.grid.index_of(nb).ok_or(Error::BudgetOffGrid(nb))?;
        let continuation: f64 = row
            .probs()
            .iter()
            .enumerate()
            .map(|(s2, p)| p * next.values[s2 * width + bi])
            .sum();
        candidates.push((reward as f64 + params.beta * continuation, *act));
    }
    let (value, action) = argmax_first(&candidates);
    Ok(Backup { value, action })
}

/// Solves the fully connected model by backward induction over the budget
/// levels reachable from the initial budget.
pub fn solve_aggregate(
    params: &ModelParams,
    limits: &SolverLimits,
) -> Result<(ValueTable, Policy<AggregateAction>)> {
    params.validate()?;
    let actions = ActionTable::build(params, params.budget_cap())?;
    let states = params.n + 1;
    let moves = actions.per_state.iter().enumerate().flat_map(|(s, list)| {
        let reward = reward_aggregate(s, params.g);
        list.iter().map(move |&(_, cost, _)| (reward, cost))
    });
    let grids = reachable_grids(
        params.initial_budget,
        params.horizon,
        params.budget_cap(),
        moves,
        states,
        limits,
    )?;
    let horizon = params.horizon;

    let mut values: Vec<Vec<f64>> = vec![Vec::new(); horizon + 1];
    let mut policy: Vec<Vec<AggregateAction>> = vec![Vec::new(); horizon];

    let terminal = &grids[horizon];
    values[horizon] = (0..states)
        .flat_map(|s| std::iter::repeat_n(reward_aggregate(s, params.g) as f64, terminal.len()))
        .collect();

    for t in (0..horizon).rev() {
        let grid = &grids[t];
        let next = EpochValues {
            grid: &grids[t + 1],
            values: &values[t + 1],
        };
        let width = grid.len();
        let backups = (0..states * width)
            .into_par_iter()
            .map(|cell| {
                let (s, bi) = (cell / width, cell % width);
                let b = grid.levels()[bi];
                backup(params, next, s, b, actions.affordable(s, b))
            })
            .collect::<Result<Vec<_>>>()?;
        values[t] = backups.iter().map(|b| b.value).collect();
        policy[t] = backups.iter().map(|b| b.action).collect();
    }

    let policy_grids = grids[..horizon].to_vec();
    Ok((
        ValueTable::new(states, grids, values),
        Policy::new(states, policy_grids, policy),
    ))
}
