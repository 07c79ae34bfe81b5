use rayon::prelude::*;

use super::{argmax_first, reachable_grids, EpochValues, Policy, SolverLimits, ValueTable};
use crate::budget::{budget_next, BudgetGrid};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{successors_from_probs, support_probs};
use crate::params::ModelParams;
use crate::state::{full_mask, VectorAction, VectorState, MAX_VECTOR_AGENTS};

/// Largest population the exact vector solver accepts (`2^n` states).
pub const MAX_SOLVE_AGENTS: usize = 12;

/// Price of paying each agent.
#[derive(Debug, Clone, PartialEq)]
pub enum CostVector {
    /// Price depends on the payee's current label, as in the fully
    /// connected model.
    ByLabel { c_ns: u64, c_s: u64 },
    /// Fixed positive price per agent.
    PerAgent(Vec<u64>),
}

/// A network instance: graph, payment prices and per-agent reward rates.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorModel {
    graph: Graph,
    costs: CostVector,
    rewards: Vec<u64>,
}

impl VectorModel {
    pub fn new(graph: Graph, costs: CostVector, rewards: Vec<u64>) -> Result<Self> {
        let n = graph.len();
        if n > MAX_VECTOR_AGENTS {
            return Err(Error::TooLarge {
                what: "agent count",
                size: n,
                limit: MAX_VECTOR_AGENTS,
            });
        }
        graph.check_no_isolated()?;
        if rewards.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: rewards.len(),
            });
        }
        match &costs {
            CostVector::ByLabel { c_ns, c_s } if *c_ns == 0 || *c_s == 0 => {
                return Err(Error::InvalidParams(
                    "payment costs must be positive".into(),
                ))
            }
            CostVector::PerAgent(c) if c.len() != n => {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: c.len(),
                })
            }
            CostVector::PerAgent(c) if c.contains(&0) => {
                return Err(Error::InvalidParams(
                    "payment costs must be positive".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            graph,
            costs,
            rewards,
        })
    }

    /// Label-dependent prices and a uniform reward rate taken from `params`.
    pub fn uniform(graph: Graph, params: &ModelParams) -> Result<Self> {
        let n = graph.len();
        Self::new(
            graph,
            CostVector::ByLabel {
                c_ns: params.c_ns,
                c_s: params.c_s,
            },
            vec![params.g; n],
        )
    }

    /// The agent-level counterpart of the fully connected model.
    pub fn complete(params: &ModelParams) -> Result<Self> {
        Self::uniform(Graph::complete_with_self_loops(params.n), params)
    }

    pub fn n(&self) -> usize {
        self.graph.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn costs(&self) -> &CostVector {
        &self.costs
    }

    pub fn rewards(&self) -> &[u64] {
        &self.rewards
    }

    pub fn agent_cost(&self, state: &VectorState, i: usize) -> u64 {
        match &self.costs {
            CostVector::ByLabel { c_ns, c_s } => {
                if state.get(i) {
                    *c_s
                } else {
                    *c_ns
                }
            }
            CostVector::PerAgent(c) => c[i],
        }
    }

    pub fn action_cost(&self, state: &VectorState, act: &VectorAction) -> u64 {
        act.ones_iter().map(|i| self.agent_cost(state, i)).sum()
    }

    pub fn reward(&self, state: &VectorState) -> u64 {
        state.ones_iter().map(|i| self.rewards[i]).sum()
    }

    pub fn budget_cap(&self, params: &ModelParams) -> u64 {
        params.initial_budget + params.horizon as u64 * self.rewards.iter().sum::<u64>()
    }

    /// Affordable payment vectors in canonical order: ascending cost, then
    /// fewer paid non-supporters, then ascending bit pattern.
    pub fn feasible_actions(&self, state: &VectorState, budget: u64) -> Vec<VectorAction> {
        self.actions_by_cost(state)
            .into_iter()
            .take_while(|&(_, cost)| cost <= budget)
            .map(|(a, _)| a)
            .collect()
    }

    fn actions_by_cost(&self, state: &VectorState) -> Vec<(VectorAction, u64)> {
        let n = self.n();
        let mut out: Vec<_> = (0..=full_mask(n))
            .map(|bits| {
                let act = VectorAction::new(n, bits).expect("bits within n");
                let cost = self.action_cost(state, &act);
                (act, cost)
            })
            .collect();
        out.sort_by_key(|(a, cost)| (*cost, a.split(state).ell, a.bits()));
        out
    }
}

struct StateInfo {
    probs: Vec<f64>,
    reward: u64,
    actions: Vec<(VectorAction, u64)>,
}

/// Exact backward induction over all `2^n` label vectors.
pub fn solve_vector(
    params: &ModelParams,
    model: &VectorModel,
    limits: &SolverLimits,
) -> Result<(ValueTable, Policy<VectorAction>)> {
    params.validate()?;
    let n = model.n();
    if n != params.n {
        return Err(Error::LengthMismatch {
            expected: params.n,
            got: n,
        });
    }
    if n > MAX_SOLVE_AGENTS {
        return Err(Error::TooLarge {
            what: "vector solver population",
            size: n,
            limit: MAX_SOLVE_AGENTS,
        });
    }
    // Every epoch holds at least one budget level.
    check_work(params.horizon, n, limits)?;
    let cap = model.budget_cap(params);
    let states = 1usize << n;
    let info = (0..states)
        .map(|bits| {
            let state = VectorState::new(n, bits as u64)?;
            let mut actions = model.actions_by_cost(&state);
            actions.retain(|&(_, cost)| cost <= cap);
            Ok(StateInfo {
                probs: support_probs(model.graph(), &state)?,
                reward: model.reward(&state),
                actions,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let moves = info
        .iter()
        .flat_map(|si| si.actions.iter().map(move |&(_, cost)| (si.reward, cost)));
    let grids = reachable_grids(
        params.initial_budget,
        params.horizon,
        cap,
        moves,
        states,
        limits,
    )?;
    let budget_cells: usize = grids[..params.horizon].iter().map(BudgetGrid::len).sum();
    check_work(budget_cells, n, limits)?;

    let horizon = params.horizon;
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); horizon + 1];
    let mut policy: Vec<Vec<VectorAction>> = vec![Vec::new(); horizon];
    let terminal = &grids[horizon];
    values[horizon] = info
        .iter()
        .flat_map(|si| std::iter::repeat_n(si.reward as f64, terminal.len()))
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
                backup(params, n, next, &info[s], grid.levels()[bi])
            })
            .collect::<Result<Vec<_>>>()?;
        values[t] = backups.iter().map(|b| b.0).collect();
        policy[t] = backups.iter().map(|b| b.1).collect();
    }

    let policy_grids = grids[..horizon].to_vec();
    Ok((
        ValueTable::new(states, grids, values),
        Policy::new(states, policy_grids, policy),
    ))
}

/// Each (state, action) pair branches over its unpaid agents, so one budget
/// level costs at most `sum_states sum_actions 2^unpaid = 6^n` evaluations.
fn check_work(budget_cells: usize, n: usize, limits: &SolverLimits) -> Result<()> {
    let work = budget_cells as u128 * 6u128.pow(n as u32);
    if work > limits.max_work {
        return Err(Error::TooLarge {
            what: "vector solver workload",
            size: usize::try_from(work).unwrap_or(usize::MAX),
            limit: usize::try_from(limits.max_work).unwrap_or(usize::MAX),
        });
    }
    Ok(())
}

fn backup(
    params: &ModelParams,
    n: usize,
    next: EpochValues<'_>,
    info: &StateInfo,
    budget: u64,
) -> Result<(f64, VectorAction)> {
    let width = next.grid.len();
    let affordable = info.actions.partition_point(|&(_, cost)| cost <= budget);
    let mut candidates = Vec::with_capacity(affordable);
    for &(act, cost) in &info.actions[..affordable] {
        let nb = budget_next(budget, info.reward, cost, next.grid.cap())?;
        let bi = next.grid.index_of(nb).ok_or(Error::BudgetOffGrid(nb))?;
        let continuation: f64 = successors_from_probs(n, &info.probs, act.bits())
            .into_iter()
            .map(|(s2, p)| p * next.values[s2.bits() as usize * width + bi])
            .sum();
        candidates.push((info.reward as f64 + params.beta * continuation, act));
    }
    Ok(argmax_first(&candidates))
}

impl Policy<VectorAction> {
    /// Action for a label vector, or an error naming the missing cell.
    pub fn action_for(&self, t: usize, state: &VectorState, budget: u64) -> Result<VectorAction> {
        self.lookup(t, state.bits() as usize, || state.to_string(), budget)
    }
}
