//! Finite-horizon backward induction over (epoch, state, budget).
//!
//! Epochs run `t = 0..=T`. Actions are chosen at `t < T`; the terminal
//! epoch collects its reward and nothing further.

mod aggregate;
mod vector;

pub use aggregate::{action_value, bellman_backup, solve_aggregate, Backup};
pub use vector::{solve_vector, CostVector, VectorModel, MAX_SOLVE_AGENTS};

use std::collections::{BTreeMap, BTreeSet};

use crate::budget::{budget_next, BudgetGrid};
use crate::error::{Error, Result};

/// Relative slack under which two action values count as tied. The earlier
/// action in canonical order wins a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Resource guard for table construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    /// Upper bound on stored (epoch, state, budget) cells.
    pub max_cells: usize,
    /// Upper bound on successor evaluations for the vector solver.
    pub max_work: u128,
}

impl Default for SolverLimits {
    fn default() -> Self {
        Self {
            max_cells: 20_000_000,
            max_work: 2_000_000_000,
        }
    }
}

/// Solved values `v_t(state, budget)` for `t = 0..=T`.
///
/// States are indexed by supporter count in the aggregate model and by the
/// label bit pattern in the vector model.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    num_states: usize,
    grids: Vec<BudgetGrid>,
    values: Vec<Vec<f64>>,
}

/// Values of one epoch, as consumed by a Bellman backup.
#[derive(Debug, Clone, Copy)]
pub struct EpochValues<'a> {
    pub grid: &'a BudgetGrid,
    pub values: &'a [f64],
}

impl EpochValues<'_> {
    pub fn get(&self, state: usize, budget: u64) -> Option<f64> {
        let b = self.grid.index_of(budget)?;
        self.values.get(state * self.grid.len() + b).copied()
    }
}

impl ValueTable {
    pub(crate) fn new(num_states: usize, grids: Vec<BudgetGrid>, values: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(grids.len(), values.len());
        Self {
            num_states,
            grids,
            values,
        }
    }

    /// Number of epochs stored, `T + 1`.
    pub fn epochs(&self) -> usize {
        self.values.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn grid(&self, t: usize) -> &BudgetGrid {
        &self.grids[t]
    }

    pub fn epoch(&self, t: usize) -> EpochValues<'_> {
        EpochValues {
            grid: &self.grids[t],
            values: &self.values[t],
        }
    }

    pub fn get(&self, t: usize, state: usize, budget: u64) -> Option<f64> {
        if t >= self.epochs() {
            return None;
        }
        self.epoch(t).get(state, budget)
    }

    /// Total number of stored cells.
    pub fn cells(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    /// Iterates `(t, state, budget, value)` in epoch, state, budget order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64, f64)> + '_ {
        self.grids.iter().enumerate().flat_map(move |(t, grid)| {
            let vals = &self.values[t];
            (0..self.num_states).flat_map(move |s| {
                grid.levels()
                    .iter()
                    .enumerate()
                    .map(move |(bi, &b)| (t, s, b, vals[s * grid.len() + bi]))
            })
        })
    }
}

/// Optimal action per `(t, state, budget)` for `t < T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy<A> {
    num_states: usize,
    grids: Vec<BudgetGrid>,
    actions: Vec<Vec<A>>,
}

impl<A: Copy> Policy<A> {
    pub(crate) fn new(num_states: usize, grids: Vec<BudgetGrid>, actions: Vec<Vec<A>>) -> Self {
        debug_assert_eq!(grids.len(), actions.len());
        Self {
            num_states,
            grids,
            actions,
        }
    }

    /// Number of decision epochs, `T`.
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn grid(&self, t: usize) -> &BudgetGrid {
        &self.grids[t]
    }

    pub fn get(&self, t: usize, state: usize, budget: u64) -> Option<A> {
        let grid = self.grids.get(t)?;
        let b = grid.index_of(budget)?;
        if state >= self.num_states {
            return None;
        }
        self.actions[t].get(state * grid.len() + b).copied()
    }

    pub(crate) fn lookup(
        &self,
        t: usize,
        state: usize,
        label: impl FnOnce() -> String,
        budget: u64,
    ) -> Result<A> {
        self.get(t, state, budget).ok_or_else(|| Error::PolicyMiss {
            epoch: t,
            state: label(),
            budget,
        })
    }

    /// Iterates `(t, state, budget, action)` in epoch, state, budget order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64, A)> + '_ {
        self.grids.iter().enumerate().flat_map(move |(t, grid)| {
            let acts = &self.actions[t];
            (0..self.num_states).flat_map(move |s| {
                grid.levels()
                    .iter()
                    .enumerate()
                    .map(move |(bi, &b)| (t, s, b, acts[s * grid.len() + bi]))
            })
        })
    }
}

/// Budget levels reachable at each epoch `0..=horizon` from `initial`.
///
/// `moves` lists every (reward, cost) pair some state can realize; a cost is
/// usable from level `b` only when it does not exceed `b`.
pub(crate) fn reachable_grids(
    initial: u64,
    horizon: usize,
    cap: u64,
    moves: impl IntoIterator<Item = (u64, u64)>,
    num_states: usize,
    limits: &SolverLimits,
) -> Result<Vec<BudgetGrid>> {
    let mut by_reward: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    for (reward, cost) in moves {
        by_reward.entry(reward).or_default().insert(cost);
    }

    let mut grids = vec![BudgetGrid::new(vec![initial.min(cap)], cap)];
    let mut cells = num_states;
    for _ in 0..horizon {
        let current = grids.last().expect("nonempty");
        let mut levels = BTreeSet::new();
        for &b in current.levels() {
            for (&reward, costs) in &by_reward {
                for &cost in costs.range(..=b) {
                    levels.insert(budget_next(b, reward, cost, cap)?);
                }
            }
        }
        let grid = BudgetGrid::new(levels.into_iter().collect(), cap);
        cells += num_states * grid.len();
        check_cells(cells, limits)?;
        grids.push(grid);
    }
    Ok(grids)
}

pub(crate) fn check_cells(cells: usize, limits: &SolverLimits) -> Result<()> {
    if cells > limits.max_cells {
        return Err(Error::TooLarge {
            what: "value table",
            size: cells,
            limit: limits.max_cells,
        });
    }
    Ok(())
}

/// Picks the first candidate within [`TIE_TOLERANCE`] of the maximum and
/// returns it together with the maximum itself.
pub(crate) fn argmax_first<A: Copy>(candidates: &[(f64, A)]) -> (f64, A) {
    let best = candidates
        .iter()
        .map(|c| c.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = TIE_TOLERANCE * best.abs().max(1.0);
    let chosen = candidates
        .iter()
        .find(|c| c.0 >= best - slack)
        .expect("at least one candidate");
    (best, chosen.1)
}
