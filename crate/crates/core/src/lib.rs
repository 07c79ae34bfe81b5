//! Optimal sequential budget allocation for promoting an opinion in a
//! voter-model social network.
//!
//! The controller pays agents to become (or stay) supporters. Payments come
//! out of a budget that is replenished each epoch by a reward proportional to
//! the number of supporters. The optimal payment policy over a finite
//! horizon is found by backward induction over (epoch, state, budget) and
//! checked against an agent-level Monte Carlo simulator.
//!
//! Two models are supported:
//!
//! * the fully connected population, where the state is the supporter count
//!   and an action is a split `(ell, k)` of payments to non-supporters and
//!   supporters ([`solve_aggregate`]);
//! * an arbitrary undirected network, where the state is the label vector and
//!   an action is a payment vector ([`solve_vector`]).

pub mod action;
pub mod budget;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod oracle;
pub mod params;
pub mod report;
pub mod reward;
pub mod sim;
pub mod solver;
pub mod state;
pub mod validation;

pub use action::{can_extend, feasible_actions};
pub use budget::{budget_next, BudgetGrid};
pub use error::{Error, Result};
pub use graph::Graph;
pub use kernel::{
    complete_transition_prob, complete_transition_row, general_agent_support_prob,
    general_transition_prob, TransitionRow, VectorTransitionRow,
};
pub use oracle::brute_force_transition_row;
pub use params::ModelParams;
pub use report::{expected_terminal_reward, initial_allocation_table, reward_curve, AllocationRow};
pub use reward::{reward_aggregate, reward_vector};
pub use sim::{estimate_value, rollout, step, ControlPolicy, Estimate, RolloutResult, SimConfig};
pub use solver::{
    action_value, bellman_backup, solve_aggregate, solve_vector, CostVector, Policy, SolverLimits,
    ValueTable, VectorModel,
};
pub use state::{AggregateAction, VectorAction, VectorState};
