//! Exact one-epoch transition kernels of the paid voter model.
//!
//! An unpaid agent copies the label of a uniformly chosen neighbor; a paid
//! agent is a supporter next epoch with certainty. All agents update
//! simultaneously from the current labels, so the joint law is a product of
//! per-agent Bernoulli laws.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::state::{AggregateAction, VectorAction, VectorState};

/// `C(n, k)` as a float; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// Distribution of the next supporter count, indexed `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    probs: Vec<f64>,
}

impl TransitionRow {
    pub fn from_probs(probs: Vec<f64>) -> Self {
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, s2: usize) -> f64 {
        self.probs.get(s2).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Expected supporter count under this row.
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(s, p)| s as f64 * p)
            .sum()
    }
}

/// Distribution over next label vectors. Only successors with positive
/// probability are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VectorTransitionRow {
    n: usize,
    entries: BTreeMap<VectorState, f64>,
}

impl VectorTransitionRow {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, next: VectorState, p: f64) {
        *self.entries.entry(next).or_insert(0.0) += p;
    }

    pub fn get(&self, next: &VectorState) -> f64 {
        self.entries.get(next).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VectorState, &f64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Aggregates the row by supporter count.
    pub fn lump(&self) -> TransitionRow {
        let mut probs = vec![0.0; self.n + 1];
        for (state, p) in &self.entries {
            probs[state.count_ones()] += p;
        }
        TransitionRow { probs }
    }
}

/// Probability that a fully connected population with `s1` supporters has
/// `s2` supporters next epoch after paying `act.ell` non-supporters and
/// `act.k` supporters.
///
/// Sums over `i`, the number of unpaid supporters that keep their label,
/// with each unpaid agent turning supporter with probability `s1 / n`.
pub fn complete_transition_prob(
    n: usize,
    s1: usize,
    s2: usize,
    act: AggregateAction,
) -> Result<f64> {
    act.check(n, s1)?;
    if s2 > n {
        return Err(Error::StateOutOfRange { state: s2, n });
    }
    let AggregateAction { ell, k } = act;
    let paid = ell + k;
    if s2 < paid {
        return Ok(0.0);
    }

    let up = s1 as f64 / n as f64;
    let down = (n - s1) as f64 / n as f64;
    let (n, s1, s2, ell, k) = (n as i64, s1 as i64, s2 as i64, ell as i64, k as i64);
    let lo = 0.max(s2 - (n - s1) - k);
    let hi = (s1 - k).min(s2 - ell);

    let mut total = 0.0;
    for i in lo..=hi {
        // i unpaid supporters stay; the remaining new supporters come from
        // the unpaid non-supporters.
        let converts = s2 - i - (ell + k);
        let stay_out = n - s1 - s2 + i + k;
        if converts < 0 || stay_out < 0 {
            continue;
        }
        let keep = binomial((s1 - k) as usize, i as usize)
            * up.powi(i as i32)
            * down.powi((s1 - k - i) as i32);
        let convert = binomial((n - s1 - ell) as usize, converts as usize)
            * down.powi(stay_out as i32)
            * up.powi(converts as i32);
        total += keep * convert;
    }
    Ok(total)
}

/// Full successor distribution of [`complete_transition_prob`] over `0..=n`.
pub fn complete_transition_row(n: usize, s1: usize, act: AggregateAction) -> Result<TransitionRow> {
    act.check(n, s1)?;
    let probs = (0..=n)
        .map(|s2| complete_transition_prob(n, s1, s2, act))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionRow { probs })
}

/// Probability that `agent` is a supporter next epoch.
pub fn general_agent_support_prob(
    graph: &Graph,
    state: &VectorState,
    agent: usize,
    paid: bool,
) -> Result<f64> {
    check_len(graph, state.len())?;
    if agent >= graph.len() {
        return Err(Error::StateOutOfRange {
            state: agent,
            n: graph.len(),
        });
    }
    let nbrs = graph.neighbors(agent);
    if nbrs.is_empty() {
        return Err(Error::IsolatedAgent(agent));
    }
    if paid {
        return Ok(1.0);
    }
    let supporters = nbrs.iter().filter(|&&j| state.get(j)).count();
    Ok(supporters as f64 / nbrs.len() as f64)
}

/// Probability of moving from `state` to `next` under payments `act` on an
/// arbitrary graph.
pub fn general_transition_prob(
    graph: &Graph,
    state: &VectorState,
    next: &VectorState,
    act: &VectorAction,
) -> Result<f64> {
    check_len(graph, state.len())?;
    check_len(graph, next.len())?;
    check_len(graph, act.len())?;
    let mut prob = 1.0;
    for i in 0..graph.len() {
        let p = general_agent_support_prob(graph, state, i, act.get(i))?;
        prob *= if next.get(i) { p } else { 1.0 - p };
    }
    Ok(prob)
}

/// Per-agent next-epoch support probabilities with no payments.
pub fn support_probs(graph: &Graph, state: &VectorState) -> Result<Vec<f64>> {
    (0..graph.len())
        .map(|i| general_agent_support_prob(graph, state, i, false))
        .collect()
}

/// Enumerates the successors of `state` under `act` with positive
/// probability. Only unpaid agents with a nondegenerate support
/// probability branch.
pub fn vector_successors(
    graph: &Graph,
    state: &VectorState,
    act: &VectorAction,
) -> Result<Vec<(VectorState, f64)>> {
    check_len(graph, act.len())?;
    let probs = support_probs(graph, state)?;
    Ok(successors_from_probs(state.len(), &probs, act.bits()))
}

pub(crate) fn successors_from_probs(n: usize, probs: &[f64], pay: u64) -> Vec<(VectorState, f64)> {
    let mut fixed = pay;
    let mut branching = Vec::new();
    for (i, &p) in probs.iter().enumerate() {
        if pay >> i & 1 == 1 || p == 1.0 {
            fixed |= 1 << i;
        } else if p > 0.0 {
            branching.push((i, p));
        }
    }
    let mut out = Vec::with_capacity(1 << branching.len());
    for combo in 0u64..1 << branching.len() {
        let mut bits = fixed;
        let mut prob = 1.0;
        for (j, &(i, p)) in branching.iter().enumerate() {
            if combo >> j & 1 == 1 {
                bits |= 1 << i;
                prob *= p;
            } else {
                prob *= 1.0 - p;
            }
        }
        out.push((VectorState::new(n, bits).expect("bits within n"), prob));
    }
    out
}

fn check_len(graph: &Graph, len: usize) -> Result<()> {
    if graph.len() != len {
        return Err(Error::LengthMismatch {
            expected: graph.len(),
            got: len,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(ell: usize, k: usize) -> AggregateAction {
        AggregateAction::new(ell, k)
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }

    #[test]
    fn everyone_paid_is_certain() {
        assert_eq!(complete_transition_prob(7, 3, 7, act(4, 3)).unwrap(), 1.0);
    }

    #[test]
    fn below_paid_count_is_zero() {
        assert_eq!(complete_transition_prob(7, 2, 2, act(2, 1)).unwrap(), 0.0);
    }

    #[test]
    fn two_agents_one_supporter() {
        // Enumerate the four joint outcomes, each agent supporter w.p. 1/2.
        let mut oracle = [0.0; 3];
        for outcome in 0..4u32 {
            oracle[outcome.count_ones() as usize] += 0.25;
        }
        assert_eq!(oracle, [0.25, 0.5, 0.25]);
        assert!((complete_transition_prob(2, 1, 2, act(0, 0)).unwrap() - 0.25).abs() < 1e-15);
        let row = complete_transition_row(2, 1, act(0, 0)).unwrap();
        for (got, want) in row.probs().iter().zip(oracle) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn unanimous_states_absorb() {
        let row = complete_transition_row(7, 0, act(0, 0)).unwrap();
        assert_eq!(row.get(0), 1.0);
        assert_eq!(row.total(), 1.0);
        let row = complete_transition_row(7, 7, act(0, 0)).unwrap();
        assert_eq!(row.get(7), 1.0);
        assert_eq!(row.total(), 1.0);
    }

    #[test]
    fn boundary_equal_to_paid_count() {
        // s2 == ell + k: every unpaid agent must turn non-supporter.
        let p = complete_transition_prob(7, 3, 3, act(1, 2)).unwrap();
        let want = (4.0f64 / 7.0).powi(4);
        assert!((p - want).abs() < 1e-15);
        let p = complete_transition_prob(7, 2, 2, act(0, 2)).unwrap();
        assert!((p - (5.0f64 / 7.0).powi(5)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(complete_transition_prob(7, 8, 0, act(0, 0)).is_err());
        assert!(complete_transition_prob(7, 3, 8, act(0, 0)).is_err());
        assert!(complete_transition_prob(7, 3, 5, act(0, 4)).is_err());
        assert!(complete_transition_prob(7, 3, 5, act(5, 0)).is_err());
    }

    #[test]
    fn agent_probabilities() {
        let star = Graph::star(3);
        let leaves = VectorState::parse("0111").unwrap();
        assert_eq!(
            general_agent_support_prob(&star, &leaves, 0, false).unwrap(),
            1.0
        );
        let none = VectorState::zeros(4);
        assert_eq!(
            general_agent_support_prob(&star, &none, 2, true).unwrap(),
            1.0
        );

        // Agent 1 on a 4-cycle neighbors 0 and 2; only 0 supports.
        let cycle = Graph::cycle(4);
        let s = VectorState::parse("1000").unwrap();
        assert_eq!(
            general_agent_support_prob(&cycle, &s, 1, false).unwrap(),
            0.5
        );
    }

    #[test]
    fn agent_marginals_match_support_probs() {
        let g = Graph::cycle(5);
        let s = VectorState::parse("10110").unwrap();
        let succ = vector_successors(&g, &s, &VectorAction::zeros(5)).unwrap();
        for i in 0..5 {
            let p = general_agent_support_prob(&g, &s, i, false).unwrap();
            let (on, off) = succ.iter().fold((0.0, 0.0), |(on, off), (next, q)| {
                if next.get(i) {
                    (on + q, off)
                } else {
                    (on, off + q)
                }
            });
            assert!((on - p).abs() < 1e-15);
            assert!((off - (1.0 - p)).abs() < 1e-15);
        }
    }

    #[test]
    fn isolated_agent_is_an_error() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let s = VectorState::zeros(3);
        assert_eq!(
            general_agent_support_prob(&g, &s, 2, false),
            Err(Error::IsolatedAgent(2))
        );
        let a = VectorAction::zeros(3);
        assert!(general_transition_prob(&g, &s, &s, &a).is_err());
    }

    #[test]
    fn general_product_form() {
        let g = Graph::complete_with_self_loops(2);
        let s = VectorState::parse("10").unwrap();
        let next = VectorState::parse("11").unwrap();
        let p = general_transition_prob(&g, &s, &next, &VectorAction::zeros(2)).unwrap();
        assert!((p - 0.25).abs() < 1e-15);

        let g = Graph::cycle(5);
        let s = VectorState::parse("00100").unwrap();
        let all = VectorState::ones(5);
        assert_eq!(
            general_transition_prob(&g, &s, &all, &VectorAction::ones(5)).unwrap(),
            1.0
        );
        let pay = VectorAction::parse("01000").unwrap();
        let next = VectorState::parse("10100").unwrap();
        assert_eq!(general_transition_prob(&g, &s, &next, &pay).unwrap(), 0.0);
    }

    #[test]
    fn successors_sum_to_one() {
        let g = Graph::cycle(6);
        let s = VectorState::parse("110100").unwrap();
        let pay = VectorAction::parse("001000").unwrap();
        let succ = vector_successors(&g, &s, &pay).unwrap();
        let total: f64 = succ.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (next, p) in succ {
            let direct = general_transition_prob(&g, &s, &next, &pay).unwrap();
            assert!((p - direct).abs() < 1e-15);
        }
    }
}
