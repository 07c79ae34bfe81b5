//! Reference computations that check the kernels through independent routes.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{binomial, general_agent_support_prob, VectorTransitionRow};
use crate::state::{AggregateAction, VectorAction, VectorState};

/// Largest population the brute-force enumeration accepts.
pub const MAX_BRUTE_FORCE_AGENTS: usize = 16;

/// Single-binomial form of the fully connected kernel: the `n - ell - k`
/// unpaid agents each become supporters independently with probability
/// `s1 / n`.
pub fn collapsed_transition_prob(n: usize, s1: usize, s2: usize, act: AggregateAction) -> f64 {
    let paid = act.total();
    if s2 < paid || s2 > n || paid > n {
        return 0.0;
    }
    let free = n - paid;
    let q = s1 as f64 / n as f64;
    binomial(free, s2 - paid) * q.powi((s2 - paid) as i32) * (1.0 - q).powi((n - s2) as i32)
}

/// Enumerates every joint outcome of the unpaid agents and multiplies the
/// per-agent probabilities. Zero-probability outcomes are dropped.
pub fn brute_force_transition_row(
    graph: &Graph,
    state: &VectorState,
    act: &VectorAction,
) -> Result<VectorTransitionRow> {
    let n = graph.len();
    if n > MAX_BRUTE_FORCE_AGENTS {
        return Err(Error::TooLarge {
            what: "brute-force population",
            size: n,
            limit: MAX_BRUTE_FORCE_AGENTS,
        });
    }
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
    let mut probs = Vec::with_capacity(n);
    for i in 0..n {
        probs.push(general_agent_support_prob(graph, state, i, act.get(i))?);
    }
    let unpaid: Vec<usize> = (0..n).filter(|&i| !act.get(i)).collect();

    let mut row = VectorTransitionRow::new(n);
    for outcome in 0u64..1 << unpaid.len() {
        let mut next = VectorState::new(n, act.bits())?;
        let mut p = 1.0;
        for (slot, &i) in unpaid.iter().enumerate() {
            let on = outcome >> slot & 1 == 1;
            next.set(i, on);
            p *= if on { probs[i] } else { 1.0 - probs[i] };
        }
        if p > 0.0 {
            row.add(next, p);
        }
    }
    Ok(row)
}
