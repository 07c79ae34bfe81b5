use crate::params::ModelParams;
use crate::state::AggregateAction;

/// Every payment split `(ell, k)` affordable with `budget` in state `s`,
/// ordered by ascending cost and then ascending `ell`.
pub fn feasible_actions(params: &ModelParams, s: usize, budget: u64) -> Vec<AggregateAction> {
    let mut out = actions_by_cost(params, s);
    out.retain(|a| a.cost(params.c_ns, params.c_s) <= budget);
    out
}

/// All actions that fit state `s`, in the canonical order. Affordable
/// actions at any budget form a prefix of this list.
pub fn actions_by_cost(params: &ModelParams, s: usize) -> Vec<AggregateAction> {
    if s > params.n {
        return Vec::new();
    }
    let mut out: Vec<_> = (0..=s)
        .flat_map(|k| (0..=params.n - s).map(move |ell| AggregateAction { ell, k }))
        .collect();
    out.sort_by_key(|a| (a.cost(params.c_ns, params.c_s), a.ell));
    out
}

/// Whether some strictly larger payment set (adding at least one payee to
/// `act`) still fits state `s` and `budget`.
pub fn can_extend(params: &ModelParams, s: usize, budget: u64, act: AggregateAction) -> bool {
    let spent = act.cost(params.c_ns, params.c_s);
    if spent > budget {
        return false;
    }
    let residual = budget - spent;
    let more_ns = act.ell < params.n - s && params.c_ns <= residual;
    let more_s = act.k < s && params.c_s <= residual;
    more_ns || more_s
}
