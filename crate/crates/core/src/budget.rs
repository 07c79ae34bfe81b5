use crate::error::{Error, Result};

/// Next-epoch budget: spend `cost`, collect `reward`, clamp at `cap`.
///
/// Clamping is value-neutral when `cap` is at least the initial budget plus
/// the largest reward obtainable over the horizon, since no policy can spend
/// more than that.
pub fn budget_next(budget: u64, reward: u64, cost: u64, cap: u64) -> Result<u64> {
    if cost > budget {
        return Err(Error::Overspend { cost, budget });
    }
    Ok((budget - cost + reward).min(cap))
}

/// Sorted set of budget levels reachable at one epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetGrid {
    levels: Vec<u64>,
    cap: u64,
}

impl BudgetGrid {
    pub fn new(mut levels: Vec<u64>, cap: u64) -> Self {
        levels.sort_unstable();
        levels.dedup();
        debug_assert!(levels.last().is_none_or(|&b| b <= cap));
        Self { levels, cap }
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn index_of(&self, budget: u64) -> Option<usize> {
        self.levels.binary_search(&budget).ok()
    }

    pub fn contains(&self, budget: u64) -> bool {
        self.index_of(budget).is_some()
    }
}
