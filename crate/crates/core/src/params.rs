use crate::error::{Error, Result};

/// Scalars describing one problem instance.
///
/// Costs, rewards and budgets are integer currency units so that the set of
/// reachable budget levels stays finite and exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Number of agents.
    pub n: usize,
    /// Number of decision epochs; actions are taken at `t = 0..horizon`.
    pub horizon: usize,
    /// Discount factor in `[0, 1)`.
    pub beta: f64,
    /// Cost of paying a non-supporter to switch.
    pub c_ns: u64,
    /// Cost of paying a supporter to hold.
    pub c_s: u64,
    /// Reward per supporter per epoch.
    pub g: u64,
    pub initial_budget: u64,
}

impl ModelParams {
    /// Builds and validates a parameter set.
    pub fn new(
        n: usize,
        horizon: usize,
        beta: f64,
        c_ns: u64,
        c_s: u64,
        g: u64,
        initial_budget: u64,
    ) -> Result<Self> {
        let params = Self {
            n,
            horizon,
            beta,
            c_ns,
            c_s,
            g,
            initial_budget,
        };
        params.validate()?;
        Ok(params)
    }

    /// The fully connected instance with seven agents used as the reference
    /// experiment: `T = 6`, `beta = 0.8`, `c_ns = 10`, `c_s = 5`, `B = 30`, `g = 8`.
    pub fn reference() -> Self {
        Self {
            n: 7,
            horizon: 6,
            beta: 0.8,
            c_ns: 10,
            c_s: 5,
            g: 8,
            initial_budget: 30,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParams("horizon must be at least 1".into()));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParams(format!(
                "beta must lie in [0, 1), got {}",
                self.beta
            )));
        }
        if self.c_s == 0 {
            return Err(Error::InvalidParams("c_s must be positive".into()));
        }
        if self.c_ns <= self.c_s {
            return Err(Error::InvalidParams(format!(
                "c_ns ({}) must exceed c_s ({})",
                self.c_ns, self.c_s
            )));
        }
        Ok(())
    }

    /// Largest budget that can ever be held: the initial budget plus the
    /// reward of a full network in every epoch.
    pub fn budget_cap(&self) -> u64 {
        self.initial_budget + self.horizon as u64 * self.g * self.n as u64
    }
}
