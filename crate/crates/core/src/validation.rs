//! Self-checks that compare each computation against an independent route.
//!
//! Every check reports its worst observed deviation next to the tolerance it
//! was held to, so a report reads the same whether it passes or fails.

use std::fmt;

use crate::action::actions_by_cost;
use crate::error::Result;
use crate::graph::Graph;
use crate::kernel::{complete_transition_row, general_transition_prob};
use crate::oracle::{brute_force_transition_row, collapsed_transition_prob};
use crate::params::ModelParams;
use crate::report::reward_curve;
use crate::sim::{empirical_transition_row, estimate_value, ControlPolicy, SimConfig};
use crate::solver::{
    solve_aggregate, solve_vector, CostVector, SolverLimits, ValueTable, VectorModel,
};
use crate::state::{AggregateAction, VectorAction, VectorState};

/// Exact-arithmetic comparisons of kernel probabilities.
pub const KERNEL_TOLERANCE: f64 = 1e-12;
/// Comparisons between the two exact solvers.
pub const SOLVER_TOLERANCE: f64 = 1e-9;
/// Width of Monte Carlo acceptance bands, in standard errors.
pub const MC_SIGMAS: f64 = 3.0;
/// Share of empirical cells that must land inside their band.
pub const MC_CELL_COVERAGE: f64 = 0.99;
/// Largest `n` in the aggregate kernel sweeps.
pub const KERNEL_SWEEP_MAX_N: usize = 12;
/// Largest `n` in the vector-to-aggregate lumping sweep.
pub const LUMPING_MAX_N: usize = 8;
/// Largest `n` for which the solver equivalence check runs.
pub const EQUIVALENCE_MAX_N: usize = 5;
/// Samples per empirical transition row.
pub const EMPIRICAL_ROW_SAMPLES: usize = 20_000;

/// Signature of an aggregate kernel `(n, s1, s2, action) -> probability`.
pub type AggregateKernel = fn(usize, usize, usize, AggregateAction) -> Result<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn within(name: &'static str, worst: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\tworst={:.3e}\ttol={:.3e}\t{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        writeln!(
            f,
            "{} checks, {} failed: {}",
            self.checks.len(),
            failed,
            if failed == 0 { "PASS" } else { "FAIL" }
        )
    }
}

/// Calls `f(n, s1, action)` for every `n <= max_n`, state and fitting action.
fn sweep(
    max_n: usize,
    mut f: impl FnMut(usize, usize, AggregateAction) -> Result<()>,
) -> Result<usize> {
    let mut rows = 0;
    for n in 1..=max_n {
        // Only n matters for the action set; costs just fix an order.
        let params = ModelParams::new(n, 1, 0.0, 2, 1, 0, 0)?;
        for s1 in 0..=n {
            for act in actions_by_cost(&params, s1) {
                f(n, s1, act)?;
                rows += 1;
            }
        }
    }
    Ok(rows)
}

/// Rows of the aggregate kernel sum to one.
pub fn check_normalization(kernel: AggregateKernel, max_n: usize) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let rows = sweep(max_n, |n, s1, act| {
        let mut total = 0.0;
        for s2 in 0..=n {
            total += kernel(n, s1, s2, act)?;
        }
        worst = worst.max((total - 1.0).abs());
        Ok(())
    })?;
    Ok(Check::within(
        "kernel-normalization",
        worst,
        KERNEL_TOLERANCE,
        format!("n=1..{max_n}, {rows} rows"),
    ))
}

/// The aggregate kernel matches the single-binomial closed form, and is
/// exactly zero below the paid count.
pub fn check_binomial_collapse(kernel: AggregateKernel, max_n: usize) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let rows = sweep(max_n, |n, s1, act| {
        for s2 in 0..=n {
            let p = kernel(n, s1, s2, act)?;
            if s2 < act.total() && p != 0.0 {
                worst = f64::INFINITY;
            }
            worst = worst.max((p - collapsed_transition_prob(n, s1, s2, act)).abs());
        }
        Ok(())
    })?;
    Ok(Check::within(
        "binomial-collapse",
        worst,
        KERNEL_TOLERANCE,
        format!("n=1..{max_n}, {rows} rows"),
    ))
}

/// On the complete graph with self-loops, the brute-force vector kernel
/// aggregated by supporter count reproduces the aggregate kernel.
pub fn check_lumping(kernel: AggregateKernel, max_n: usize) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    for n in 1..=max_n {
        let graph = Graph::complete_with_self_loops(n);
        for sb in 0..1u64 << n {
            let state = VectorState::new(n, sb)?;
            for pb in 0..1u64 << n {
                let pay = VectorAction::new(n, pb)?;
                let lumped = brute_force_transition_row(&graph, &state, &pay)?.lump();
                let act = pay.split(&state);
                for s2 in 0..=n {
                    let p = kernel(n, state.count_ones(), s2, act)?;
                    worst = worst.max((lumped.get(s2) - p).abs());
                }
                pairs += 1;
            }
        }
    }
    Ok(Check::within(
        "vector-lumping",
        worst,
        KERNEL_TOLERANCE,
        format!("n=1..{max_n}, {pairs} state/action pairs"),
    ))
}

/// Brute-force rows on `graph` sum to one and agree entrywise with the
/// product-form probability.
pub fn check_vector_kernel(graph: &Graph) -> Result<Check> {
    let n = graph.len();
    let total_states = 1u64 << n;
    let stride = (total_states / 256).max(1);
    let mut worst: f64 = 0.0;
    let mut rows = 0usize;
    for sb in (0..total_states).step_by(stride as usize) {
        let state = VectorState::new(n, sb)?;
        let mut actions = vec![VectorAction::zeros(n), VectorAction::ones(n)];
        actions.extend((0..n).map(|i| VectorAction::new(n, 1 << i).expect("in range")));
        for pay in actions {
            let row = brute_force_transition_row(graph, &state, &pay)?;
            worst = worst.max((row.total() - 1.0).abs());
            for (next, p) in row.iter() {
                let direct = general_transition_prob(graph, &state, next, &pay)?;
                worst = worst.max((p - direct).abs());
            }
            rows += 1;
        }
    }
    Ok(Check::within(
        "vector-kernel",
        worst,
        KERNEL_TOLERANCE,
        format!("n={n}, {rows} rows"),
    ))
}

/// Empirical one-step frequencies fall inside 3-sigma binomial bands for at
/// least 99% of cells.
pub fn check_empirical_rows(params: &ModelParams, cfg: &SimConfig) -> Result<Check> {
    let n = params.n;
    let graph = Graph::complete_with_self_loops(n);
    let samples = cfg.num_samples.clamp(1000, EMPIRICAL_ROW_SAMPLES);
    let mut cells = 0usize;
    let mut inside = 0usize;
    let mut worst: f64 = 0.0;
    let mut row_index = 0u64;
    for s1 in 0..=n {
        for act in [(0, 0), (1, 0), (0, 1), (1, 1)].map(|(l, k)| AggregateAction::new(l, k)) {
            if !act.fits(n, s1) {
                continue;
            }
            let exact = complete_transition_row(n, s1, act)?;
            let state = VectorState::new(n, (1u64 << s1) - 1)?;
            let pay = crate::sim::lift_action(&state, act)?;
            let seed = cfg
                .seed
                .wrapping_add(row_index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            row_index += 1;
            let empirical =
                empirical_transition_row(&graph, &state, &pay, &SimConfig::new(samples, seed)?)?
                    .lump();
            for s2 in 0..=n {
                let p = exact.get(s2);
                let band = MC_SIGMAS * (p * (1.0 - p) / samples as f64).sqrt();
                let dev = (empirical.get(s2) - p).abs();
                cells += 1;
                if dev <= band {
                    inside += 1;
                }
                if band > 0.0 {
                    worst = worst.max(dev / band * MC_SIGMAS);
                } else if dev > 0.0 {
                    worst = f64::INFINITY;
                }
            }
        }
    }
    let coverage = inside as f64 / cells as f64;
    Ok(Check {
        name: "empirical-rows",
        passed: coverage >= MC_CELL_COVERAGE,
        worst,
        tolerance: MC_SIGMAS,
        detail: format!("{inside}/{cells} cells inside band, {samples} samples per row"),
    })
}

/// Values never decrease as the budget grows at fixed epoch and state.
pub fn check_budget_monotonicity(values: &ValueTable) -> Check {
    let mut worst: f64 = 0.0;
    for t in 0..values.epochs() {
        let epoch = values.epoch(t);
        let width = epoch.grid.len();
        for s in 0..values.num_states() {
            let row = &epoch.values[s * width..(s + 1) * width];
            for w in row.windows(2) {
                worst = worst.max(w[0] - w[1]);
            }
        }
    }
    Check::within(
        "budget-monotonicity",
        worst,
        0.0,
        format!("{} cells", values.cells()),
    )
}

/// `r(s) <= v_t(s, b) <= sum_{u=t}^{T} beta^(u-t) * max_reward`.
pub fn check_value_bounds(
    values: &ValueTable,
    params: &ModelParams,
    reward: impl Fn(usize) -> u64,
    max_reward: u64,
) -> Check {
    let horizon = values.epochs() - 1;
    let mut worst: f64 = 0.0;
    for (t, s, _, v) in values.iter() {
        let ceiling: f64 = (0..=horizon - t)
            .map(|u| params.beta.powi(u as i32) * max_reward as f64)
            .sum();
        let floor = reward(s) as f64;
        worst = worst
            .max(floor - v)
            .max(v - ceiling * (1.0 + KERNEL_TOLERANCE));
    }
    Check::within(
        "value-bounds",
        worst,
        KERNEL_TOLERANCE,
        format!("{} cells", values.cells()),
    )
}

/// Monte Carlo mean of each start state lies within 3 standard errors of
/// the solved value.
pub fn check_dp_mc<P>(
    policy: &P,
    values: &ValueTable,
    params: &ModelParams,
    model: &VectorModel,
    starts: &[(VectorState, usize)],
    cfg: &SimConfig,
) -> Result<Check>
where
    P: ControlPolicy + Sync + ?Sized,
{
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    let aggregate = values.num_states() == params.n + 1;
    for (i, (state, index)) in starts.iter().enumerate() {
        let exact = values
            .get(0, *index, params.initial_budget)
            .unwrap_or(f64::NAN);
        let run = SimConfig::new(cfg.num_samples, cfg.seed.wrapping_add(i as u64))?;
        let est = estimate_value(policy, state, params, model, &run)?;
        let diff = (est.mean - exact).abs();
        let z = if est.std_error > 0.0 {
            diff / est.std_error
        } else if diff <= SOLVER_TOLERANCE {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(if z.is_nan() { f64::INFINITY } else { z });
        if aggregate {
            notes.push(format!("s={index}:{z:.2}"));
        } else {
            notes.push(format!("{state}:{z:.2}"));
        }
    }
    Ok(Check::within(
        "dp-mc-agreement",
        worst,
        MC_SIGMAS,
        format!(
            "{} rollouts per state; z by state {}",
            cfg.num_samples,
            notes.join(" ")
        ),
    ))
}

/// Expected terminal reward never decreases with the initial supporter count,
/// up to rounding: neighboring entries are often equal in exact arithmetic.
pub fn check_reward_curve(curve: &[(usize, f64)]) -> Check {
    let worst = curve
        .windows(2)
        .map(|w| w[0].1 - w[1].1)
        .fold(0.0, f64::max);
    Check::within(
        "reward-curve-monotonicity",
        worst,
        SOLVER_TOLERANCE,
        format!("{} states", curve.len()),
    )
}

/// Vector and aggregate solutions agree on the complete graph with
/// self-loops under label-dependent costs.
pub fn check_solver_equivalence(params: &ModelParams, limits: &SolverLimits) -> Result<Check> {
    let model = VectorModel::complete(params)?;
    let (agg, _) = solve_aggregate(params, limits)?;
    let (vec, _) = solve_vector(params, &model, limits)?;
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for (t, bits, b, v) in vec.iter() {
        let s = (bits as u64).count_ones() as usize;
        match agg.get(t, s, b) {
            Some(a) => {
                worst = worst.max((a - v).abs());
                compared += 1;
            }
            None => worst = f64::INFINITY,
        }
    }
    Ok(Check::within(
        "solver-equivalence",
        worst,
        SOLVER_TOLERANCE,
        format!("n={}, {compared} cells", params.n),
    ))
}

fn kernel_checks(kernel: AggregateKernel) -> Result<Vec<Check>> {
    Ok(vec![
        check_normalization(kernel, KERNEL_SWEEP_MAX_N)?,
        check_binomial_collapse(kernel, KERNEL_SWEEP_MAX_N)?,
        check_lumping(kernel, LUMPING_MAX_N)?,
    ])
}

/// Full suite for a fully connected instance.
pub fn validate_aggregate(
    params: &ModelParams,
    sim: &SimConfig,
    limits: &SolverLimits,
    kernel: AggregateKernel,
) -> Result<ValidationReport> {
    let mut checks = kernel_checks(kernel)?;
    checks.push(check_empirical_rows(params, sim)?);

    let (values, policy) = solve_aggregate(params, limits)?;
    checks.push(check_budget_monotonicity(&values));
    checks.push(check_value_bounds(
        &values,
        params,
        |s| s as u64 * params.g,
        params.n as u64 * params.g,
    ));
    let model = VectorModel::complete(params)?;
    let starts: Vec<_> = (0..=params.n)
        .map(|s| Ok((VectorState::new(params.n, (1u64 << s) - 1)?, s)))
        .collect::<Result<_>>()?;
    checks.push(check_dp_mc(&policy, &values, params, &model, &starts, sim)?);
    checks.push(check_reward_curve(&reward_curve(&policy, params)?));
    if params.n <= EQUIVALENCE_MAX_N {
        checks.push(check_solver_equivalence(params, limits)?);
    }
    Ok(ValidationReport { checks })
}

/// Full suite for a network instance.
pub fn validate_vector(
    params: &ModelParams,
    model: &VectorModel,
    sim: &SimConfig,
    limits: &SolverLimits,
    kernel: AggregateKernel,
) -> Result<ValidationReport> {
    let mut checks = kernel_checks(kernel)?;
    checks.push(check_vector_kernel(model.graph())?);

    let (values, policy) = solve_vector(params, model, limits)?;
    checks.push(check_budget_monotonicity(&values));
    let n = params.n;
    checks.push(check_value_bounds(
        &values,
        params,
        |bits| {
            let state = VectorState::new(n, bits as u64).expect("index within 2^n");
            model.reward(&state)
        },
        model.rewards().iter().sum(),
    ));
    let total = 1u64 << n;
    let stride = (total / 8).max(1);
    let mut starts: Vec<(VectorState, usize)> = (0..total)
        .step_by(stride as usize)
        .map(|b| Ok((VectorState::new(n, b)?, b as usize)))
        .collect::<Result<_>>()?;
    if starts.last().map(|s| s.1 as u64) != Some(total - 1) {
        starts.push((VectorState::ones(n), (total - 1) as usize));
    }
    checks.push(check_dp_mc(&policy, &values, params, model, &starts, sim)?);

    let uniform = matches!(model.costs(), CostVector::ByLabel { c_ns, c_s } if *c_ns == params.c_ns && *c_s == params.c_s)
        && model.rewards().iter().all(|&g| g == params.g);
    if model.graph().is_complete_with_self_loops() && uniform && n <= EQUIVALENCE_MAX_N {
        checks.push(check_solver_equivalence(params, limits)?);
    }
    Ok(ValidationReport { checks })
}
