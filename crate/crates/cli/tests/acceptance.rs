//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits nonzero if any of them fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;

use anyhow::{bail, ensure, Context, Result};
use voterbudget::validation::{
    check_binomial_collapse, check_budget_monotonicity, check_dp_mc, check_lumping,
    check_normalization, check_solver_equivalence, Check,
};
use voterbudget::{
    action_value, can_extend, complete_transition_prob, initial_allocation_table, reward_curve,
    solve_aggregate, AggregateAction, ModelParams, SimConfig, SolverLimits, VectorModel,
    VectorState,
};

const VALUE_TOLERANCE: f64 = 1e-9;
const MC_SAMPLES: usize = 100_000;
const MC_SEED: u64 = 20240601;

/// Expected first-epoch allocation (pay_ns, pay_s) at budget 30.
const TABLE: [(usize, usize, usize); 6] = [
    (1, 2, 1),
    (2, 2, 2),
    (3, 1, 3),
    (4, 1, 4),
    (5, 0, 5),
    (6, 0, 6),
];

fn reference() -> ModelParams {
    ModelParams::reference()
}

fn limits() -> SolverLimits {
    SolverLimits::default()
}

fn from_check(check: Check) -> Result<String> {
    ensure!(
        check.passed,
        "worst={:e} tol={:e} {}",
        check.worst,
        check.tolerance,
        check.detail
    );
    Ok(format!(
        "worst={:.3e} tol={:.0e} {}",
        check.worst, check.tolerance, check.detail
    ))
}

fn allocation_table() -> Result<String> {
    let params = reference();
    let (values, policy) = solve_aggregate(&params, &limits())?;
    let rows = initial_allocation_table(&policy, &params)?;
    ensure!(
        rows.len() == TABLE.len(),
        "expected {} rows, got {}",
        TABLE.len(),
        rows.len()
    );
    let mut exact = 0;
    let mut notes = Vec::new();
    for (row, &(s, ell, k)) in rows.iter().zip(&TABLE) {
        ensure!(row.state == s, "row order: got state {}", row.state);
        if (row.pay_ns, row.pay_s) == (ell, k) {
            exact += 1;
            continue;
        }
        // a different optimizer is acceptable only if it is worth the same
        let b = params.initial_budget;
        let best = values.get(0, s, b).context("missing cell")?;
        let expected = action_value(&params, values.epoch(1), s, b, AggregateAction::new(ell, k))?;
        ensure!(
            (best - expected).abs() <= VALUE_TOLERANCE,
            "s={s}: chose ({},{}) worth {best}, expected ({ell},{k}) worth {expected}",
            row.pay_ns,
            row.pay_s
        );
        notes.push(format!(
            "s={s} tie ({},{}) vs ({ell},{k})",
            row.pay_ns, row.pay_s
        ));
    }
    Ok(format!(
        "{exact}/6 rows exact{}",
        notes.iter().map(|n| format!("; {n}")).collect::<String>()
    ))
}

fn invest_at_start() -> Result<String> {
    let params = reference();
    let (_, policy) = solve_aggregate(&params, &limits())?;
    let b = params.initial_budget;
    let mut residuals = Vec::new();
    for s in 1..params.n {
        let act = policy.action_at(0, s, b)?;
        let residual = b - act.cost(params.c_ns, params.c_s);
        let mut cheapest = None;
        if act.k < s {
            cheapest = Some(params.c_s);
        }
        if act.ell < params.n - s {
            cheapest = Some(cheapest.map_or(params.c_ns, |c: u64| c.min(params.c_ns)));
        }
        if let Some(c) = cheapest {
            ensure!(
                residual < c,
                "s={s}: residual {residual} affords another payment of {c}"
            );
        }
        ensure!(
            !can_extend(&params, s, b, act),
            "s={s}: action ({},{}) can be extended",
            act.ell,
            act.k
        );
        residuals.push(format!("s={s}:{residual}"));
    }
    Ok(format!("residual budget {}", residuals.join(" ")))
}

fn dp_mc_agreement() -> Result<String> {
    let params = reference();
    let (values, policy) = solve_aggregate(&params, &limits())?;
    let model = VectorModel::complete(&params)?;
    let starts = (0..=params.n)
        .map(|s| Ok((VectorState::new(params.n, (1u64 << s) - 1)?, s)))
        .collect::<voterbudget::Result<Vec<_>>>()?;
    let cfg = SimConfig::new(MC_SAMPLES, MC_SEED)?;
    from_check(check_dp_mc(
        &policy, &values, &params, &model, &starts, &cfg,
    )?)
}

fn solver_equivalence() -> Result<String> {
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        for (horizon, budget) in [(1, 0), (3, 20), (6, 30)] {
            let params = ModelParams::new(n, horizon, 0.8, 10, 5, 8, budget)?;
            let check = check_solver_equivalence(&params, &limits())?;
            ensure!(check.passed, "n={n} T={horizon} B={budget}: {}", check);
            worst = worst.max(check.worst);
            cases += 1;
        }
    }
    Ok(format!(
        "worst={worst:.3e} tol={VALUE_TOLERANCE:.0e} {cases} instances, n=1..5"
    ))
}

fn budget_monotonicity() -> Result<String> {
    let mut notes = Vec::new();
    for params in [reference(), ModelParams::new(5, 4, 0.9, 7, 3, 4, 12)?] {
        let (values, _) = solve_aggregate(&params, &limits())?;
        notes.push(from_check(check_budget_monotonicity(&values))?);
    }
    Ok(notes.join("; "))
}

fn reward_monotonicity() -> Result<String> {
    let params = reference();
    let (_, policy) = solve_aggregate(&params, &limits())?;
    let curve = reward_curve(&policy, &params)?;
    let mut worst: f64 = 0.0;
    for w in curve.windows(2) {
        worst = worst.max(w[0].1 - w[1].1);
    }
    ensure!(worst <= VALUE_TOLERANCE, "largest decrease {worst:e}");
    let points: Vec<String> = curve.iter().map(|(s, r)| format!("{s}:{r:.4}")).collect();
    Ok(format!(
        "largest decrease {worst:.1e}; {}",
        points.join(" ")
    ))
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run_cli(args: &[&str], out: &Path) -> Result<()> {
    let status = Command::new(env!("CARGO_BIN_EXE_voterbudget"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()?;
    if !status.status.success() {
        bail!(
            "{args:?} exited with {}: {}",
            status.status,
            String::from_utf8_lossy(&status.stderr)
        );
    }
    Ok(())
}

fn determinism() -> Result<String> {
    let config = bundled("paper_s3.toml");
    let config = config.to_str().context("non-utf8 path")?;
    let mut compared = Vec::new();
    for (cmd, files) in [
        ("solve", &["values.tsv", "policy.tsv"][..]),
        ("validate", &["validation.txt"][..]),
    ] {
        let first = tempfile::tempdir()?;
        let second = tempfile::tempdir()?;
        run_cli(&[cmd, config], first.path())?;
        run_cli(&[cmd, config], second.path())?;
        for file in files {
            let a = std::fs::read(first.path().join(file))?;
            let b = std::fs::read(second.path().join(file))?;
            ensure!(!a.is_empty(), "{file} is empty");
            ensure!(a == b, "{cmd}: {file} differs between runs");
            compared.push(format!("{file} ({} bytes)", a.len()));
        }
    }
    Ok(format!("identical: {}", compared.join(", ")))
}

type Criterion = (&'static str, fn() -> Result<String>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("allocation-table", allocation_table),
        ("invest-at-start", invest_at_start),
        ("kernel-normalization", || {
            from_check(check_normalization(complete_transition_prob, 12)?)
        }),
        ("binomial-collapse", || {
            from_check(check_binomial_collapse(complete_transition_prob, 12)?)
        }),
        ("brute-force-lumping", || {
            from_check(check_lumping(complete_transition_prob, 8)?)
        }),
        ("dp-mc-agreement", dp_mc_agreement),
        ("solver-equivalence", solver_equivalence),
        ("value-monotone-in-budget", budget_monotonicity),
        ("reward-monotone-in-state", reward_monotonicity),
        ("deterministic-output", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err(anyhow::anyhow!("panicked")));
        match outcome {
            Ok(detail) => println!("PASS  {name}  {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL  {name}  {e:#}");
            }
        }
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
