use std::fs;
use std::path::Path;
use std::time::Instant;

use thiserror::Error;
use voterbudget::validation::{
    validate_aggregate, validate_vector, AggregateKernel, ValidationReport,
};
use voterbudget::{
    complete_transition_prob, initial_allocation_table, reward_curve, solve_aggregate,
    solve_vector, AllocationRow, Error as ModelError, VectorAction, VectorState,
};

use crate::config::{ConfigError, ModelKind, RunConfig};
use crate::output;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("resource guard: {0}")]
    ResourceGuard(ModelError),
    #[error("model error: {0}")]
    Model(ModelError),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::TooLarge { .. } => CliError::ResourceGuard(e),
            other => CliError::Model(other),
        }
    }
}

impl CliError {
    /// Process exit status: 1 internal/io, 3 config, 4 resource guard,
    /// 5 validation failure. Usage errors exit with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::ResourceGuard(_) => 4,
            CliError::ValidationFailed(_) => 5,
            CliError::Model(_) | CliError::Io { .. } => 1,
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let io = |source, path: &Path| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io(e, &path))
}

/// Output of `solve`: rendered files plus a human summary.
#[derive(Debug, Clone)]
pub struct SolveArtifacts {
    pub values_tsv: String,
    pub policy_tsv: String,
    pub summary: String,
}

pub fn cmd_solve(config: &RunConfig, out_dir: &Path) -> Result<SolveArtifacts, CliError> {
    let params = config.model_params()?;
    let limits = config.limits();
    let started = Instant::now();
    let (values_tsv, policy_tsv, states, cells) = match config.model {
        ModelKind::Aggregate => {
            let (values, policy) = solve_aggregate(&params, &limits)?;
            (
                output::values_tsv(&values, |s| s.to_string()),
                output::aggregate_policy_tsv(&policy),
                values.num_states(),
                values.cells(),
            )
        }
        ModelKind::Vector => {
            let model = config.vector_model()?;
            let (values, policy) = solve_vector(&params, &model, &limits)?;
            let n = params.n;
            (
                output::values_tsv(&values, |s| {
                    VectorState::new(n, s as u64)
                        .expect("index within 2^n")
                        .to_string()
                }),
                output::vector_policy_tsv(&policy, n),
                values.num_states(),
                values.cells(),
            )
        }
    };
    let elapsed = started.elapsed();
    write_file(out_dir, "values.tsv", &values_tsv)?;
    write_file(out_dir, "policy.tsv", &policy_tsv)?;
    let summary = format!(
        "solved {:?} model: {states} states, {} epochs, {cells} (epoch, state, budget) cells in {:.3} s\nwrote {}/values.tsv and {}/policy.tsv\n",
        config.model,
        params.horizon + 1,
        elapsed.as_secs_f64(),
        out_dir.display(),
        out_dir.display()
    );
    Ok(SolveArtifacts {
        values_tsv,
        policy_tsv,
        summary,
    })
}

/// First-epoch allocations at the initial budget for every mixed state.
pub fn allocation_rows(config: &RunConfig) -> Result<Vec<AllocationRow>, CliError> {
    let params = config.model_params()?;
    let (_, policy) = solve_aggregate(&params, &config.limits())?;
    Ok(initial_allocation_table(&policy, &params)?)
}

pub fn cmd_table(config: &RunConfig, out_dir: &Path) -> Result<String, CliError> {
    let text = match config.model {
        ModelKind::Aggregate => output::allocation_tsv(&allocation_rows(config)?),
        ModelKind::Vector => {
            let params = config.model_params()?;
            let model = config.vector_model()?;
            let (_, policy) = solve_vector(&params, &model, &config.limits())?;
            let n = params.n;
            let full = (1u64 << n) - 1;
            let rows = (1..full)
                .map(|bits| {
                    let state = VectorState::new(n, bits)?;
                    Ok((state, policy.action_for(0, &state, params.initial_budget)?))
                })
                .collect::<Result<Vec<(VectorState, VectorAction)>, ModelError>>()?;
            output::vector_allocation_tsv(&rows)
        }
    };
    write_file(out_dir, "table.tsv", &text)?;
    Ok(text)
}

pub fn cmd_reward_curve(config: &RunConfig, out_dir: &Path) -> Result<String, CliError> {
    if config.model != ModelKind::Aggregate {
        return Err(ConfigError::Invalid(
            "reward-curve is defined for the aggregate model only".into(),
        )
        .into());
    }
    let params = config.model_params()?;
    let (_, policy) = solve_aggregate(&params, &config.limits())?;
    let csv = output::reward_curve_csv(&reward_curve(&policy, &params)?);
    write_file(out_dir, "reward_curve.csv", &csv)?;
    Ok(csv)
}

/// Runs the validation suite with a caller-supplied aggregate kernel.
pub fn validation_report(
    config: &RunConfig,
    kernel: AggregateKernel,
) -> Result<ValidationReport, CliError> {
    let params = config.model_params()?;
    let sim = config.sim_config()?;
    let limits = config.limits();
    let report = match config.model {
        ModelKind::Aggregate => validate_aggregate(&params, &sim, &limits, kernel)?,
        ModelKind::Vector => {
            validate_vector(&params, &config.vector_model()?, &sim, &limits, kernel)?
        }
    };
    Ok(report)
}

/// Writes `validation.txt` and returns the report text. A failing suite is
/// reported as [`CliError::ValidationFailed`] after the file is written.
pub fn cmd_validate_with(
    config: &RunConfig,
    out_dir: &Path,
    kernel: AggregateKernel,
) -> Result<String, CliError> {
    let report = validation_report(config, kernel)?;
    let text = report.to_string();
    write_file(out_dir, "validation.txt", &text)?;
    if !report.passed() {
        let names: Vec<_> = report.failures().map(|c| c.name).collect();
        return Err(CliError::ValidationFailed(format!(
            "{}\nfailed checks: {}",
            text.trim_end(),
            names.join(", ")
        )));
    }
    Ok(text)
}

pub fn cmd_validate(config: &RunConfig, out_dir: &Path) -> Result<String, CliError> {
    cmd_validate_with(config, out_dir, complete_transition_prob)
}
