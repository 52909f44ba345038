//! Command drivers behind the `vascutherm` binary: solve, hss, verify, and
//! sweep, with machine-readable error reporting and stable exit codes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::analysis::{self, MetricsError};
use crate::assembly;
use crate::config::{self, ConfigError, RunConfig};
use crate::io as export;
use crate::model::ThermalProblem;
use crate::solver::{solve_linear, solve_radiative, SolveError, TemperatureField};
use crate::verify::{self, CheckContext, PrincipleReport, Scenario, VerifyError};

/// Exit codes: 0 ok, 1 io, 2 parse, 3 validation, 4 solver, 5 verification
/// failure.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read '{path}': {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write '{path}': {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Parse(ConfigError),
    #[error("geometry construction failed: {0}")]
    Geometry(ConfigError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("verification failed: {}", .failed.join(", "))]
    VerificationFailure { failed: Vec<String> },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => 1,
            CliError::Parse(_) => 2,
            CliError::Geometry(_) | CliError::Validation(_) => 3,
            CliError::Solve(_) | CliError::Metrics(_) | CliError::Verify(_) => 4,
            CliError::VerificationFailure { .. } => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => "io-error",
            CliError::Parse(_) => "parse-error",
            CliError::Geometry(_) | CliError::Validation(_) => "validation-error",
            CliError::Solve(_) | CliError::Metrics(_) | CliError::Verify(_) => "solver-error",
            CliError::VerificationFailure { .. } => "verification-failure",
        }
    }

    /// Machine-readable error document.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}

#[derive(Clone, Debug)]
pub struct OutputOptions {
    pub output_dir: PathBuf,
    pub quiet: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            output_dir: PathBuf::from("."),
            quiet: false,
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    config::parse_config(&text).map_err(CliError::Parse)
}

fn build_validated(config: &RunConfig) -> Result<ThermalProblem, CliError> {
    let problem = config.build_problem().map_err(CliError::Geometry)?;
    problem.validate().map_err(|issues| {
        CliError::Validation(
            issues
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        )
    })?;
    Ok(problem)
}

fn solve_problem(
    problem: &ThermalProblem,
    config: &RunConfig,
    options: &OutputOptions,
) -> Result<TemperatureField, CliError> {
    let peclet = assembly::max_segment_peclet(problem);
    if peclet > 2.0 && !options.quiet {
        eprintln!(
            "warning: largest segment Peclet number is {peclet:.3} (> 2); the unstabilized \
             advective term may oscillate, consider a finer mesh or lower flow rate"
        );
    }
    let field = if problem.radiation_enabled {
        solve_radiative(problem, &config.solver.settings, None)?
    } else {
        solve_linear(problem, &config.solver.settings)?
    };
    Ok(field)
}

fn output_stem(config: &RunConfig, config_path: &Path) -> String {
    config.output_prefix.clone().unwrap_or_else(|| {
        config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string())
    })
}

fn write_output(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| CliError::Write {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(path, content).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// `solve`: run one configuration, write the field CSV, the VTK scalar
/// field, and the metrics JSON.
pub fn run_solve(config_path: &Path, options: &OutputOptions) -> Result<(), CliError> {
    let config = load_config(config_path)?;
    let problem = build_validated(&config)?;
    let field = solve_problem(&problem, &config, options)?;
    let metrics = analysis::metrics_report(&problem, &field)?;

    let stem = output_stem(&config, config_path);
    let dir = &options.output_dir;
    let csv_path = dir.join(format!("{stem}_field.csv"));
    let vtk_path = dir.join(format!("{stem}_field.vtk"));
    let json_path = dir.join(format!("{stem}_metrics.json"));

    write_output(&csv_path, &export::field_csv(&problem.mesh, &field))?;
    write_output(
        &vtk_path,
        &export::mesh_vtk(&problem.mesh, Some(&field), &stem),
    )?;
    let metrics_json = serde_json::to_string_pretty(&metrics).expect("metrics serialize") + "\n";
    write_output(&json_path, &metrics_json)?;

    if !options.quiet {
        println!(
            "solved {} nodes in {} Newton iterations",
            problem.mesh.node_count(),
            field.info.newton_iterations
        );
        println!(
            "theta_mean = {:.4} K, theta_outlet = {:.4} K, energy balance residual = {:.3e}",
            metrics.theta_mean_k, metrics.theta_outlet_k, metrics.energy_balance_residual
        );
        println!("wrote {}", csv_path.display());
        println!("wrote {}", vtk_path.display());
        println!("wrote {}", json_path.display());
    }
    Ok(())
}

/// `hss`: print the no-flow steady-state temperature of the configuration.
pub fn run_hss(config_path: &Path, options: &OutputOptions) -> Result<(), CliError> {
    let config = load_config(config_path)?;
    let problem = build_validated(&config)?;
    let f0 = problem.mean_source();
    let emissivity = if problem.radiation_enabled {
        problem.material.emissivity
    } else {
        0.0
    };
    let theta = analysis::hss_temperature(
        f0,
        problem.material.convective_coefficient,
        emissivity,
        problem.material.stefan_boltzmann,
        problem.loads.ambient_temperature,
    )?;
    let doc = json!({
        "theta_hss_K": theta,
        "mean_source_W_per_m2": f0,
        "theta_ambient_K": problem.loads.ambient_temperature,
        "radiation": problem.radiation_enabled,
    });
    println!("{doc}");
    let _ = options;
    Ok(())
}

/// `verify`: run the principle oracles on one configuration, or the
/// comparison oracle on an ordered pair. Nonzero exit iff an applicable
/// check fails.
pub fn run_verify(
    config_path_a: &Path,
    config_path_b: Option<&Path>,
    checks: &[String],
    options: &OutputOptions,
) -> Result<Vec<PrincipleReport>, CliError> {
    let config_a = load_config(config_path_a)?;
    let problem_a = build_validated(&config_a)?;
    let field_a = solve_problem(&problem_a, &config_a, options)?;

    let pair = match config_path_b {
        Some(path) => {
            let config_b = load_config(path)?;
            let problem_b = build_validated(&config_b)?;
            let field_b = solve_problem(&problem_b, &config_b, options)?;
            Some((problem_b, field_b))
        }
        None => None,
    };

    let settings = &config_a.solver.settings;
    let mut ctx = CheckContext::new(
        Scenario {
            problem: &problem_a,
            field: &field_a,
        },
        settings,
    );
    if let Some((problem_b, field_b)) = &pair {
        ctx.secondary = Some(Scenario {
            problem: problem_b,
            field: field_b,
        });
    }

    // Pair mode defaults to the comparison oracle; single mode runs all.
    let default_names: Vec<String> = if pair.is_some() && checks.is_empty() {
        vec!["comparison".to_string()]
    } else {
        checks.to_vec()
    };
    let reports = verify::run_checks(&ctx, &default_names)?;

    let metrics = analysis::metrics_report(&problem_a, &field_a)?;
    let mut doc = serde_json::to_value(&metrics).expect("metrics serialize");
    doc["verification"] = serde_json::to_value(&reports).expect("reports serialize");
    let stem = output_stem(&config_a, config_path_a);
    let json_path = options.output_dir.join(format!("{stem}_verify.json"));
    write_output(
        &json_path,
        &(serde_json::to_string_pretty(&doc).expect("doc serialize") + "\n"),
    )?;

    if !options.quiet {
        for report in &reports {
            let status = match report.status {
                verify::CheckStatus::Pass => "pass",
                verify::CheckStatus::Fail => "FAIL",
                verify::CheckStatus::NotApplicable => "not-applicable",
            };
            println!("{:<22} {:<14} {}", report.principle, status, report.detail);
        }
        println!("wrote {}", json_path.display());
    }

    let failed: Vec<String> = reports
        .iter()
        .filter(|r| r.failed())
        .map(|r| r.principle.clone())
        .collect();
    if failed.is_empty() {
        Ok(reports)
    } else {
        Err(CliError::VerificationFailure { failed })
    }
}

fn csv_cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// `sweep`: re-solve the configuration across a list of parameter values and
/// tabulate the metrics. Failed rows are marked and the sweep continues.
pub fn run_sweep(
    config_path: &Path,
    parameter: &str,
    values: &[f64],
    options: &OutputOptions,
) -> Result<(), CliError> {
    let base = load_config(config_path)?;
    // Reject unknown parameters before any solve.
    config::apply_sweep_parameter(&base, parameter, 0.0).map_err(CliError::Parse)?;

    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let varied =
            config::apply_sweep_parameter(&base, parameter, value).map_err(CliError::Parse)?;
        let outcome = build_validated(&varied).and_then(|problem| {
            let field = solve_problem(&problem, &varied, options)?;
            let metrics = analysis::metrics_report(&problem, &field)?;
            Ok(metrics)
        });
        rows.push((value, outcome));
    }

    let mut csv = String::from(
        "parameter,value,status,theta_mean_K,theta_outlet_K,theta_hss_K,\
         coefficient_of_performance,cooling_efficiency,max_cooling_efficiency,\
         heating_efficiency,energy_balance_residual,regime,newton_iterations\n",
    );
    for (value, outcome) in &rows {
        match outcome {
            Ok(m) => {
                let regime = match m.regime {
                    Some(analysis::Regime::Cooling) => "cooling",
                    Some(analysis::Regime::Heating) => "heating",
                    None => "",
                };
                csv.push_str(&format!(
                    "{parameter},{value},ok,{},{},{},{},{},{},{},{},{},{}\n",
                    m.theta_mean_k,
                    m.theta_outlet_k,
                    csv_cell(m.theta_hss_k),
                    csv_cell(m.coefficient_of_performance),
                    csv_cell(m.cooling_efficiency),
                    csv_cell(m.max_cooling_efficiency),
                    csv_cell(m.heating_efficiency),
                    m.energy_balance_residual,
                    regime,
                    m.newton_iterations
                ));
            }
            Err(e) => {
                csv.push_str(&format!(
                    "{parameter},{value},failed,,,,,,,,,,\n# {value}: {e}\n"
                ));
            }
        }
    }

    let stem = output_stem(&base, config_path);
    let csv_path = options.output_dir.join(format!("{stem}_sweep.csv"));
    write_output(&csv_path, &csv)?;
    if !options.quiet {
        let ok = rows.iter().filter(|(_, o)| o.is_ok()).count();
        println!(
            "swept {parameter} over {} values ({ok} ok, {} failed)",
            rows.len(),
            rows.len() - ok
        );
        println!("wrote {}", csv_path.display());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_and_kinds() {
        let parse = CliError::Parse(ConfigError::MissingKeys { keys: vec![] });
        assert_eq!(parse.exit_code(), 2);
        assert_eq!(parse.kind(), "parse-error");
        let validation = CliError::Validation("bad".to_string());
        assert_eq!(validation.exit_code(), 3);
        let solve = CliError::Solve(SolveError::RadiationEnabled);
        assert_eq!(solve.exit_code(), 4);
        let failure = CliError::VerificationFailure {
            failed: vec!["comparison".to_string()],
        };
        assert_eq!(failure.exit_code(), 5);
        assert_eq!(failure.kind(), "verification-failure");
        let doc: serde_json::Value = serde_json::from_str(&failure.to_json()).expect("valid json");
        assert_eq!(doc["error"]["exit_code"], 5);
    }
}
