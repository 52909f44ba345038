//! Solution drivers: a direct sparse solve for the convection-only model and
//! a damped Newton iteration for the radiative model.
//!
//! Both drivers are deterministic: assembly order, factorization, and the
//! Newton line search are fixed, so identical inputs produce bit-identical
//! fields.

pub mod backend;
mod banded;
mod dense;

use thiserror::Error;

use crate::assembly::{self, AssemblyError, ConstraintMap};
use crate::model::{ThermalProblem, ValidationIssue};

pub use backend::{
    backend_by_name, backend_names, backends, BackendError, LinearSolverBackend, DEFAULT_BACKEND,
};

/// Tolerances and caps for the linear and Newton drivers.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveSettings {
    /// Relative algebraic residual required of a linear solve.
    pub linear_tolerance: f64,
    /// Relative sup-norm of the Newton update at convergence.
    pub newton_tolerance: f64,
    pub max_newton_iterations: usize,
    /// Step-halving budget of the Newton line search.
    pub max_step_halvings: usize,
    /// Registry name of the linear backend.
    pub linear_backend: String,
    /// Keep every Newton iterate in the solve metadata (diagnostics only).
    pub record_iterates: bool,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings {
            linear_tolerance: 1e-10,
            newton_tolerance: 1e-10,
            max_newton_iterations: 50,
            max_step_halvings: 20,
            linear_backend: DEFAULT_BACKEND.to_string(),
            record_iterates: false,
        }
    }
}

impl SolveSettings {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.linear_tolerance > 0.0 && self.linear_tolerance < 1.0) {
            return Err(SolveError::Settings(format!(
                "linear tolerance must lie in (0, 1), got {}",
                self.linear_tolerance
            )));
        }
        if !(self.newton_tolerance > 0.0 && self.newton_tolerance < 1.0) {
            return Err(SolveError::Settings(format!(
                "newton tolerance must lie in (0, 1), got {}",
                self.newton_tolerance
            )));
        }
        if self.max_newton_iterations == 0 || self.max_step_halvings == 0 {
            return Err(SolveError::Settings(
                "iteration caps must be at least 1".to_string(),
            ));
        }
        if backend_by_name(&self.linear_backend).is_none() {
            return Err(SolveError::UnknownBackend {
                requested: self.linear_backend.clone(),
                known: backend_names().join(", "),
            });
        }
        Ok(())
    }
}

/// Convergence metadata attached to a solved field.
#[derive(Clone, Debug, Default)]
pub struct SolveInfo {
    /// Newton iterations performed (0 for a plain linear solve).
    pub newton_iterations: usize,
    /// Relative algebraic residual of the last linear solve.
    pub linear_residual: f64,
    /// Sup-norm of the free-node model residual per Newton iteration.
    pub residual_history: Vec<f64>,
    /// Full iterates, populated only when `record_iterates` is set.
    pub iterate_history: Vec<Vec<f64>>,
}

/// Nodal temperatures bound to the mesh of the problem they solve.
#[derive(Clone, Debug)]
pub struct TemperatureField {
    /// One temperature in Kelvin per mesh node.
    pub values: Vec<f64>,
    pub info: SolveInfo,
}

impl TemperatureField {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("problem failed validation: {}", format_issues(.0))]
    Invalid(Vec<ValidationIssue>),
    #[error("invalid solver settings: {0}")]
    Settings(String),
    #[error("unknown linear backend '{requested}', known backends: {known}")]
    UnknownBackend { requested: String, known: String },
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("singular system: {cause}")]
    Singular { cause: String },
    #[error("linear solve residual {achieved:.3e} exceeds tolerance {required:.3e}")]
    ResidualCheck { achieved: f64, required: f64 },
    #[error("radiation is enabled on this problem; use solve_radiative")]
    RadiationEnabled,
    #[error("radiation is disabled on this problem; use solve_linear")]
    RadiationDisabled,
    #[error(
        "Newton did not converge within {iterations} iterations; residual history: {history:?}"
    )]
    NoConvergence {
        iterations: usize,
        history: Vec<f64>,
    },
    #[error("Newton produced an iterate with negative temperatures at iteration {iteration} even after full damping")]
    NonphysicalIterate { iteration: usize },
    #[error("invalid initial guess: {0}")]
    InvalidGuess(String),
    #[error("solution contains non-finite values")]
    NonFinite,
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diagnose_singular(
    problem: &ThermalProblem,
    constraints: &ConstraintMap,
    err: BackendError,
) -> SolveError {
    if constraints.fixed.is_empty() && problem.material.convective_coefficient == 0.0 {
        return SolveError::Singular {
            cause: "pure Neumann nullspace: every boundary edge carries flux data, the \
                    convective coefficient is zero, and no flow constrains the inlet, so the \
                    temperature is determined only up to an additive constant"
                .to_string(),
        };
    }
    SolveError::Singular {
        cause: err.to_string(),
    }
}

/// Solves the convection-only (linear) model with a direct factorization.
///
/// Prescribed-temperature and inlet nodes carry exactly their prescribed
/// values in the returned field; the free unknowns satisfy the reduced system
/// to the configured relative residual.
pub fn solve_linear(
    problem: &ThermalProblem,
    settings: &SolveSettings,
) -> Result<TemperatureField, SolveError> {
    settings.validate()?;
    problem.validate().map_err(SolveError::Invalid)?;
    if problem.radiation_enabled {
        return Err(SolveError::RadiationEnabled);
    }
    let backend = backend_by_name(&settings.linear_backend).expect("validated above");

    let system = assembly::assemble(problem, None)?;
    let x = match backend.solve(&system.matrix, &system.rhs) {
        Ok(x) => x,
        Err(e @ BackendError::Singular { .. }) => {
            return Err(diagnose_singular(problem, &system.constraints, e))
        }
        Err(e) => {
            return Err(SolveError::Singular {
                cause: e.to_string(),
            })
        }
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFinite);
    }

    let mut r = system.matrix.matvec(&x);
    for (ri, bi) in r.iter_mut().zip(&system.rhs) {
        *ri -= bi;
    }
    let denom = two_norm(&system.rhs).max(f64::MIN_POSITIVE);
    let relative = two_norm(&r) / denom;
    if relative > settings.linear_tolerance {
        return Err(SolveError::ResidualCheck {
            achieved: relative,
            required: settings.linear_tolerance,
        });
    }

    Ok(TemperatureField {
        values: system.constraints.scatter(&x),
        info: SolveInfo {
            newton_iterations: 0,
            linear_residual: relative,
            residual_history: Vec::new(),
            iterate_history: Vec::new(),
        },
    })
}

/// Sup-norm of the model residual over free nodes.
fn free_residual_sup(
    problem: &ThermalProblem,
    constraints: &ConstraintMap,
    theta: &[f64],
) -> Result<f64, SolveError> {
    let residual = assembly::full_residual(problem, theta)?;
    Ok(constraints
        .free_to_node
        .iter()
        .fold(0.0f64, |acc, &node| acc.max(residual[node].abs())))
}

/// Solves the radiative (semi-linear) model with damped Newton iterations.
///
/// The default initial guess is the linear solve of the same problem with
/// radiation switched off, clamped to non-negative values; Newton steps are
/// halved until the iterate stays non-negative and the residual does not
/// grow. Converged fields are non-negative everywhere.
pub fn solve_radiative(
    problem: &ThermalProblem,
    settings: &SolveSettings,
    initial_guess: Option<&[f64]>,
) -> Result<TemperatureField, SolveError> {
    settings.validate()?;
    problem.validate().map_err(SolveError::Invalid)?;
    if !problem.radiation_enabled {
        return Err(SolveError::RadiationDisabled);
    }
    let backend = backend_by_name(&settings.linear_backend).expect("validated above");
    let n = problem.mesh.node_count();

    let mut theta = match initial_guess {
        Some(guess) => {
            if guess.len() != n {
                return Err(SolveError::InvalidGuess(format!(
                    "guess has {} entries for {} mesh nodes",
                    guess.len(),
                    n
                )));
            }
            if let Some(v) = guess.iter().find(|v| **v < 0.0 || !v.is_finite()) {
                return Err(SolveError::InvalidGuess(format!(
                    "guess contains the non-physical value {v}; radiative solves require \
                     non-negative finite temperatures"
                )));
            }
            guess.to_vec()
        }
        None => {
            let mut convective = problem.clone();
            convective.radiation_enabled = false;
            let field = solve_linear(&convective, settings)?;
            field.values.iter().map(|v| v.max(0.0)).collect()
        }
    };

    let constraints = newton_constraints(problem)?;
    for (&node, &value) in constraints.map.fixed.iter() {
        theta[node] = value;
    }

    let mut info = SolveInfo::default();
    if settings.record_iterates {
        info.iterate_history.push(theta.clone());
    }

    for iteration in 1..=settings.max_newton_iterations {
        let system = assembly::assemble(problem, Some(&theta))?;
        let residual_sup = sup_norm(&system.rhs);
        info.residual_history.push(residual_sup);

        let delta = match backend.solve(&system.matrix, &system.rhs) {
            Ok(d) => d,
            Err(e @ BackendError::Singular { .. }) => {
                return Err(diagnose_singular(problem, &system.constraints, e))
            }
            Err(e) => {
                return Err(SolveError::Singular {
                    cause: e.to_string(),
                })
            }
        };
        if delta.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFinite);
        }

        // Line search: halve until the iterate is non-negative and the
        // residual does not grow; the last admissible step is taken even if
        // the residual stalls, leaving divergence to the iteration cap.
        let mut accepted: Option<Vec<f64>> = None;
        let mut step = 1.0f64;
        for halving in 0..=settings.max_step_halvings {
            let trial: Vec<f64> = theta
                .iter()
                .zip(constraints.free_mask.iter())
                .enumerate()
                .map(|(node, (&t, &free))| {
                    if free {
                        let f = constraints.node_to_free_idx[node];
                        t + step * delta[f]
                    } else {
                        t
                    }
                })
                .collect();
            if trial.iter().all(|&v| v >= 0.0) {
                let trial_residual = free_residual_sup(problem, &constraints.map, &trial)?;
                if trial_residual <= residual_sup || halving == settings.max_step_halvings {
                    accepted = Some(trial);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            return Err(SolveError::NonphysicalIterate { iteration });
        };

        theta = next;
        info.newton_iterations = iteration;
        if settings.record_iterates {
            info.iterate_history.push(theta.clone());
        }

        let update = sup_norm(&delta) * step / sup_norm(&theta).max(f64::MIN_POSITIVE);
        if update <= settings.newton_tolerance {
            if theta.iter().any(|v| !v.is_finite()) {
                return Err(SolveError::NonFinite);
            }
            info.linear_residual = free_residual_sup(problem, &constraints.map, &theta)?;
            return Ok(TemperatureField {
                values: theta,
                info,
            });
        }
    }

    Err(SolveError::NoConvergence {
        iterations: settings.max_newton_iterations,
        history: info.residual_history,
    })
}

/// Constraint map plus flat lookups used by the Newton update loop.
struct NewtonConstraints {
    map: ConstraintMap,
    free_mask: Vec<bool>,
    node_to_free_idx: Vec<usize>,
}

fn newton_constraints(problem: &ThermalProblem) -> Result<NewtonConstraints, SolveError> {
    let fixed = assembly::constrained_nodes(problem)?;
    let n = problem.mesh.node_count();
    let mut free_mask = vec![true; n];
    for &node in fixed.keys() {
        free_mask[node] = false;
    }
    let mut node_to_free_idx = vec![usize::MAX; n];
    let mut node_to_free = vec![None; n];
    let mut free_to_node = Vec::new();
    for node in 0..n {
        if free_mask[node] {
            node_to_free_idx[node] = free_to_node.len();
            node_to_free[node] = Some(free_to_node.len());
            free_to_node.push(node);
        }
    }
    Ok(NewtonConstraints {
        map: ConstraintMap {
            fixed,
            free_to_node,
            node_to_free,
        },
        free_mask,
        node_to_free_idx,
    })
}
