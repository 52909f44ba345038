//! Implementations of the verification oracles.

use crate::analysis::{hss_temperature, mean_temperature, outlet_temperature};
use crate::model::{EdgeCondition, HeatSource, ThermalProblem};
use crate::solver::{solve_linear, solve_radiative, SolveSettings, TemperatureField};

use super::{CheckStatus, PrincipleReport, VerifyError};

/// Temperature constants that bound the field: ambient, the inlet value when
/// fluid flows, and every prescribed boundary temperature.
pub(crate) fn bound_candidates(problem: &ThermalProblem) -> Vec<f64> {
    let mut candidates = vec![problem.loads.ambient_temperature];
    if problem.inlet_constraint().is_some() {
        candidates.push(problem.flow.inlet_temperature);
    }
    for cond in &problem.loads.edge_conditions {
        if let EdgeCondition::Temperature(value) = cond {
            candidates.push(*value);
        }
    }
    candidates
}

fn source_sign_range(problem: &ThermalProblem) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for t in 0..problem.mesh.triangle_count() {
        let f = problem.loads.heat_source.at_triangle(t);
        min = min.min(f);
        max = max.max(f);
    }
    (min, max)
}

fn flux_sign_range(problem: &ThermalProblem) -> (f64, f64) {
    let mut min = 0.0f64;
    let mut max = 0.0f64;
    let mut any = false;
    for cond in &problem.loads.edge_conditions {
        if let EdgeCondition::Flux(q) = cond {
            if !any {
                min = *q;
                max = *q;
                any = true;
            } else {
                min = min.min(*q);
                max = max.max(*q);
            }
        }
    }
    (min, max)
}

fn radiative_field_hypothesis(
    principle: &str,
    problem: &ThermalProblem,
    fields: &[&TemperatureField],
    tolerance: f64,
) -> Option<PrincipleReport> {
    if !problem.radiation_enabled {
        return None;
    }
    for field in fields {
        if field.min() < 0.0 {
            return Some(PrincipleReport::not_applicable(
                principle,
                tolerance,
                "radiative hypotheses require a non-negative temperature field".to_string(),
            ));
        }
    }
    None
}

/// Lower-bound oracle. Applicable when the source is non-negative and every
/// prescribed flux is non-positive (inflow); for radiative problems the
/// field must additionally be non-negative.
pub fn check_minimum_principle(
    field: &TemperatureField,
    problem: &ThermalProblem,
    tolerance: f64,
) -> PrincipleReport {
    const NAME: &str = "minimum-principle";
    let (f_min, _) = source_sign_range(problem);
    if f_min < 0.0 {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            format!("hypothesis f >= 0 fails: smallest source value is {f_min}"),
        );
    }
    let (_, q_max) = flux_sign_range(problem);
    if q_max > 0.0 {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            format!("hypothesis q_p <= 0 fails: largest prescribed flux is {q_max}"),
        );
    }
    if let Some(report) = radiative_field_hypothesis(NAME, problem, &[field], tolerance) {
        return report;
    }

    let bound = bound_candidates(problem)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let (worst_node, field_min) =
        field
            .values
            .iter()
            .enumerate()
            .fold((0usize, f64::INFINITY), |acc, (i, &v)| {
                if v < acc.1 {
                    (i, v)
                } else {
                    acc
                }
            });
    let violation = (bound - field_min).max(0.0);
    PrincipleReport {
        principle: NAME.to_string(),
        status: if violation <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        bound_value: Some(bound),
        field_extreme: Some(field_min),
        violation,
        worst_node: Some(worst_node),
        tolerance,
        detail: format!("lower bound {bound}, field minimum {field_min}"),
    }
}

/// Upper-bound oracle, the mirror image of the minimum principle:
/// applicable when the source is non-positive and prescribed fluxes are
/// non-negative (outflow).
pub fn check_maximum_principle(
    field: &TemperatureField,
    problem: &ThermalProblem,
    tolerance: f64,
) -> PrincipleReport {
    const NAME: &str = "maximum-principle";
    let (_, f_max) = source_sign_range(problem);
    if f_max > 0.0 {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            format!("hypothesis f <= 0 fails: largest source value is {f_max}"),
        );
    }
    let (q_min, _) = flux_sign_range(problem);
    if q_min < 0.0 {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            format!("hypothesis q_p >= 0 fails: smallest prescribed flux is {q_min}"),
        );
    }
    if let Some(report) = radiative_field_hypothesis(NAME, problem, &[field], tolerance) {
        return report;
    }

    let bound = bound_candidates(problem)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let (worst_node, field_max) =
        field
            .values
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (i, &v)| {
                if v > acc.1 {
                    (i, v)
                } else {
                    acc
                }
            });
    let violation = (field_max - bound).max(0.0);
    PrincipleReport {
        principle: NAME.to_string(),
        status: if violation <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        bound_value: Some(bound),
        field_extreme: Some(field_max),
        violation,
        worst_node: Some(worst_node),
        tolerance,
        detail: format!("upper bound {bound}, field maximum {field_max}"),
    }
}

fn meshes_match(a: &ThermalProblem, b: &ThermalProblem) -> bool {
    a.mesh.nodes == b.mesh.nodes
        && a.mesh.triangles == b.mesh.triangles
        && a.path.node_sequence == b.path.node_sequence
}

/// Comparison oracle: with identical discretization, operator coefficients,
/// and ambient temperature, ordered inputs
/// (`inlet`, `theta_p`, `f` ascending; `q_p` descending) must produce
/// pointwise-ordered fields `field_a <= field_b`.
pub fn check_comparison(
    field_a: &TemperatureField,
    field_b: &TemperatureField,
    problem_a: &ThermalProblem,
    problem_b: &ThermalProblem,
    tolerance: f64,
) -> Result<PrincipleReport, VerifyError> {
    const NAME: &str = "comparison";
    if !meshes_match(problem_a, problem_b) {
        return Err(VerifyError::MeshMismatch(
            "comparison requires identical meshes and vasculature paths".to_string(),
        ));
    }
    let gate = |condition: bool, reason: &str| -> Option<PrincipleReport> {
        if condition {
            None
        } else {
            Some(PrincipleReport::not_applicable(
                NAME,
                tolerance,
                reason.to_string(),
            ))
        }
    };
    if let Some(r) = gate(
        problem_a.loads.ambient_temperature == problem_b.loads.ambient_temperature,
        "ambient temperatures differ",
    ) {
        return Ok(r);
    }
    if let Some(r) = gate(
        problem_a.material == problem_b.material,
        "material parameters differ",
    ) {
        return Ok(r);
    }
    if let Some(r) = gate(
        problem_a.flow.heat_capacity_rate() == problem_b.flow.heat_capacity_rate(),
        "heat capacity rates differ",
    ) {
        return Ok(r);
    }
    if let Some(r) = gate(
        problem_a.radiation_enabled == problem_b.radiation_enabled,
        "radiation flags differ",
    ) {
        return Ok(r);
    }
    if problem_a.inlet_constraint().is_some() {
        if let Some(r) = gate(
            problem_a.flow.inlet_temperature <= problem_b.flow.inlet_temperature,
            "inlet temperatures are not ordered",
        ) {
            return Ok(r);
        }
    }
    for t in 0..problem_a.mesh.triangle_count() {
        let fa = problem_a.loads.heat_source.at_triangle(t);
        let fb = problem_b.loads.heat_source.at_triangle(t);
        if fa > fb {
            return Ok(PrincipleReport::not_applicable(
                NAME,
                tolerance,
                format!("sources are not ordered on triangle {t}: {fa} > {fb}"),
            ));
        }
    }
    for (e, (ca, cb)) in problem_a
        .loads
        .edge_conditions
        .iter()
        .zip(&problem_b.loads.edge_conditions)
        .enumerate()
    {
        match (ca, cb) {
            (EdgeCondition::Flux(qa), EdgeCondition::Flux(qb)) => {
                if qa < qb {
                    return Ok(PrincipleReport::not_applicable(
                        NAME,
                        tolerance,
                        format!("fluxes are not ordered on boundary edge {e}: {qa} < {qb}"),
                    ));
                }
            }
            (EdgeCondition::Temperature(ta), EdgeCondition::Temperature(tb)) => {
                if ta > tb {
                    return Ok(PrincipleReport::not_applicable(
                        NAME,
                        tolerance,
                        format!("boundary temperatures are not ordered on edge {e}: {ta} > {tb}"),
                    ));
                }
            }
            _ => {
                return Ok(PrincipleReport::not_applicable(
                    NAME,
                    tolerance,
                    format!("boundary condition kinds differ on edge {e}"),
                ))
            }
        }
    }
    if let Some(r) = radiative_field_hypothesis(NAME, problem_a, &[field_a, field_b], tolerance) {
        return Ok(r);
    }

    let mut worst_node = 0usize;
    let mut worst_excess = f64::NEG_INFINITY;
    for (i, (a, b)) in field_a.values.iter().zip(&field_b.values).enumerate() {
        let excess = a - b;
        if excess > worst_excess {
            worst_excess = excess;
            worst_node = i;
        }
    }
    let violation = worst_excess.max(0.0);
    Ok(PrincipleReport {
        principle: NAME.to_string(),
        status: if violation <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        bound_value: None,
        field_extreme: Some(worst_excess),
        violation,
        worst_node: Some(worst_node),
        tolerance,
        detail: format!("largest ordering excess {worst_excess} at node {worst_node}"),
    })
}

/// Perturbations applied to the prescribed temperature inputs.
#[derive(Clone, Copy, Debug, Default)]
pub struct StabilityPerturbation {
    pub d_ambient: f64,
    pub d_inlet: f64,
    /// Added to every prescribed boundary temperature.
    pub d_boundary: f64,
}

impl StabilityPerturbation {
    pub fn magnitude(&self) -> f64 {
        self.d_ambient
            .abs()
            .max(self.d_inlet.abs())
            .max(self.d_boundary.abs())
    }
}

/// Stability oracle for the linear model: perturbing the temperature inputs
/// by at most `delta` must move the solution by at most `delta` in sup-norm
/// (up to the relative slack).
pub fn check_stability(
    problem: &ThermalProblem,
    perturbation: StabilityPerturbation,
    relative_tolerance: f64,
    settings: &SolveSettings,
) -> Result<PrincipleReport, VerifyError> {
    const NAME: &str = "stability";
    let delta = perturbation.magnitude();
    let tolerance = relative_tolerance * delta;
    if problem.radiation_enabled {
        return Ok(PrincipleReport::not_applicable(
            NAME,
            tolerance,
            "the stability bound covers the linear model; disable radiation".to_string(),
        ));
    }

    let mut perturbed = problem.clone();
    perturbed.loads.ambient_temperature += perturbation.d_ambient;
    perturbed.flow.inlet_temperature += perturbation.d_inlet;
    for cond in &mut perturbed.loads.edge_conditions {
        if let EdgeCondition::Temperature(value) = cond {
            *value += perturbation.d_boundary;
        }
    }

    let base = solve_linear(problem, settings).map_err(|source| VerifyError::Solve {
        guess_index: None,
        source,
    })?;
    let shifted = solve_linear(&perturbed, settings).map_err(|source| VerifyError::Solve {
        guess_index: None,
        source,
    })?;

    let mut worst_node = 0usize;
    let mut sup = 0.0f64;
    for (i, (a, b)) in base.values.iter().zip(&shifted.values).enumerate() {
        let diff = (a - b).abs();
        if diff > sup {
            sup = diff;
            worst_node = i;
        }
    }
    let violation = (sup - delta).max(0.0);
    Ok(PrincipleReport {
        principle: NAME.to_string(),
        status: if violation <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        bound_value: Some(delta),
        field_extreme: Some(sup),
        violation,
        worst_node: Some(worst_node),
        tolerance,
        detail: format!(
            "perturbation (ambient {:+}, inlet {:+}, boundary {:+}) moved the field by {sup}",
            perturbation.d_ambient, perturbation.d_inlet, perturbation.d_boundary
        ),
    })
}

/// Constant-source/adiabatic oracle: the field, its mean, and the outlet
/// temperature all sit between the inlet temperature and the no-flow steady
/// state.
pub fn check_special_case(
    field: &TemperatureField,
    problem: &ThermalProblem,
    tolerance: f64,
) -> PrincipleReport {
    const NAME: &str = "special-case-bounds";
    if !problem.loads.heat_source.is_uniform() {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            "hypothesis A1 fails: the heat source is not constant".to_string(),
        );
    }
    let f0 = match &problem.loads.heat_source {
        HeatSource::Uniform(f) => *f,
        HeatSource::PerTriangle(fs) => fs.first().copied().unwrap_or(0.0),
    };
    if f0 < 0.0 {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            format!("the constant source {f0} is negative; no steady state exists"),
        );
    }
    if !problem.all_adiabatic() {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            "hypothesis A2 fails: not every boundary edge is adiabatic".to_string(),
        );
    }
    let emissivity = if problem.radiation_enabled {
        problem.material.emissivity
    } else {
        0.0
    };
    let steady = match hss_temperature(
        f0,
        problem.material.convective_coefficient,
        emissivity,
        problem.material.stefan_boltzmann,
        problem.loads.ambient_temperature,
    ) {
        Ok(t) => t,
        Err(e) => {
            return PrincipleReport::not_applicable(
                NAME,
                tolerance,
                format!("no steady state: {e}"),
            )
        }
    };
    let inlet = problem.flow.inlet_temperature;
    if inlet > steady {
        return PrincipleReport::not_applicable(
            NAME,
            tolerance,
            format!("hypothesis A3 fails: inlet {inlet} exceeds the steady state {steady}"),
        );
    }
    if let Some(r) = radiative_field_hypothesis(NAME, problem, &[field], tolerance) {
        return r;
    }

    let mut worst_node = 0usize;
    let mut violation = 0.0f64;
    for (i, &v) in field.values.iter().enumerate() {
        let excess = (inlet - v).max(v - steady);
        if excess > violation {
            violation = excess;
            worst_node = i;
        }
    }
    let mean = mean_temperature(&problem.mesh, field);
    let outlet = outlet_temperature(field, &problem.path);
    let mean_excess = (inlet - mean).max(mean - steady).max(0.0);
    let outlet_excess = (inlet - outlet).max(0.0);
    violation = violation.max(mean_excess).max(outlet_excess);

    PrincipleReport {
        principle: NAME.to_string(),
        status: if violation <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        bound_value: Some(steady),
        field_extreme: Some(mean),
        violation,
        worst_node: Some(worst_node),
        tolerance,
        detail: format!(
            "inlet {inlet} <= field/mean/outlet <= steady state {steady}; mean {mean}, outlet {outlet}"
        ),
    }
}

/// Empirical uniqueness spot check for the radiative model: every supplied
/// non-negative initial guess must converge to the same non-negative field.
pub fn check_radiative_uniqueness(
    problem: &ThermalProblem,
    guesses: &[Vec<f64>],
    tolerance: f64,
    settings: &SolveSettings,
) -> Result<PrincipleReport, VerifyError> {
    const NAME: &str = "radiative-uniqueness";
    if guesses.is_empty() {
        return Err(VerifyError::NoGuesses);
    }
    let mut fields = Vec::with_capacity(guesses.len());
    for (g, guess) in guesses.iter().enumerate() {
        let field = solve_radiative(problem, settings, Some(guess)).map_err(|source| {
            VerifyError::Solve {
                guess_index: Some(g),
                source,
            }
        })?;
        fields.push(field);
    }
    if fields.len() == 1 {
        return Ok(PrincipleReport {
            principle: NAME.to_string(),
            status: CheckStatus::Pass,
            bound_value: None,
            field_extreme: Some(0.0),
            violation: 0.0,
            worst_node: None,
            tolerance,
            detail: "single guess: degenerate pass".to_string(),
        });
    }

    let mut worst_node = 0usize;
    let mut sup = 0.0f64;
    let reference = &fields[0];
    for other in &fields[1..] {
        for (i, (a, b)) in reference.values.iter().zip(&other.values).enumerate() {
            let diff = (a - b).abs();
            if diff > sup {
                sup = diff;
                worst_node = i;
            }
        }
    }
    Ok(PrincipleReport {
        principle: NAME.to_string(),
        status: if sup <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        bound_value: None,
        field_extreme: Some(sup),
        violation: sup,
        worst_node: Some(worst_node),
        tolerance,
        detail: format!(
            "{} guesses, largest pairwise difference {sup}",
            fields.len()
        ),
    })
}
