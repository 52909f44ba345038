//! Scalar post-processing: the no-flow steady-state temperature, mean and
//! outlet temperatures, performance metrics, and the global energy-balance
//! audit.

use serde::Serialize;
use thiserror::Error;

use crate::assembly::{self, AssemblyError};
use crate::mesh::{Mesh, VasculaturePath};
use crate::model::ThermalProblem;
use crate::solver::TemperatureField;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no surface coupling: both the convective coefficient and emissivity-weighted radiation are zero")]
    NoSurfaceCoupling,
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("degenerate regime: {0}")]
    DegenerateRegime(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("field has {got} values for {expected} mesh nodes")]
    FieldLengthMismatch { got: usize, expected: usize },
}

/// Steady temperature of the plate under a uniform source with no flow: the
/// unique root at or above ambient of
/// `h (theta - amb) + eps sigma (theta^4 - amb^4) = f0`.
///
/// Solved by Newton from above the root (the residual is convex and
/// increasing there, so the iteration descends monotonically); polished to
/// machine precision, far inside the documented `1e-9 * max(f0, 1)` residual
/// bound.
pub fn hss_temperature(
    f0: f64,
    h_conv: f64,
    emissivity: f64,
    stefan_boltzmann: f64,
    ambient: f64,
) -> Result<f64, MetricsError> {
    if f0 < 0.0 || !f0.is_finite() {
        return Err(MetricsError::InvalidArgument(format!(
            "heat source must be a non-negative finite value, got {f0}"
        )));
    }
    if !(ambient > 0.0) {
        return Err(MetricsError::InvalidArgument(format!(
            "ambient temperature must be positive, got {ambient}"
        )));
    }
    let eps_sigma = emissivity * stefan_boltzmann;
    if h_conv <= 0.0 && eps_sigma <= 0.0 {
        return Err(MetricsError::NoSurfaceCoupling);
    }
    if f0 == 0.0 {
        return Ok(ambient);
    }

    let g = |theta: f64| {
        h_conv * (theta - ambient) + eps_sigma * (theta.powi(4) - ambient.powi(4)) - f0
    };
    let dg = |theta: f64| h_conv + 4.0 * eps_sigma * theta.powi(3);

    // Bracket [ambient, hi] with g(hi) >= 0, extending until the sign flips.
    let slope = h_conv.max(4.0 * eps_sigma * ambient.powi(3));
    let mut hi = ambient + f0 / slope;
    while g(hi) < 0.0 {
        hi = ambient + 2.0 * (hi - ambient);
    }

    let mut x = hi;
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            break;
        }
        let step = gx / dg(x);
        let next = (x - step).max(ambient);
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Area-weighted mean of a nodal field; exact for piecewise-linear fields.
pub fn mean_temperature(mesh: &Mesh, field: &TemperatureField) -> f64 {
    let mut weighted = 0.0;
    let mut total = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        let avg = (field.values[tri[0]] + field.values[tri[1]] + field.values[tri[2]]) / 3.0;
        weighted += area * avg;
        total += area;
    }
    weighted / total
}

/// Temperature at the last node of the vasculature.
pub fn outlet_temperature(field: &TemperatureField, path: &VasculaturePath) -> f64 {
    field.values[path.outlet_node()]
}

/// Heat carried away by the fluid relative to the heat supplied:
/// `chi (theta_outlet - theta_inlet) / total_heat`. Unbounded on both sides
/// when the inlet temperature differs from ambient.
pub fn coefficient_of_performance(
    theta_outlet: f64,
    theta_inlet: f64,
    chi: f64,
    total_heat: f64,
) -> Result<f64, MetricsError> {
    if !(total_heat > 0.0) {
        return Err(MetricsError::InvalidArgument(format!(
            "total supplied heat must be positive, got {total_heat}"
        )));
    }
    Ok(chi * (theta_outlet - theta_inlet) / total_heat)
}

/// Cooling efficiency under a constant source:
/// `(theta_hss - theta_mean) / (theta_hss - min(theta_inlet, theta_ambient))`.
pub fn cooling_efficiency(
    theta_hss: f64,
    theta_mean: f64,
    theta_inlet: f64,
    theta_ambient: f64,
) -> Result<f64, MetricsError> {
    if theta_inlet > theta_hss {
        return Err(MetricsError::WrongRegime(format!(
            "inlet temperature {theta_inlet} exceeds the no-flow steady state {theta_hss}; this is active heating"
        )));
    }
    let reference = theta_inlet.min(theta_ambient);
    let denom = theta_hss - reference;
    if !(denom > 0.0) {
        return Err(MetricsError::DegenerateRegime(format!(
            "no cooling headroom: steady state {theta_hss} does not exceed the reference {reference}"
        )));
    }
    Ok((theta_hss - theta_mean) / denom)
}

/// Upper bound of the cooling efficiency: 1 when the inlet is at or below
/// ambient, otherwise `(theta_hss - theta_inlet) / (theta_hss - theta_ambient)`.
pub fn max_cooling_efficiency(
    theta_hss: f64,
    theta_inlet: f64,
    theta_ambient: f64,
) -> Result<f64, MetricsError> {
    if theta_inlet > theta_hss {
        return Err(MetricsError::WrongRegime(format!(
            "inlet temperature {theta_inlet} exceeds the no-flow steady state {theta_hss}; this is active heating"
        )));
    }
    if theta_inlet <= theta_ambient {
        return Ok(1.0);
    }
    let denom = theta_hss - theta_ambient;
    if denom == 0.0 {
        return Err(MetricsError::DegenerateRegime(
            "steady state equals ambient while the inlet is hotter; the bound is undefined"
                .to_string(),
        ));
    }
    Ok((theta_hss - theta_inlet) / denom)
}

/// Heating efficiency under a constant source:
/// `(theta_mean - theta_hss) / (max(theta_inlet, theta_ambient) - theta_hss)`.
pub fn heating_efficiency(
    theta_hss: f64,
    theta_mean: f64,
    theta_inlet: f64,
    theta_ambient: f64,
) -> Result<f64, MetricsError> {
    if theta_inlet < theta_hss {
        return Err(MetricsError::WrongRegime(format!(
            "inlet temperature {theta_inlet} is below the no-flow steady state {theta_hss}; this is active cooling"
        )));
    }
    let reference = theta_inlet.max(theta_ambient);
    let denom = reference - theta_hss;
    if !(denom > 0.0) {
        return Err(MetricsError::DegenerateRegime(format!(
            "no heating headroom: reference {reference} does not exceed the steady state {theta_hss}"
        )));
    }
    Ok((theta_mean - theta_hss) / denom)
}

/// Global energy-balance audit: the aggregated model residual over free
/// nodes (the discrete form of testing the weak statement with a unit
/// weight), normalized by the larger of the supplied heat and the advected
/// heat. Converged solves report values at solver-tolerance level; a
/// corrupted field is flagged immediately.
pub fn energy_balance_residual(
    field: &TemperatureField,
    problem: &ThermalProblem,
) -> Result<f64, MetricsError> {
    let n = problem.mesh.node_count();
    if field.values.len() != n {
        return Err(MetricsError::FieldLengthMismatch {
            got: field.values.len(),
            expected: n,
        });
    }
    let residual = assembly::full_residual(problem, &field.values)?;
    let fixed = assembly::constrained_nodes(problem)?;
    let imbalance: f64 = residual
        .iter()
        .enumerate()
        .filter(|(node, _)| !fixed.contains_key(node))
        .map(|(_, r)| r)
        .sum();

    let chi = problem.flow.heat_capacity_rate();
    let advected =
        chi * (outlet_temperature(field, &problem.path) - problem.flow.inlet_temperature).abs();
    let supplied = problem.total_source_power().abs();
    let denom = supplied.max(advected).max(1e-12);
    Ok(imbalance.abs() / denom)
}

/// Regime of the supplied configuration relative to the no-flow steady state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Cooling,
    Heating,
}

/// Flat scalar summary of a solved problem.
#[derive(Clone, Debug, Serialize)]
pub struct MetricsReport {
    pub theta_mean_k: f64,
    pub theta_outlet_k: f64,
    pub theta_inlet_k: f64,
    pub theta_min_k: f64,
    pub theta_max_k: f64,
    pub theta_ambient_k: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_hss_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_of_performance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cooling_efficiency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_cooling_efficiency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heating_efficiency: Option<f64>,
    pub energy_balance_residual: f64,
    /// Set when the source is non-uniform: the efficiency definitions assume
    /// a constant source, so the reported values are indicative only.
    pub efficiency_advisory: bool,
    pub newton_iterations: usize,
}

/// Builds the full metrics report for a solved field.
///
/// The regime (cooling vs heating) is selected against the steady state of
/// the area-averaged source; for non-uniform sources the report carries an
/// advisory flag. Exactly one of the cooling/heating efficiencies is present
/// whenever the steady state exists.
pub fn metrics_report(
    problem: &ThermalProblem,
    field: &TemperatureField,
) -> Result<MetricsReport, MetricsError> {
    let theta_mean = mean_temperature(&problem.mesh, field);
    let theta_outlet = outlet_temperature(field, &problem.path);
    let theta_inlet = problem.flow.inlet_temperature;
    let ambient = problem.loads.ambient_temperature;
    let chi = problem.flow.heat_capacity_rate();
    let supplied = problem.total_source_power();

    let mean_source = problem.mean_source();
    let effective_emissivity = if problem.radiation_enabled {
        problem.material.emissivity
    } else {
        0.0
    };
    let theta_hss = if mean_source >= 0.0 {
        hss_temperature(
            mean_source,
            problem.material.convective_coefficient,
            effective_emissivity,
            problem.material.stefan_boltzmann,
            ambient,
        )
        .ok()
    } else {
        None
    };

    let coefficient_of_performance = if supplied > 0.0 {
        Some(chi * (theta_outlet - theta_inlet) / supplied)
    } else {
        None
    };

    let mut regime = None;
    let mut cooling = None;
    let mut max_cooling = None;
    let mut heating = None;
    if let Some(hss) = theta_hss {
        if theta_inlet <= hss {
            regime = Some(Regime::Cooling);
            cooling = cooling_efficiency(hss, theta_mean, theta_inlet, ambient).ok();
            max_cooling = max_cooling_efficiency(hss, theta_inlet, ambient).ok();
        } else {
            regime = Some(Regime::Heating);
            heating = heating_efficiency(hss, theta_mean, theta_inlet, ambient).ok();
        }
    }

    Ok(MetricsReport {
        theta_mean_k: theta_mean,
        theta_outlet_k: theta_outlet,
        theta_inlet_k: theta_inlet,
        theta_min_k: field.min(),
        theta_max_k: field.max(),
        theta_ambient_k: ambient,
        theta_hss_k: theta_hss,
        regime,
        coefficient_of_performance,
        cooling_efficiency: cooling,
        max_cooling_efficiency: max_cooling,
        heating_efficiency: heating,
        energy_balance_residual: energy_balance_residual(field, problem)?,
        efficiency_advisory: !problem.loads.heat_source.is_uniform(),
        newton_iterations: field.info.newton_iterations,
    })
}
