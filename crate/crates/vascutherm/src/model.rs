//! Physical problem definition: material and surface parameters, vasculature
//! flow data, sources, boundary conditions, and the admissibility checks that
//! gate every solve.
//!
//! All quantities are stored in SI units (meters, kilograms, seconds, Kelvin,
//! Watts). Unit conversions happen at config ingestion, not here.

use thiserror::Error;

use crate::mesh::{BoundaryTag, Mesh, VasculaturePath};

/// Default Stefan-Boltzmann constant in W/m^2/K^4.
pub const STEFAN_BOLTZMANN: f64 = 5.67e-8;

/// Symmetric 2x2 conductivity tensor in W/m/K.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConductivityTensor {
    pub kxx: f64,
    pub kxy: f64,
    pub kyy: f64,
}

impl ConductivityTensor {
    pub fn isotropic(k: f64) -> Self {
        Self {
            kxx: k,
            kxy: 0.0,
            kyy: k,
        }
    }

    /// Eigenvalues in ascending order (closed form for symmetric 2x2).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.kxx + self.kyy);
        let radius = (0.25 * (self.kxx - self.kyy).powi(2) + self.kxy * self.kxy).sqrt();
        (mean - radius, mean + radius)
    }

    /// Applies the tensor to a vector.
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.kxx * v[0] + self.kxy * v[1],
            self.kxy * v[0] + self.kyy * v[1],
        ]
    }
}

/// Conductivity field: one tensor for the whole plate or one per triangle.
#[derive(Clone, Debug, PartialEq)]
pub enum Conductivity {
    Constant(ConductivityTensor),
    PerTriangle(Vec<ConductivityTensor>),
}

impl Conductivity {
    pub fn at_triangle(&self, t: usize) -> ConductivityTensor {
        match self {
            Conductivity::Constant(k) => *k,
            Conductivity::PerTriangle(ks) => ks[t],
        }
    }

    /// Uniform lower bound on the eigenvalues over the whole field.
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Conductivity::Constant(k) => k.eigenvalues().0,
            Conductivity::PerTriangle(ks) => ks
                .iter()
                .map(|k| k.eigenvalues().0)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// Material and surface properties of the plate.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialParams {
    /// Plate thickness in meters.
    pub thickness: f64,
    pub conductivity: Conductivity,
    /// Convective heat transfer coefficient in W/m^2/K.
    pub convective_coefficient: f64,
    /// Surface emissivity, dimensionless in [0, 1].
    pub emissivity: f64,
    /// Stefan-Boltzmann constant in W/m^2/K^4.
    pub stefan_boltzmann: f64,
}

/// Coolant flow data for the vasculature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VasculatureFlow {
    /// Mass flow rate in kg/s.
    pub mass_flow_rate: f64,
    /// Specific heat capacity of the fluid in J/kg/K.
    pub fluid_heat_capacity: f64,
    /// Fluid temperature at the inlet in K.
    pub inlet_temperature: f64,
}

impl VasculatureFlow {
    /// Heat capacity rate in W/K, the exact product of mass flow rate and
    /// fluid heat capacity.
    pub fn heat_capacity_rate(&self) -> f64 {
        self.mass_flow_rate * self.fluid_heat_capacity
    }
}

/// Heat capacity rate of a coolant stream. Unit-agnostic product: feeding
/// kg/min yields J/min/K; feeding kg/s yields W/K.
pub fn heat_capacity_rate(
    mass_flow_rate: f64,
    fluid_heat_capacity: f64,
) -> Result<f64, ModelError> {
    if mass_flow_rate < 0.0 {
        return Err(ModelError::InvalidArgument(format!(
            "mass flow rate must be non-negative, got {mass_flow_rate}"
        )));
    }
    if !(fluid_heat_capacity > 0.0) {
        return Err(ModelError::InvalidArgument(format!(
            "fluid heat capacity must be positive, got {fluid_heat_capacity}"
        )));
    }
    Ok(mass_flow_rate * fluid_heat_capacity)
}

/// Applied heat source in W/m^2, piecewise constant per triangle.
#[derive(Clone, Debug, PartialEq)]
pub enum HeatSource {
    Uniform(f64),
    PerTriangle(Vec<f64>),
}

impl HeatSource {
    pub fn at_triangle(&self, t: usize) -> f64 {
        match self {
            HeatSource::Uniform(f) => *f,
            HeatSource::PerTriangle(fs) => fs[t],
        }
    }

    pub fn is_uniform(&self) -> bool {
        match self {
            HeatSource::Uniform(_) => true,
            HeatSource::PerTriangle(fs) => fs.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

/// Boundary data carried by one boundary edge, matching its tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeCondition {
    /// Prescribed outward heat flux through the plate edge in W per meter of
    /// boundary length (thickness already folded in). Zero means adiabatic.
    Flux(f64),
    /// Prescribed temperature in K applied to both edge nodes.
    Temperature(f64),
}

/// Sources and boundary conditions.
#[derive(Clone, Debug)]
pub struct SourcesAndBcs {
    pub heat_source: HeatSource,
    /// Ambient temperature in K.
    pub ambient_temperature: f64,
    /// One entry per mesh boundary edge, in the same order.
    pub edge_conditions: Vec<EdgeCondition>,
}

/// The complete boundary value problem on a meshed plate.
#[derive(Clone, Debug)]
pub struct ThermalProblem {
    pub mesh: Mesh,
    pub path: VasculaturePath,
    pub material: MaterialParams,
    pub flow: VasculatureFlow,
    pub loads: SourcesAndBcs,
    pub radiation_enabled: bool,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// One admissibility violation, reported with enough context to locate it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationIssue {
    #[error("plate thickness must be positive, got {0}")]
    NonPositiveThickness(f64),
    #[error("convective coefficient must be non-negative, got {0}")]
    NegativeConvectiveCoefficient(f64),
    #[error("emissivity must lie in [0, 1], got {0}")]
    EmissivityOutOfRange(f64),
    #[error("Stefan-Boltzmann constant must be positive, got {0}")]
    NonPositiveStefanBoltzmann(f64),
    #[error("conductivity is not positive definite{}", match .triangle {
        Some(t) => format!(" on triangle {t}"),
        None => String::new(),
    })]
    ConductivityNotPositiveDefinite { triangle: Option<usize> },
    #[error("per-triangle conductivity has {got} entries for {expected} triangles")]
    ConductivityLengthMismatch { got: usize, expected: usize },
    #[error("mass flow rate must be non-negative, got {0}")]
    NegativeMassFlowRate(f64),
    #[error("fluid heat capacity must be positive, got {0}")]
    NonPositiveFluidHeatCapacity(f64),
    #[error("inlet temperature must be positive (absolute scale), got {0}")]
    NonPositiveInletTemperature(f64),
    #[error("ambient temperature must be positive (absolute scale), got {0}")]
    NonPositiveAmbientTemperature(f64),
    #[error(
        "prescribed boundary temperature must be positive, got {value} on boundary edge {edge}"
    )]
    NonPositiveBoundaryTemperature { edge: usize, value: f64 },
    #[error("per-triangle heat source has {got} entries for {expected} triangles")]
    HeatSourceLengthMismatch { got: usize, expected: usize },
    #[error("boundary data has {got} entries for {expected} boundary edges")]
    EdgeConditionLengthMismatch { got: usize, expected: usize },
    #[error("boundary edge {edge} is tagged {tag:?} but carries {condition:?} data")]
    EdgeConditionTagMismatch {
        edge: usize,
        tag: BoundaryTag,
        condition: EdgeCondition,
    },
    #[error("node {node} receives conflicting prescribed temperatures {a} and {b} from adjacent boundary edges")]
    ConflictingDirichletValues { node: usize, a: f64, b: f64 },
    #[error("inlet node {node} of the vasculature does not lie on the domain boundary")]
    InletNotOnBoundary { node: usize },
    #[error("mesh is structurally invalid: {0}")]
    MeshInvalid(String),
}

impl ThermalProblem {
    /// Checks every admissibility assumption and returns the complete list of
    /// violations rather than stopping at the first. Side-effect free and
    /// idempotent.
    pub fn validate(&self) -> Result<(), Vec<ValidationIssue>> {
        let mut issues = Vec::new();
        if let Err(e) = self.mesh.validate() {
            issues.push(ValidationIssue::MeshInvalid(e.to_string()));
        }

        let m = &self.material;
        if !(m.thickness > 0.0) {
            issues.push(ValidationIssue::NonPositiveThickness(m.thickness));
        }
        if m.convective_coefficient < 0.0 {
            issues.push(ValidationIssue::NegativeConvectiveCoefficient(
                m.convective_coefficient,
            ));
        }
        if !(0.0..=1.0).contains(&m.emissivity) {
            issues.push(ValidationIssue::EmissivityOutOfRange(m.emissivity));
        }
        if !(m.stefan_boltzmann > 0.0) {
            issues.push(ValidationIssue::NonPositiveStefanBoltzmann(
                m.stefan_boltzmann,
            ));
        }
        match &m.conductivity {
            Conductivity::Constant(k) => {
                if !(k.eigenvalues().0 > 0.0) {
                    issues
                        .push(ValidationIssue::ConductivityNotPositiveDefinite { triangle: None });
                }
            }
            Conductivity::PerTriangle(ks) => {
                if ks.len() != self.mesh.triangle_count() {
                    issues.push(ValidationIssue::ConductivityLengthMismatch {
                        got: ks.len(),
                        expected: self.mesh.triangle_count(),
                    });
                }
                for (t, k) in ks.iter().enumerate() {
                    if !(k.eigenvalues().0 > 0.0) {
                        issues.push(ValidationIssue::ConductivityNotPositiveDefinite {
                            triangle: Some(t),
                        });
                    }
                }
            }
        }

        if self.flow.mass_flow_rate < 0.0 {
            issues.push(ValidationIssue::NegativeMassFlowRate(
                self.flow.mass_flow_rate,
            ));
        }
        if !(self.flow.fluid_heat_capacity > 0.0) {
            issues.push(ValidationIssue::NonPositiveFluidHeatCapacity(
                self.flow.fluid_heat_capacity,
            ));
        }
        if !(self.flow.inlet_temperature > 0.0) {
            issues.push(ValidationIssue::NonPositiveInletTemperature(
                self.flow.inlet_temperature,
            ));
        }
        if !(self.loads.ambient_temperature > 0.0) {
            issues.push(ValidationIssue::NonPositiveAmbientTemperature(
                self.loads.ambient_temperature,
            ));
        }

        if let HeatSource::PerTriangle(fs) = &self.loads.heat_source {
            if fs.len() != self.mesh.triangle_count() {
                issues.push(ValidationIssue::HeatSourceLengthMismatch {
                    got: fs.len(),
                    expected: self.mesh.triangle_count(),
                });
            }
        }

        if self.loads.edge_conditions.len() != self.mesh.boundary_edges.len() {
            issues.push(ValidationIssue::EdgeConditionLengthMismatch {
                got: self.loads.edge_conditions.len(),
                expected: self.mesh.boundary_edges.len(),
            });
        } else {
            let mut dirichlet: std::collections::BTreeMap<usize, f64> = Default::default();
            for (e, (edge, cond)) in self
                .mesh
                .boundary_edges
                .iter()
                .zip(&self.loads.edge_conditions)
                .enumerate()
            {
                let matches = matches!(
                    (edge.tag, cond),
                    (BoundaryTag::Flux, EdgeCondition::Flux(_))
                        | (BoundaryTag::Temperature, EdgeCondition::Temperature(_))
                );
                if !matches {
                    issues.push(ValidationIssue::EdgeConditionTagMismatch {
                        edge: e,
                        tag: edge.tag,
                        condition: *cond,
                    });
                }
                if let EdgeCondition::Temperature(value) = cond {
                    if !(*value > 0.0) {
                        issues.push(ValidationIssue::NonPositiveBoundaryTemperature {
                            edge: e,
                            value: *value,
                        });
                    }
                    for &node in &edge.nodes {
                        match dirichlet.get(&node) {
                            Some(&prev) if prev != *value => {
                                issues.push(ValidationIssue::ConflictingDirichletValues {
                                    node,
                                    a: prev,
                                    b: *value,
                                });
                            }
                            _ => {
                                dirichlet.insert(node, *value);
                            }
                        }
                    }
                }
            }
        }

        let boundary = self.mesh.boundary_nodes();
        if !boundary.contains(&self.path.inlet_node()) {
            issues.push(ValidationIssue::InletNotOnBoundary {
                node: self.path.inlet_node(),
            });
        }

        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    /// Prescribed nodal temperatures collected from temperature-tagged
    /// boundary edges (both endpoints of each edge). Assumes `validate`
    /// passed, so conflicting values were already rejected.
    pub fn dirichlet_nodes(&self) -> std::collections::BTreeMap<usize, f64> {
        let mut map = std::collections::BTreeMap::new();
        for (edge, cond) in self
            .mesh
            .boundary_edges
            .iter()
            .zip(&self.loads.edge_conditions)
        {
            if let EdgeCondition::Temperature(value) = cond {
                for &node in &edge.nodes {
                    map.insert(node, *value);
                }
            }
        }
        map
    }

    /// The inlet constraint applies only while fluid actually flows. With a
    /// zero heat capacity rate the vasculature is energetically inert and the
    /// inlet temperature drops out of the model.
    pub fn inlet_constraint(&self) -> Option<(usize, f64)> {
        if self.flow.heat_capacity_rate() > 0.0 {
            Some((self.path.inlet_node(), self.flow.inlet_temperature))
        } else {
            None
        }
    }

    /// Domain integral of the heat source in W.
    pub fn total_source_power(&self) -> f64 {
        (0..self.mesh.triangle_count())
            .map(|t| self.loads.heat_source.at_triangle(t) * self.mesh.triangle_area(t))
            .sum()
    }

    /// Area-weighted average heat source in W/m^2.
    pub fn mean_source(&self) -> f64 {
        self.total_source_power() / self.mesh.total_area()
    }

    /// True when every boundary edge is adiabatic (zero prescribed flux).
    pub fn all_adiabatic(&self) -> bool {
        self.loads
            .edge_conditions
            .iter()
            .all(|c| matches!(c, EdgeCondition::Flux(q) if *q == 0.0))
    }
}
