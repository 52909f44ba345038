//! Line-oriented run configuration: `key = value` entries under `[section]`
//! headers, hand-editable and written back canonically in SI units.
//!
//! Quantities accept an optional unit suffix from a fixed per-key list
//! (`thickness = 4.31 mm`, `mass_flow_rate = 11.564e-3 kg/min`); everything
//! is converted to SI at parse time. Unknown sections, unknown keys, and
//! unit mismatches are rejected with their line number.

use thiserror::Error;

use crate::mesh::{embed_vasculature, generate_rect_mesh, BoundaryTag, Mesh, MeshError};
use crate::model::{
    Conductivity, ConductivityTensor, EdgeCondition, HeatSource, MaterialParams, SourcesAndBcs,
    ThermalProblem, VasculatureFlow, STEFAN_BOLTZMANN,
};
use crate::solver::SolveSettings;

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryConfig {
    /// Domain length in meters.
    pub length: f64,
    /// Domain height in meters.
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConductivityConfig {
    Isotropic(f64),
    Tensor { xx: f64, xy: f64, yy: f64 },
}

impl ConductivityConfig {
    pub fn tensor(&self) -> ConductivityTensor {
        match *self {
            ConductivityConfig::Isotropic(k) => ConductivityTensor::isotropic(k),
            ConductivityConfig::Tensor { xx, xy, yy } => ConductivityTensor {
                kxx: xx,
                kxy: xy,
                kyy: yy,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialConfig {
    /// Plate thickness in meters.
    pub thickness: f64,
    pub conductivity: ConductivityConfig,
    pub convective_coefficient: f64,
    pub emissivity: f64,
    pub stefan_boltzmann: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    /// Mass flow rate in kg/s.
    pub mass_flow_rate: f64,
    pub fluid_heat_capacity: f64,
    pub inlet_temperature: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceConfig {
    /// Source strength in W/m^2.
    pub value: f64,
    /// Optional sub-rectangle `[x0, y0, x1, y1]` carrying the source; the
    /// rest of the domain is unloaded. Whole domain when absent.
    pub region: Option<[f64; 4]>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SideCondition {
    Adiabatic,
    /// Prescribed outward flux in W/m.
    Flux(f64),
    /// Prescribed temperature in K.
    Temperature(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    fn key(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConfig {
    pub ambient_temperature: f64,
    /// Conditions in [left, right, bottom, top] order.
    pub sides: [SideCondition; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub radiation: bool,
    pub settings: SolveSettings,
}

/// A complete, unit-normalized run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub waypoints: Vec<[f64; 2]>,
    pub material: MaterialConfig,
    pub flow: FlowConfig,
    pub source: SourceConfig,
    pub boundary: BoundaryConfig,
    pub solver: SolverConfig,
    pub output_prefix: Option<String>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown section [{name}]")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key '{key}' in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: key '{key}' appears more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse number '{text}' for key '{key}'")]
    BadNumber {
        line: usize,
        key: String,
        text: String,
    },
    #[error("line {line}: unit '{got}' does not fit key '{key}' (accepted: {expected})")]
    UnitMismatch {
        line: usize,
        key: String,
        got: String,
        expected: String,
    },
    #[error("line {line}: {message}")]
    BadValue { line: usize, message: String },
    #[error("line {line}: key '{key}' must appear inside a section")]
    KeyOutsideSection { line: usize, key: String },
    #[error("missing required keys: {}", .keys.join(", "))]
    MissingKeys { keys: Vec<String> },
    #[error("geometry is invalid: {0}")]
    Geometry(#[from] MeshError),
}

/// Numeric value with an optional unit token, converted by a per-key table.
/// The first table entry is the SI unit used when no token is given.
fn parse_quantity(
    raw: &str,
    units: &[(&str, f64)],
    line: usize,
    key: &str,
) -> Result<f64, ConfigError> {
    let mut parts = raw.split_whitespace();
    let number_text = parts.next().unwrap_or("");
    let number: f64 = number_text.parse().map_err(|_| ConfigError::BadNumber {
        line,
        key: key.to_string(),
        text: number_text.to_string(),
    })?;
    match parts.next() {
        None => Ok(number),
        Some(unit) => {
            if parts.next().is_some() {
                return Err(ConfigError::BadValue {
                    line,
                    message: format!("trailing input after unit in '{raw}'"),
                });
            }
            match units.iter().find(|(name, _)| *name == unit) {
                Some((_, factor)) => Ok(number * factor),
                None => Err(ConfigError::UnitMismatch {
                    line,
                    key: key.to_string(),
                    got: unit.to_string(),
                    expected: if units.is_empty() {
                        "no unit (dimensionless)".to_string()
                    } else {
                        units
                            .iter()
                            .map(|(name, _)| *name)
                            .collect::<Vec<_>>()
                            .join(", ")
                    },
                }),
            }
        }
    }
}

fn parse_count(raw: &str, line: usize, key: &str) -> Result<usize, ConfigError> {
    raw.trim().parse().map_err(|_| ConfigError::BadNumber {
        line,
        key: key.to_string(),
        text: raw.trim().to_string(),
    })
}

fn parse_bool(raw: &str, line: usize) -> Result<bool, ConfigError> {
    match raw.trim() {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        other => Err(ConfigError::BadValue {
            line,
            message: format!("expected on/off, got '{other}'"),
        }),
    }
}

/// Waypoint list: `(x, y)` pairs in meters separated by whitespace.
fn parse_waypoints(raw: &str, line: usize) -> Result<Vec<[f64; 2]>, ConfigError> {
    let mut points = Vec::new();
    let mut rest = raw.trim();
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(ConfigError::BadValue {
                line,
                message: format!("expected '(' starting a waypoint, got '{rest}'"),
            });
        }
        let Some(close) = rest.find(')') else {
            return Err(ConfigError::BadValue {
                line,
                message: "unterminated waypoint: missing ')'".to_string(),
            });
        };
        let body = &rest[1..close];
        let coords: Vec<&str> = body.split(',').map(str::trim).collect();
        if coords.len() != 2 {
            return Err(ConfigError::BadValue {
                line,
                message: format!("waypoint '({body})' must have exactly two coordinates"),
            });
        }
        let mut point = [0.0; 2];
        for (k, text) in coords.iter().enumerate() {
            point[k] = text.parse().map_err(|_| ConfigError::BadNumber {
                line,
                key: "waypoints".to_string(),
                text: text.to_string(),
            })?;
        }
        points.push(point);
        rest = rest[close + 1..].trim_start();
    }
    if points.len() < 2 {
        return Err(ConfigError::BadValue {
            line,
            message: format!("need at least two waypoints, got {}", points.len()),
        });
    }
    Ok(points)
}

fn parse_region(raw: &str, line: usize) -> Result<[f64; 4], ConfigError> {
    let parts: Vec<&str> = raw.split_whitespace().collect();
    if parts.len() != 4 {
        return Err(ConfigError::BadValue {
            line,
            message: format!("region needs 'x0 y0 x1 y1', got '{raw}'"),
        });
    }
    let mut rect = [0.0; 4];
    for (k, text) in parts.iter().enumerate() {
        rect[k] = text.parse().map_err(|_| ConfigError::BadNumber {
            line,
            key: "region".to_string(),
            text: text.to_string(),
        })?;
    }
    if rect[0] >= rect[2] || rect[1] >= rect[3] {
        return Err(ConfigError::BadValue {
            line,
            message: format!("region corners must satisfy x0 < x1 and y0 < y1, got {rect:?}"),
        });
    }
    Ok(rect)
}

fn parse_side(raw: &str, line: usize, key: &str) -> Result<SideCondition, ConfigError> {
    let mut parts = raw.split_whitespace();
    match parts.next() {
        Some("adiabatic") => {
            if parts.next().is_some() {
                return Err(ConfigError::BadValue {
                    line,
                    message: "adiabatic takes no value".to_string(),
                });
            }
            Ok(SideCondition::Adiabatic)
        }
        Some("flux") => {
            let rest: Vec<&str> = parts.collect();
            let value = parse_quantity(&rest.join(" "), &[("W/m", 1.0)], line, key)?;
            Ok(SideCondition::Flux(value))
        }
        Some("temperature") => {
            let rest: Vec<&str> = parts.collect();
            let value = parse_quantity(&rest.join(" "), &[("K", 1.0)], line, key)?;
            Ok(SideCondition::Temperature(value))
        }
        other => Err(ConfigError::BadValue {
            line,
            message: format!(
                "boundary side must be 'adiabatic', 'flux <value>', or 'temperature <value>', got '{}'",
                other.unwrap_or("")
            ),
        }),
    }
}

#[derive(Default)]
struct PartialConfig {
    length: Option<f64>,
    height: Option<f64>,
    nx: Option<usize>,
    ny: Option<usize>,
    waypoints: Option<Vec<[f64; 2]>>,
    thickness: Option<f64>,
    conductivity_iso: Option<f64>,
    conductivity_xx: Option<f64>,
    conductivity_xy: Option<f64>,
    conductivity_yy: Option<f64>,
    convective_coefficient: Option<f64>,
    emissivity: Option<f64>,
    stefan_boltzmann: Option<f64>,
    mass_flow_rate: Option<f64>,
    fluid_heat_capacity: Option<f64>,
    inlet_temperature: Option<f64>,
    source_value: Option<f64>,
    source_region: Option<[f64; 4]>,
    ambient_temperature: Option<f64>,
    sides: [Option<SideCondition>; 4],
    radiation: Option<bool>,
    linear_backend: Option<String>,
    linear_tolerance: Option<f64>,
    newton_tolerance: Option<f64>,
    max_newton_iterations: Option<usize>,
    max_step_halvings: Option<usize>,
    output_prefix: Option<String>,
}

const SECTIONS: [&str; 8] = [
    "geometry",
    "vasculature",
    "material",
    "flow",
    "source",
    "boundary",
    "solver",
    "output",
];

/// Parses a config document, applying defaults (Stefan-Boltzmann constant,
/// solver settings, adiabatic sides, radiation on) and reporting every
/// missing required key at once.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut section: Option<String> = None;
    let mut partial = PartialConfig::default();

    macro_rules! set_once {
        ($line:expr, $key:expr, $slot:expr, $value:expr) => {{
            if $slot.is_some() {
                return Err(ConfigError::DuplicateKey {
                    line: $line,
                    key: $key.to_string(),
                });
            }
            $slot = Some($value);
        }};
    }

    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = match raw_line.find(['#', ';']) {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: content.to_string(),
                });
            };
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::UnknownSection {
                    line,
                    name: name.to_string(),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let Some(section_name) = section.as_deref() else {
            return Err(ConfigError::KeyOutsideSection {
                line,
                key: key.to_string(),
            });
        };

        const METERS: [(&str, f64); 2] = [("m", 1.0), ("mm", 1e-3)];
        const KELVIN: [(&str, f64); 1] = [("K", 1.0)];
        match (section_name, key) {
            ("geometry", "length") => {
                set_once!(
                    line,
                    key,
                    partial.length,
                    parse_quantity(value, &METERS, line, key)?
                )
            }
            ("geometry", "height") => {
                set_once!(
                    line,
                    key,
                    partial.height,
                    parse_quantity(value, &METERS, line, key)?
                )
            }
            ("geometry", "nx") => set_once!(line, key, partial.nx, parse_count(value, line, key)?),
            ("geometry", "ny") => set_once!(line, key, partial.ny, parse_count(value, line, key)?),
            ("vasculature", "waypoints") => {
                set_once!(line, key, partial.waypoints, parse_waypoints(value, line)?)
            }
            ("material", "thickness") => set_once!(
                line,
                key,
                partial.thickness,
                parse_quantity(value, &METERS, line, key)?
            ),
            ("material", "conductivity") => set_once!(
                line,
                key,
                partial.conductivity_iso,
                parse_quantity(value, &[("W/m/K", 1.0)], line, key)?
            ),
            ("material", "conductivity_xx") => set_once!(
                line,
                key,
                partial.conductivity_xx,
                parse_quantity(value, &[("W/m/K", 1.0)], line, key)?
            ),
            ("material", "conductivity_xy") => set_once!(
                line,
                key,
                partial.conductivity_xy,
                parse_quantity(value, &[("W/m/K", 1.0)], line, key)?
            ),
            ("material", "conductivity_yy") => set_once!(
                line,
                key,
                partial.conductivity_yy,
                parse_quantity(value, &[("W/m/K", 1.0)], line, key)?
            ),
            ("material", "convective_coefficient") => set_once!(
                line,
                key,
                partial.convective_coefficient,
                parse_quantity(value, &[("W/m^2/K", 1.0)], line, key)?
            ),
            ("material", "emissivity") => set_once!(
                line,
                key,
                partial.emissivity,
                parse_quantity(value, &[], line, key)?
            ),
            ("material", "stefan_boltzmann") => set_once!(
                line,
                key,
                partial.stefan_boltzmann,
                parse_quantity(value, &[("W/m^2/K^4", 1.0)], line, key)?
            ),
            ("flow", "mass_flow_rate") => set_once!(
                line,
                key,
                partial.mass_flow_rate,
                parse_quantity(value, &[("kg/s", 1.0), ("kg/min", 1.0 / 60.0)], line, key)?
            ),
            ("flow", "fluid_heat_capacity") => set_once!(
                line,
                key,
                partial.fluid_heat_capacity,
                parse_quantity(value, &[("J/kg/K", 1.0)], line, key)?
            ),
            ("flow", "inlet_temperature") => set_once!(
                line,
                key,
                partial.inlet_temperature,
                parse_quantity(value, &KELVIN, line, key)?
            ),
            ("source", "value") => set_once!(
                line,
                key,
                partial.source_value,
                parse_quantity(value, &[("W/m^2", 1.0)], line, key)?
            ),
            ("source", "region") => {
                set_once!(line, key, partial.source_region, parse_region(value, line)?)
            }
            ("boundary", "ambient_temperature") => set_once!(
                line,
                key,
                partial.ambient_temperature,
                parse_quantity(value, &KELVIN, line, key)?
            ),
            ("boundary", side_key @ ("left" | "right" | "bottom" | "top")) => {
                let idx = Side::ALL
                    .iter()
                    .position(|s| s.key() == side_key)
                    .expect("side key matched");
                set_once!(line, key, partial.sides[idx], parse_side(value, line, key)?)
            }
            ("solver", "radiation") => {
                set_once!(line, key, partial.radiation, parse_bool(value, line)?)
            }
            ("solver", "linear_backend") => {
                set_once!(line, key, partial.linear_backend, value.to_string())
            }
            ("solver", "linear_tolerance") => set_once!(
                line,
                key,
                partial.linear_tolerance,
                parse_quantity(value, &[], line, key)?
            ),
            ("solver", "newton_tolerance") => set_once!(
                line,
                key,
                partial.newton_tolerance,
                parse_quantity(value, &[], line, key)?
            ),
            ("solver", "max_newton_iterations") => set_once!(
                line,
                key,
                partial.max_newton_iterations,
                parse_count(value, line, key)?
            ),
            ("solver", "max_step_halvings") => set_once!(
                line,
                key,
                partial.max_step_halvings,
                parse_count(value, line, key)?
            ),
            ("output", "prefix") => {
                set_once!(line, key, partial.output_prefix, value.to_string())
            }
            (section_name, key) => {
                return Err(ConfigError::UnknownKey {
                    line,
                    section: section_name.to_string(),
                    key: key.to_string(),
                })
            }
        }
    }

    finalize(partial)
}

fn finalize(partial: PartialConfig) -> Result<RunConfig, ConfigError> {
    let mut missing = Vec::new();
    macro_rules! required {
        ($slot:expr, $name:expr) => {
            match &$slot {
                Some(v) => Some(v.clone()),
                None => {
                    missing.push($name.to_string());
                    None
                }
            }
        };
    }

    let length = required!(partial.length, "geometry.length");
    let height = required!(partial.height, "geometry.height");
    let nx = required!(partial.nx, "geometry.nx");
    let ny = required!(partial.ny, "geometry.ny");
    let waypoints = required!(partial.waypoints, "vasculature.waypoints");
    let thickness = required!(partial.thickness, "material.thickness");
    let convective = required!(
        partial.convective_coefficient,
        "material.convective_coefficient"
    );
    let emissivity = required!(partial.emissivity, "material.emissivity");
    let mass_flow_rate = required!(partial.mass_flow_rate, "flow.mass_flow_rate");
    let fluid_heat_capacity = required!(partial.fluid_heat_capacity, "flow.fluid_heat_capacity");
    let inlet_temperature = required!(partial.inlet_temperature, "flow.inlet_temperature");
    let source_value = required!(partial.source_value, "source.value");
    let ambient = required!(partial.ambient_temperature, "boundary.ambient_temperature");

    let tensor_parts = [
        partial.conductivity_xx,
        partial.conductivity_xy,
        partial.conductivity_yy,
    ];
    let conductivity = match (partial.conductivity_iso, tensor_parts) {
        (Some(_), [Some(_), ..] | [_, Some(_), _] | [.., Some(_)]) => {
            return Err(ConfigError::BadValue {
                line: 0,
                message: "give either 'conductivity' or the three tensor components, not both"
                    .to_string(),
            })
        }
        (Some(k), _) => Some(ConductivityConfig::Isotropic(k)),
        (None, [Some(xx), Some(xy), Some(yy)]) => {
            Some(ConductivityConfig::Tensor { xx, xy, yy })
        }
        (None, [None, None, None]) => {
            missing.push("material.conductivity".to_string());
            None
        }
        _ => {
            return Err(ConfigError::BadValue {
                line: 0,
                message:
                    "anisotropic conductivity needs all of conductivity_xx, conductivity_xy, conductivity_yy"
                        .to_string(),
            })
        }
    };

    if !missing.is_empty() {
        return Err(ConfigError::MissingKeys { keys: missing });
    }

    let mut settings = SolveSettings::default();
    if let Some(v) = partial.linear_tolerance {
        settings.linear_tolerance = v;
    }
    if let Some(v) = partial.newton_tolerance {
        settings.newton_tolerance = v;
    }
    if let Some(v) = partial.max_newton_iterations {
        settings.max_newton_iterations = v;
    }
    if let Some(v) = partial.max_step_halvings {
        settings.max_step_halvings = v;
    }
    if let Some(v) = partial.linear_backend {
        settings.linear_backend = v;
    }

    Ok(RunConfig {
        geometry: GeometryConfig {
            length: length.unwrap(),
            height: height.unwrap(),
            nx: nx.unwrap(),
            ny: ny.unwrap(),
        },
        waypoints: waypoints.unwrap(),
        material: MaterialConfig {
            thickness: thickness.unwrap(),
            conductivity: conductivity.unwrap(),
            convective_coefficient: convective.unwrap(),
            emissivity: emissivity.unwrap(),
            stefan_boltzmann: partial.stefan_boltzmann.unwrap_or(STEFAN_BOLTZMANN),
        },
        flow: FlowConfig {
            mass_flow_rate: mass_flow_rate.unwrap(),
            fluid_heat_capacity: fluid_heat_capacity.unwrap(),
            inlet_temperature: inlet_temperature.unwrap(),
        },
        source: SourceConfig {
            value: source_value.unwrap(),
            region: partial.source_region,
        },
        boundary: BoundaryConfig {
            ambient_temperature: ambient.unwrap(),
            sides: [
                partial.sides[0].unwrap_or(SideCondition::Adiabatic),
                partial.sides[1].unwrap_or(SideCondition::Adiabatic),
                partial.sides[2].unwrap_or(SideCondition::Adiabatic),
                partial.sides[3].unwrap_or(SideCondition::Adiabatic),
            ],
        },
        solver: SolverConfig {
            radiation: partial.radiation.unwrap_or(true),
            settings,
        },
        output_prefix: partial.output_prefix,
    })
}

impl RunConfig {
    /// Heat capacity rate in W/K.
    pub fn heat_capacity_rate(&self) -> f64 {
        self.flow.mass_flow_rate * self.flow.fluid_heat_capacity
    }

    /// Canonical SI serialization; `parse_config` of the result reproduces
    /// the config exactly.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let g = &self.geometry;
        out.push_str("[geometry]\n");
        out.push_str(&format!("length = {} m\n", g.length));
        out.push_str(&format!("height = {} m\n", g.height));
        out.push_str(&format!("nx = {}\nny = {}\n\n", g.nx, g.ny));

        out.push_str("[vasculature]\n");
        out.push_str("waypoints =");
        for p in &self.waypoints {
            out.push_str(&format!(" ({}, {})", p[0], p[1]));
        }
        out.push_str("\n\n");

        let m = &self.material;
        out.push_str("[material]\n");
        out.push_str(&format!("thickness = {} m\n", m.thickness));
        match m.conductivity {
            ConductivityConfig::Isotropic(k) => {
                out.push_str(&format!("conductivity = {k} W/m/K\n"));
            }
            ConductivityConfig::Tensor { xx, xy, yy } => {
                out.push_str(&format!("conductivity_xx = {xx} W/m/K\n"));
                out.push_str(&format!("conductivity_xy = {xy} W/m/K\n"));
                out.push_str(&format!("conductivity_yy = {yy} W/m/K\n"));
            }
        }
        out.push_str(&format!(
            "convective_coefficient = {} W/m^2/K\n",
            m.convective_coefficient
        ));
        out.push_str(&format!("emissivity = {}\n", m.emissivity));
        out.push_str(&format!(
            "stefan_boltzmann = {} W/m^2/K^4\n\n",
            m.stefan_boltzmann
        ));

        let f = &self.flow;
        out.push_str("[flow]\n");
        out.push_str(&format!("mass_flow_rate = {} kg/s\n", f.mass_flow_rate));
        out.push_str(&format!(
            "fluid_heat_capacity = {} J/kg/K\n",
            f.fluid_heat_capacity
        ));
        out.push_str(&format!(
            "inlet_temperature = {} K\n\n",
            f.inlet_temperature
        ));

        out.push_str("[source]\n");
        out.push_str(&format!("value = {} W/m^2\n", self.source.value));
        if let Some(r) = self.source.region {
            out.push_str(&format!("region = {} {} {} {}\n", r[0], r[1], r[2], r[3]));
        }
        out.push('\n');

        out.push_str("[boundary]\n");
        out.push_str(&format!(
            "ambient_temperature = {} K\n",
            self.boundary.ambient_temperature
        ));
        for (side, cond) in Side::ALL.iter().zip(&self.boundary.sides) {
            let text = match cond {
                SideCondition::Adiabatic => "adiabatic".to_string(),
                SideCondition::Flux(q) => format!("flux {q} W/m"),
                SideCondition::Temperature(t) => format!("temperature {t} K"),
            };
            out.push_str(&format!("{} = {}\n", side.key(), text));
        }
        out.push('\n');

        let s = &self.solver;
        out.push_str("[solver]\n");
        out.push_str(&format!(
            "radiation = {}\n",
            if s.radiation { "on" } else { "off" }
        ));
        out.push_str(&format!("linear_backend = {}\n", s.settings.linear_backend));
        out.push_str(&format!(
            "linear_tolerance = {}\n",
            s.settings.linear_tolerance
        ));
        out.push_str(&format!(
            "newton_tolerance = {}\n",
            s.settings.newton_tolerance
        ));
        out.push_str(&format!(
            "max_newton_iterations = {}\n",
            s.settings.max_newton_iterations
        ));
        out.push_str(&format!(
            "max_step_halvings = {}\n",
            s.settings.max_step_halvings
        ));
        if let Some(prefix) = &self.output_prefix {
            out.push_str(&format!("\n[output]\nprefix = {prefix}\n"));
        }
        out
    }

    /// Builds the mesh, tags boundary sides, embeds the vasculature, and
    /// assembles the full problem description.
    pub fn build_problem(&self) -> Result<ThermalProblem, ConfigError> {
        let g = &self.geometry;
        let mut mesh = generate_rect_mesh(g.length, g.height, g.nx, g.ny)?;
        let tolerance = 1e-9 * (g.length.hypot(g.height));

        let side_of = |mesh: &Mesh, nodes: [usize; 2]| -> Side {
            let a = mesh.nodes[nodes[0]];
            let b = mesh.nodes[nodes[1]];
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            if mid[0] < tolerance {
                Side::Left
            } else if (g.length - mid[0]).abs() < tolerance {
                Side::Right
            } else if mid[1] < tolerance {
                Side::Bottom
            } else {
                Side::Top
            }
        };

        let mut edge_conditions = Vec::with_capacity(mesh.boundary_edges.len());
        let sides: Vec<Side> = mesh
            .boundary_edges
            .iter()
            .map(|e| side_of(&mesh, e.nodes))
            .collect();
        for (edge, side) in mesh.boundary_edges.iter_mut().zip(&sides) {
            let idx = Side::ALL.iter().position(|s| s == side).unwrap();
            match self.boundary.sides[idx] {
                SideCondition::Adiabatic => {
                    edge.tag = BoundaryTag::Flux;
                    edge_conditions.push(EdgeCondition::Flux(0.0));
                }
                SideCondition::Flux(q) => {
                    edge.tag = BoundaryTag::Flux;
                    edge_conditions.push(EdgeCondition::Flux(q));
                }
                SideCondition::Temperature(t) => {
                    edge.tag = BoundaryTag::Temperature;
                    edge_conditions.push(EdgeCondition::Temperature(t));
                }
            }
        }

        let heat_source = match self.source.region {
            None => HeatSource::Uniform(self.source.value),
            Some([x0, y0, x1, y1]) => {
                let values = mesh
                    .triangles
                    .iter()
                    .map(|tri| {
                        let cx =
                            (mesh.nodes[tri[0]][0] + mesh.nodes[tri[1]][0] + mesh.nodes[tri[2]][0])
                                / 3.0;
                        let cy =
                            (mesh.nodes[tri[0]][1] + mesh.nodes[tri[1]][1] + mesh.nodes[tri[2]][1])
                                / 3.0;
                        if cx >= x0 && cx <= x1 && cy >= y0 && cy <= y1 {
                            self.source.value
                        } else {
                            0.0
                        }
                    })
                    .collect();
                HeatSource::PerTriangle(values)
            }
        };

        let path = embed_vasculature(&mesh, &self.waypoints)?;

        Ok(ThermalProblem {
            mesh,
            path,
            material: MaterialParams {
                thickness: self.material.thickness,
                conductivity: Conductivity::Constant(self.material.conductivity.tensor()),
                convective_coefficient: self.material.convective_coefficient,
                emissivity: self.material.emissivity,
                stefan_boltzmann: self.material.stefan_boltzmann,
            },
            flow: VasculatureFlow {
                mass_flow_rate: self.flow.mass_flow_rate,
                fluid_heat_capacity: self.flow.fluid_heat_capacity,
                inlet_temperature: self.flow.inlet_temperature,
            },
            loads: SourcesAndBcs {
                heat_source,
                ambient_temperature: self.boundary.ambient_temperature,
                edge_conditions,
            },
            radiation_enabled: self.solver.radiation,
        })
    }
}

/// Parameters a sweep can vary. Values are supplied in SI units.
pub const SWEEP_PARAMETERS: [&str; 3] = ["mass_flow_rate", "inlet_temperature", "f0"];

/// Applies a sweep parameter value to a copy of the config.
pub fn apply_sweep_parameter(
    config: &RunConfig,
    parameter: &str,
    value: f64,
) -> Result<RunConfig, ConfigError> {
    let mut varied = config.clone();
    match parameter {
        "mass_flow_rate" => varied.flow.mass_flow_rate = value,
        "inlet_temperature" => varied.flow.inlet_temperature = value,
        "f0" => varied.source.value = value,
        other => {
            return Err(ConfigError::BadValue {
                line: 0,
                message: format!(
                    "unknown sweep parameter '{other}', expected one of: {}",
                    SWEEP_PARAMETERS.join(", ")
                ),
            })
        }
    }
    Ok(varied)
}
