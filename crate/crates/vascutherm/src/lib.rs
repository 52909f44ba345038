//! Finite-element solver and verification toolkit for thermal regulation in
//! thin vascular plates.
//!
//! The model couples in-plane conduction, surface convection, optional
//! surface radiation, and advective heat exchange along a fluid-carrying
//! channel embedded in the plate. Linear triangular elements discretize the
//! plate; the channel conforms to mesh edges and contributes a non-symmetric
//! line term. The convection-only problem is linear; radiation makes it
//! semi-linear and is handled by a damped Newton iteration.
//!
//! Beyond solving, the crate audits qualitative properties of the solutions
//! (minimum/maximum/comparison principles, stability, special-case bounds,
//! and a radiative uniqueness spot check) through a registry of oracle
//! strategies, and reports thermal-performance metrics.

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod config;
pub mod io;
pub mod mesh;
pub mod model;
pub mod solver;
pub mod verify;

pub use analysis::{metrics_report, MetricsReport};
pub use config::{parse_config, RunConfig};
pub use mesh::{embed_vasculature, generate_rect_mesh, Mesh, VasculaturePath};
pub use model::{MaterialParams, SourcesAndBcs, ThermalProblem, VasculatureFlow};
pub use solver::{solve_linear, solve_radiative, SolveSettings, TemperatureField};
