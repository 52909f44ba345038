//! Numerical oracles for the qualitative properties of the plate model:
//! minimum, maximum, and comparison principles, stability under perturbed
//! inputs, the constant-source/adiabatic orderings, and an empirical
//! uniqueness spot check for the radiative model.
//!
//! Every oracle is a strategy behind [`PrincipleCheck`], registered by name
//! and selectable at runtime. Oracles never mutate their inputs, and an
//! input that violates a property's hypotheses yields an explicit
//! `NotApplicable` status rather than a silent pass.

mod checks;

use serde::Serialize;
use thiserror::Error;

pub use checks::{
    check_comparison, check_maximum_principle, check_minimum_principle, check_radiative_uniqueness,
    check_special_case, check_stability, StabilityPerturbation,
};

use crate::model::ThermalProblem;
use crate::solver::{SolveError, SolveSettings, TemperatureField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// Outcome of one oracle run.
#[derive(Clone, Debug, Serialize)]
pub struct PrincipleReport {
    /// Registry name of the oracle that produced this report.
    pub principle: String,
    pub status: CheckStatus,
    /// The bound constant the field was checked against, when one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_value: Option<f64>,
    /// The extreme field value participating in the check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_extreme: Option<f64>,
    /// Signed exceedance clipped at zero; `violation <= tolerance` iff pass.
    pub violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_node: Option<usize>,
    pub tolerance: f64,
    /// Human-readable context: hypothesis failures, perturbation sizes, ...
    pub detail: String,
}

impl PrincipleReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }

    pub(crate) fn not_applicable(principle: &str, tolerance: f64, reason: String) -> Self {
        PrincipleReport {
            principle: principle.to_string(),
            status: CheckStatus::NotApplicable,
            bound_value: None,
            field_extreme: None,
            violation: 0.0,
            worst_node: None,
            tolerance,
            detail: reason,
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("mismatched discretizations: {0}")]
    MeshMismatch(String),
    #[error("solve failed{}: {source}", match .guess_index {
        Some(g) => format!(" for initial guess {g}"),
        None => String::new(),
    })]
    Solve {
        guess_index: Option<usize>,
        #[source]
        source: SolveError,
    },
    #[error("radiative uniqueness check needs at least one initial guess")]
    NoGuesses,
    #[error("unknown check '{requested}', known checks: {known}")]
    UnknownCheck { requested: String, known: String },
}

/// A solved configuration handed to the oracles.
#[derive(Clone, Copy)]
pub struct Scenario<'a> {
    pub problem: &'a ThermalProblem,
    pub field: &'a TemperatureField,
}

/// Inputs for one oracle run. Single-scenario oracles use `primary`;
/// the comparison oracle needs `secondary` as the larger-input side.
pub struct CheckContext<'a> {
    pub primary: Scenario<'a>,
    pub secondary: Option<Scenario<'a>>,
    /// Settings for oracles that run their own solves.
    pub settings: &'a SolveSettings,
    /// Absolute tolerance for bound checks.
    pub tolerance: f64,
    /// Relative slack for the stability bound.
    pub relative_tolerance: f64,
    /// Perturbation magnitude for the stability oracle, in Kelvin.
    pub stability_delta: f64,
    /// Uniform offsets above ambient used as initial guesses by the
    /// radiative uniqueness oracle.
    pub uniqueness_offsets: Vec<f64>,
}

impl<'a> CheckContext<'a> {
    pub fn new(primary: Scenario<'a>, settings: &'a SolveSettings) -> Self {
        CheckContext {
            tolerance: default_tolerance(primary.problem),
            primary,
            secondary: None,
            settings,
            relative_tolerance: 1e-6,
            stability_delta: 1.0,
            uniqueness_offsets: vec![0.0, 100.0],
        }
    }
}

/// One verification strategy.
pub trait PrincipleCheck {
    /// Registry name, e.g. `minimum-principle`.
    fn name(&self) -> &'static str;
    /// One-line description for listings.
    fn summary(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext) -> Result<PrincipleReport, VerifyError>;
}

/// Default oracle tolerance: `1e-6` times the dynamic range of the bound
/// constants, floored to keep constant-input problems checkable.
pub fn default_tolerance(problem: &ThermalProblem) -> f64 {
    let candidates = checks::bound_candidates(problem);
    let min = candidates.iter().copied().fold(f64::INFINITY, f64::min);
    let max = candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (1e-6 * (max - min)).max(1e-9)
}

struct MinimumPrinciple;
struct MaximumPrinciple;
struct Comparison;
struct Stability;
struct SpecialCaseBounds;
struct RadiativeUniqueness;

impl PrincipleCheck for MinimumPrinciple {
    fn name(&self) -> &'static str {
        "minimum-principle"
    }
    fn summary(&self) -> &'static str {
        "field bounded below by the smallest of ambient, inlet, and prescribed temperatures"
    }
    fn run(&self, ctx: &CheckContext) -> Result<PrincipleReport, VerifyError> {
        Ok(check_minimum_principle(
            ctx.primary.field,
            ctx.primary.problem,
            ctx.tolerance,
        ))
    }
}

impl PrincipleCheck for MaximumPrinciple {
    fn name(&self) -> &'static str {
        "maximum-principle"
    }
    fn summary(&self) -> &'static str {
        "field bounded above by the largest of ambient, inlet, and prescribed temperatures"
    }
    fn run(&self, ctx: &CheckContext) -> Result<PrincipleReport, VerifyError> {
        Ok(check_maximum_principle(
            ctx.primary.field,
            ctx.primary.problem,
            ctx.tolerance,
        ))
    }
}

impl PrincipleCheck for Comparison {
    fn name(&self) -> &'static str {
        "comparison"
    }
    fn summary(&self) -> &'static str {
        "pointwise ordering of two solutions under ordered inputs"
    }
    fn run(&self, ctx: &CheckContext) -> Result<PrincipleReport, VerifyError> {
        let Some(secondary) = ctx.secondary else {
            return Ok(PrincipleReport::not_applicable(
                self.name(),
                ctx.tolerance,
                "comparison requires two configurations".to_string(),
            ));
        };
        check_comparison(
            ctx.primary.field,
            secondary.field,
            ctx.primary.problem,
            secondary.problem,
            ctx.tolerance,
        )
    }
}

impl PrincipleCheck for Stability {
    fn name(&self) -> &'static str {
        "stability"
    }
    fn summary(&self) -> &'static str {
        "solution shift bounded by the largest perturbation of the temperature inputs"
    }
    fn run(&self, ctx: &CheckContext) -> Result<PrincipleReport, VerifyError> {
        let delta = ctx.stability_delta;
        let mut worst: Option<PrincipleReport> = None;
        for perturbation in [
            StabilityPerturbation {
                d_ambient: delta,
                d_inlet: 0.0,
                d_boundary: 0.0,
            },
            StabilityPerturbation {
                d_ambient: 0.0,
                d_inlet: delta,
                d_boundary: 0.0,
            },
            StabilityPerturbation {
                d_ambient: delta,
                d_inlet: delta,
                d_boundary: delta,
            },
        ] {
            let report = check_stability(
                ctx.primary.problem,
                perturbation,
                ctx.relative_tolerance,
                ctx.settings,
            )?;
            let replace = match &worst {
                None => true,
                Some(prev) => {
                    report.violation > prev.violation
                        || prev.status == CheckStatus::Pass && report.status != CheckStatus::Pass
                }
            };
            if replace {
                worst = Some(report);
            }
        }
        Ok(worst.expect("at least one perturbation ran"))
    }
}

impl PrincipleCheck for SpecialCaseBounds {
    fn name(&self) -> &'static str {
        "special-case-bounds"
    }
    fn summary(&self) -> &'static str {
        "inlet/steady-state orderings of field, mean, and outlet under a constant source with adiabatic boundaries"
    }
    fn run(&self, ctx: &CheckContext) -> Result<PrincipleReport, VerifyError> {
        Ok(check_special_case(
            ctx.primary.field,
            ctx.primary.problem,
            ctx.tolerance,
        ))
    }
}

impl PrincipleCheck for RadiativeUniqueness {
    fn name(&self) -> &'static str {
        "radiative-uniqueness"
    }
    fn summary(&self) -> &'static str {
        "distinct non-negative initial guesses converge to the same non-negative field"
    }
    fn run(&self, ctx: &CheckContext) -> Result<PrincipleReport, VerifyError> {
        let problem = ctx.primary.problem;
        if !problem.radiation_enabled {
            return Ok(PrincipleReport::not_applicable(
                self.name(),
                ctx.tolerance,
                "radiation is disabled; the solve is linear and uniqueness is exact".to_string(),
            ));
        }
        let n = problem.mesh.node_count();
        let ambient = problem.loads.ambient_temperature;
        let guesses: Vec<Vec<f64>> = ctx
            .uniqueness_offsets
            .iter()
            .map(|offset| vec![(ambient + offset).max(0.0); n])
            .collect();
        check_radiative_uniqueness(problem, &guesses, ctx.tolerance, ctx.settings)
    }
}

/// All registered oracles, in presentation order.
pub fn registered_checks() -> Vec<Box<dyn PrincipleCheck>> {
    vec![
        Box::new(MinimumPrinciple),
        Box::new(MaximumPrinciple),
        Box::new(Comparison),
        Box::new(Stability),
        Box::new(SpecialCaseBounds),
        Box::new(RadiativeUniqueness),
    ]
}

/// Looks an oracle up by its registry name.
pub fn check_by_name(name: &str) -> Option<Box<dyn PrincipleCheck>> {
    registered_checks().into_iter().find(|c| c.name() == name)
}

/// Names of all registered oracles.
pub fn check_names() -> Vec<&'static str> {
    registered_checks().iter().map(|c| c.name()).collect()
}

/// Runs the named oracles (all registered ones when `names` is empty).
pub fn run_checks(
    ctx: &CheckContext,
    names: &[String],
) -> Result<Vec<PrincipleReport>, VerifyError> {
    let selected: Vec<Box<dyn PrincipleCheck>> = if names.is_empty() {
        registered_checks()
    } else {
        let mut list = Vec::new();
        for name in names {
            match check_by_name(name) {
                Some(c) => list.push(c),
                None => {
                    return Err(VerifyError::UnknownCheck {
                        requested: name.clone(),
                        known: check_names().join(", "),
                    })
                }
            }
        }
        list
    };
    selected.iter().map(|c| c.run(ctx)).collect()
}
