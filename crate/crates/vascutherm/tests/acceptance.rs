//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).

mod common;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{dense_oracle, ordered_partner, random_problem, DrawStyle};
use vascutherm::analysis::{
    cooling_efficiency, energy_balance_residual, hss_temperature, metrics_report,
};
use vascutherm::assembly;
use vascutherm::config::parse_config;
use vascutherm::mesh::{embed_vasculature, generate_rect_mesh};
use vascutherm::model::*;
use vascutherm::solver::{solve_linear, solve_radiative, SolveSettings, TemperatureField};
use vascutherm::verify::{
    check_comparison, check_maximum_principle, check_minimum_principle, check_stability,
    default_tolerance, CheckStatus, StabilityPerturbation,
};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(format!($($arg)+));
        }
    };
}

fn criterion(number: u32, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("criterion {number:02} ({name}): PASS"),
        Err(message) => {
            println!("criterion {number:02} ({name}): FAIL - {message}");
            panic!("criterion {number:02} ({name}) failed: {message}");
        }
    }
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../configs/{name}"))
}

fn load_problem(name: &str) -> (vascutherm::RunConfig, ThermalProblem) {
    let text = std::fs::read_to_string(config_path(name)).expect("config readable");
    let config = parse_config(&text).expect("config parses");
    let problem = config.build_problem().expect("geometry builds");
    problem.validate().expect("problem valid");
    (config, problem)
}

fn solve_any(
    problem: &ThermalProblem,
    settings: &SolveSettings,
) -> Result<TemperatureField, String> {
    let result = if problem.radiation_enabled {
        solve_radiative(problem, settings, None)
    } else {
        solve_linear(problem, settings)
    };
    result.map_err(|e| format!("solve failed: {e}"))
}

/// Criterion 8 applies to every converged solve in the suite.
fn energy_balance_ok(problem: &ThermalProblem, field: &TemperatureField) -> Result<f64, String> {
    let residual =
        energy_balance_residual(field, problem).map_err(|e| format!("audit failed: {e}"))?;
    ensure!(
        residual <= 1e-6,
        "energy balance residual {residual:.3e} exceeds 1e-6"
    );
    Ok(residual)
}

#[test]
fn c01_uniform_no_flow_steady_state() {
    criterion(1, "uniform no-flow steady state, radiative", || {
        let (config, problem) = load_problem("no_flow.cfg");
        ensure!(
            problem.mesh.node_count() == 101 * 101,
            "expected a 100x100 mesh"
        );
        let started = Instant::now();
        let field = solve_any(&problem, &config.solver.settings)?;
        let elapsed = started.elapsed();
        ensure!(
            elapsed < Duration::from_secs(5),
            "solve took {elapsed:?}, limit is 5 s"
        );

        let steady = hss_temperature(500.0, 13.0, 0.95, STEFAN_BOLTZMANN, 298.15)
            .map_err(|e| e.to_string())?;
        ensure!(
            (steady - 323.8).abs() <= 0.05,
            "steady state {steady} outside 323.8 +/- 0.05"
        );
        let worst = field
            .values
            .iter()
            .fold(0.0f64, |acc, &v| acc.max((v - steady).abs()));
        ensure!(
            worst <= 1e-6,
            "largest nodal deviation from the steady state is {worst:.3e}, limit 1e-6"
        );
        energy_balance_ok(&problem, &field)?;
        Ok(())
    });
}

#[test]
fn c02_pure_convection_closed_form() {
    criterion(2, "pure-convection closed form", || {
        let mesh = generate_rect_mesh(0.1, 0.1, 100, 100).unwrap();
        let path = embed_vasculature(&mesh, &[[0.0, 0.05], [0.1, 0.05]]).unwrap();
        let edge_conditions = vec![EdgeCondition::Flux(0.0); mesh.boundary_edges.len()];
        let problem = ThermalProblem {
            mesh,
            path,
            material: MaterialParams {
                thickness: 4.31e-3,
                conductivity: Conductivity::Constant(ConductivityTensor::isotropic(0.5593)),
                convective_coefficient: 13.0,
                emissivity: 0.0,
                stefan_boltzmann: STEFAN_BOLTZMANN,
            },
            flow: VasculatureFlow {
                mass_flow_rate: 0.0,
                fluid_heat_capacity: 4183.0,
                inlet_temperature: 300.0,
            },
            loads: SourcesAndBcs {
                heat_source: HeatSource::Uniform(130.0),
                ambient_temperature: 300.0,
                edge_conditions,
            },
            radiation_enabled: false,
        };
        let started = Instant::now();
        let field = solve_any(&problem, &SolveSettings::default())?;
        let elapsed = started.elapsed();
        ensure!(
            elapsed < Duration::from_secs(1),
            "solve took {elapsed:?}, limit is 1 s"
        );
        for &v in &field.values {
            ensure!(
                (v - 310.0).abs() <= 310.0 * 1e-8,
                "nodal value {v} deviates from 310 K beyond 1e-8 relative"
            );
        }
        energy_balance_ok(&problem, &field)?;
        Ok(())
    });
}

#[test]
fn c03_cooling_efficiency_formula() {
    criterion(3, "cooling-efficiency formula", || {
        // Formula-level check on the published quadruple; the corresponding
        // end-to-end mean temperature depends on the unpublished channel
        // layout and is not reproduced.
        let eta = cooling_efficiency(323.8, 288.63, 280.0, 295.15).map_err(|e| e.to_string())?;
        ensure!(
            (eta - 0.803).abs() <= 1e-3,
            "efficiency {eta} outside 0.803 +/- 0.001"
        );
        Ok(())
    });
}

#[test]
fn c04_hot_inlet_cools_through_heated_plate() {
    criterion(4, "hot inlet leaves cooler than it entered", || {
        let (config, problem) = load_problem("quarter_source.cfg");
        ensure!(
            problem.mesh.node_count() >= 10_000,
            "expected ~1e4 nodes, got {}",
            problem.mesh.node_count()
        );
        let started = Instant::now();
        let field = solve_any(&problem, &config.solver.settings)?;
        let elapsed = started.elapsed();
        ensure!(
            elapsed < Duration::from_secs(10),
            "solve took {elapsed:?}, limit is 10 s"
        );

        let outlet = field.values[problem.path.outlet_node()];
        let inlet = problem.flow.inlet_temperature;
        ensure!(
            outlet < inlet,
            "outlet {outlet} is not below the inlet {inlet}"
        );
        let minimum = field.values.iter().copied().fold(f64::INFINITY, f64::min);
        let ambient = problem.loads.ambient_temperature;
        ensure!(
            minimum >= ambient - 1e-3,
            "minimum {minimum} undercuts ambient {ambient} by more than 1e-3"
        );
        let report = check_minimum_principle(&field, &problem, 1e-3);
        ensure!(
            report.status == CheckStatus::Pass,
            "minimum-principle oracle did not pass: {}",
            report.detail
        );
        energy_balance_ok(&problem, &field)?;
        Ok(())
    });
}

#[test]
fn c05_performance_coefficient_exceeds_one() {
    criterion(
        5,
        "cold inlet pushes the performance ratio above one",
        || {
            let (config, problem) = load_problem("cold_inlet.cfg");
            let started = Instant::now();
            let field = solve_any(&problem, &config.solver.settings)?;
            let elapsed = started.elapsed();
            ensure!(
                elapsed < Duration::from_secs(10),
                "solve took {elapsed:?}, limit is 10 s"
            );
            let metrics = metrics_report(&problem, &field).map_err(|e| e.to_string())?;
            let cop = metrics
                .coefficient_of_performance
                .ok_or("coefficient of performance missing")?;
            ensure!(cop > 1.0, "coefficient of performance {cop} is not above 1");
            energy_balance_ok(&problem, &field)?;
            Ok(())
        },
    );
}

#[test]
fn c06_principle_campaign() {
    criterion(6, "randomized principle campaign", || {
        let started = Instant::now();
        let settings = SolveSettings::default();

        // 50 problems satisfying the lower-bound hypotheses.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for case in 0..50 {
            let radiation = case % 2 == 0;
            let problem = random_problem(&mut rng, DrawStyle::MinimumHypotheses, radiation);
            ensure!(
                assembly::max_segment_peclet(&problem) < 2.0,
                "case {case}: draw exceeded the Peclet cap"
            );
            let field = solve_any(&problem, &settings)?;
            let report = check_minimum_principle(&field, &problem, default_tolerance(&problem));
            ensure!(
                report.status == CheckStatus::Pass,
                "minimum principle case {case}: {:?} (violation {:.3e} at node {:?})",
                report.status,
                report.violation,
                report.worst_node
            );
            energy_balance_ok(&problem, &field).map_err(|e| format!("min case {case}: {e}"))?;
        }

        // 50 mirrored problems for the upper bound.
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for case in 0..50 {
            let radiation = case % 2 == 0;
            let problem = random_problem(&mut rng, DrawStyle::MaximumHypotheses, radiation);
            let field = solve_any(&problem, &settings)?;
            let report = check_maximum_principle(&field, &problem, default_tolerance(&problem));
            ensure!(
                report.status == CheckStatus::Pass,
                "maximum principle case {case}: {:?} (violation {:.3e} at node {:?})",
                report.status,
                report.violation,
                report.worst_node
            );
            energy_balance_ok(&problem, &field).map_err(|e| format!("max case {case}: {e}"))?;
        }

        // 50 ordered pairs, half linear and half radiative.
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for case in 0..50 {
            let radiation = case % 2 == 1;
            let lower = random_problem(&mut rng, DrawStyle::MinimumHypotheses, radiation);
            let upper = ordered_partner(&mut rng, &lower);
            let field_lower = solve_any(&lower, &settings)?;
            let field_upper = solve_any(&upper, &settings)?;
            let report = check_comparison(
                &field_lower,
                &field_upper,
                &lower,
                &upper,
                default_tolerance(&lower),
            )
            .map_err(|e| format!("comparison case {case}: {e}"))?;
            ensure!(
                report.status == CheckStatus::Pass,
                "comparison case {case}: {:?} ({})",
                report.status,
                report.detail
            );
            energy_balance_ok(&lower, &field_lower)
                .map_err(|e| format!("comparison case {case} lower: {e}"))?;
            energy_balance_ok(&upper, &field_upper)
                .map_err(|e| format!("comparison case {case} upper: {e}"))?;
        }

        let elapsed = started.elapsed();
        ensure!(
            elapsed < Duration::from_secs(300),
            "campaign took {elapsed:?}, limit is 5 min"
        );
        Ok(())
    });
}

#[test]
fn c07_stability_under_perturbed_inputs() {
    criterion(7, "stability under perturbed temperature inputs", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let settings = SolveSettings::default();
        for case in 0..10 {
            let problem = random_problem(&mut rng, DrawStyle::MinimumHypotheses, false);
            for delta in [0.1, 1.0, 5.0] {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let perturbation = StabilityPerturbation {
                    d_inlet: sign * delta,
                    d_ambient: rng.random_range(-delta..delta),
                    d_boundary: rng.random_range(-delta..delta),
                };
                let report = check_stability(&problem, perturbation, 1e-6, &settings)
                    .map_err(|e| format!("case {case}, delta {delta}: {e}"))?;
                ensure!(
                    report.status == CheckStatus::Pass,
                    "case {case}, delta {delta}: shift {:?} exceeds the bound ({})",
                    report.field_extreme,
                    report.detail
                );
            }
        }
        Ok(())
    });
}

#[test]
fn c08_energy_balance_on_bundled_configurations() {
    criterion(8, "energy balance audit on every bundled run", || {
        // Criteria 1-7 assert the audit on each of their solves; this
        // covers the shipped configurations end to end.
        for name in [
            "baseline.cfg",
            "no_flow.cfg",
            "quarter_source.cfg",
            "cold_inlet.cfg",
        ] {
            let (config, problem) = load_problem(name);
            let field = solve_any(&problem, &config.solver.settings)?;
            let residual =
                energy_balance_ok(&problem, &field).map_err(|e| format!("{name}: {e}"))?;
            ensure!(residual.is_finite(), "{name}: non-finite residual");
        }
        Ok(())
    });
}

#[test]
fn c09_sparse_assembly_matches_dense_oracle() {
    criterion(
        9,
        "sparse assembly and solve match the dense oracle",
        || {
            let settings = SolveSettings::default();
            let cases = oracle_case_problems();
            ensure!(cases.len() >= 5, "expected several oracle cases");
            for (label, problem, iterate) in &cases {
                ensure!(
                    problem.mesh.node_count() <= 50,
                    "{label}: oracle cases must stay at or below 50 nodes"
                );
                let sparse = assembly::assemble(problem, iterate.as_deref())
                    .map_err(|e| format!("{label}: assemble failed: {e}"))?;
                let dense = dense_oracle::assemble_dense(problem, iterate.as_deref());
                let n = sparse.matrix.n_rows;
                ensure!(
                    n == dense.rhs.len(),
                    "{label}: reduced sizes differ ({n} vs {})",
                    dense.rhs.len()
                );
                let sparse_dense = sparse.matrix.to_dense();
                for i in 0..n {
                    for j in 0..n {
                        let diff = (sparse_dense[i][j] - dense.matrix[i][j]).abs();
                        ensure!(
                            diff <= 1e-12,
                            "{label}: matrix entry ({i}, {j}) differs by {diff:.3e}"
                        );
                    }
                    let diff = (sparse.rhs[i] - dense.rhs[i]).abs();
                    ensure!(
                        diff <= 1e-12,
                        "{label}: rhs entry {i} differs by {diff:.3e}"
                    );
                }

                if iterate.is_none() {
                    let field = solve_linear(problem, &settings)
                        .map_err(|e| format!("{label}: solve failed: {e}"))?;
                    let oracle = dense_oracle::solve_dense_linear(problem);
                    for (k, (a, b)) in field.values.iter().zip(&oracle).enumerate() {
                        let diff = (a - b).abs() / b.abs().max(1.0);
                        ensure!(
                            diff <= 1e-10,
                            "{label}: node {k} differs from the dense solve by {diff:.3e} relative"
                        );
                    }
                } else {
                    // Newton-step comparison: same reduced step vector.
                    let step_sparse = vascutherm::solver::backend_by_name("banded-lu")
                        .unwrap()
                        .solve(&sparse.matrix, &sparse.rhs)
                        .map_err(|e| format!("{label}: step solve failed: {e}"))?;
                    let step_dense =
                        dense_oracle::gauss_solve(dense.matrix.clone(), dense.rhs.clone());
                    for (k, (a, b)) in step_sparse.iter().zip(&step_dense).enumerate() {
                        let diff = (a - b).abs() / b.abs().max(1.0);
                        ensure!(
                            diff <= 1e-10,
                            "{label}: Newton step entry {k} differs by {diff:.3e} relative"
                        );
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn c10_newton_converges_quadratically() {
    criterion(10, "final-stage quadratic Newton convergence", || {
        let (config, problem) = load_problem("no_flow.cfg");
        let settings = SolveSettings {
            record_iterates: true,
            ..config.solver.settings.clone()
        };
        let field = solve_radiative(&problem, &settings, None).map_err(|e| e.to_string())?;
        let root = hss_temperature(500.0, 13.0, 0.95, STEFAN_BOLTZMANN, 298.15)
            .map_err(|e| e.to_string())?;
        let errors: Vec<f64> = field
            .info
            .iterate_history
            .iter()
            .map(|iterate| {
                iterate
                    .iter()
                    .fold(0.0f64, |acc, &v| acc.max((v - root).abs()))
            })
            .collect();
        // Ratios e_{k+1} / e_k^2 over the iterations above rounding noise.
        let mut ratios = Vec::new();
        for w in errors.windows(2) {
            if w[0] > 1e-9 && w[1] > 1e-13 {
                ratios.push(w[1] / (w[0] * w[0]));
            }
        }
        ensure!(
            ratios.len() >= 3,
            "need at least 3 measurable contraction ratios, got {ratios:?} from errors {errors:?}"
        );
        for ratio in ratios.iter().rev().take(3) {
            ensure!(
                *ratio <= 1.0,
                "contraction ratio {ratio} exceeds the quadratic bound (errors {errors:?})"
            );
        }
        Ok(())
    });
}

/// Small problems (at most 50 nodes) exercising every operator feature for
/// the oracle-equivalence criterion. The fourth case carries an iterate and
/// checks the radiative Newton system.
fn oracle_case_problems() -> Vec<(String, ThermalProblem, Option<Vec<f64>>)> {
    let mut cases = Vec::new();

    // Smallest mesh, flowing channel along the bottom edge.
    {
        let mesh = generate_rect_mesh(1.0, 1.0, 1, 1).unwrap();
        let path = embed_vasculature(&mesh, &[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let edge_conditions = vec![EdgeCondition::Flux(0.0); mesh.boundary_edges.len()];
        cases.push((
            "2-triangle".to_string(),
            ThermalProblem {
                mesh,
                path,
                material: MaterialParams {
                    thickness: 1.0,
                    conductivity: Conductivity::Constant(ConductivityTensor::isotropic(1.0)),
                    convective_coefficient: 3.0,
                    emissivity: 0.0,
                    stefan_boltzmann: STEFAN_BOLTZMANN,
                },
                flow: VasculatureFlow {
                    mass_flow_rate: 0.5,
                    fluid_heat_capacity: 2.0,
                    inlet_temperature: 300.0,
                },
                loads: SourcesAndBcs {
                    heat_source: HeatSource::Uniform(6.0),
                    ambient_temperature: 295.0,
                    edge_conditions,
                },
                radiation_enabled: false,
            },
            None,
        ));
    }

    // Anisotropic conductivity, an L-shaped channel, and a loaded flux side.
    {
        let mut mesh = generate_rect_mesh(0.2, 0.1, 2, 2).unwrap();
        let path = embed_vasculature(&mesh, &[[0.0, 0.05], [0.1, 0.05], [0.1, 0.1]]).unwrap();
        let mut edge_conditions = vec![EdgeCondition::Flux(0.0); mesh.boundary_edges.len()];
        // Bottom edges carry an inflow.
        for (edge, cond) in mesh.boundary_edges.iter_mut().zip(&mut edge_conditions) {
            let mid_y = (mesh.nodes[edge.nodes[0]][1] + mesh.nodes[edge.nodes[1]][1]) / 2.0;
            if mid_y < 1e-12 {
                *cond = EdgeCondition::Flux(-7.5);
            }
        }
        cases.push((
            "anisotropic-L".to_string(),
            ThermalProblem {
                mesh,
                path,
                material: MaterialParams {
                    thickness: 0.004,
                    conductivity: Conductivity::Constant(ConductivityTensor {
                        kxx: 0.8,
                        kxy: 0.2,
                        kyy: 0.5,
                    }),
                    convective_coefficient: 11.0,
                    emissivity: 0.0,
                    stefan_boltzmann: STEFAN_BOLTZMANN,
                },
                flow: VasculatureFlow {
                    mass_flow_rate: 1e-4,
                    fluid_heat_capacity: 4183.0,
                    inlet_temperature: 310.0,
                },
                loads: SourcesAndBcs {
                    heat_source: HeatSource::Uniform(250.0),
                    ambient_temperature: 296.0,
                    edge_conditions,
                },
                radiation_enabled: false,
            },
            None,
        ));
    }

    // Prescribed-temperature side plus a sub-rectangle source.
    {
        let mut mesh = generate_rect_mesh(0.1, 0.1, 3, 3).unwrap();
        let path = embed_vasculature(&mesh, &[[0.0, 0.1 / 3.0], [0.1, 0.1 / 3.0]]).unwrap();
        let mut edge_conditions = vec![EdgeCondition::Flux(0.0); mesh.boundary_edges.len()];
        for (edge, cond) in mesh.boundary_edges.iter_mut().zip(&mut edge_conditions) {
            let mid_x = (mesh.nodes[edge.nodes[0]][0] + mesh.nodes[edge.nodes[1]][0]) / 2.0;
            if (mid_x - 0.1).abs() < 1e-12 {
                edge.tag = vascutherm::mesh::BoundaryTag::Temperature;
                *cond = EdgeCondition::Temperature(305.0);
            }
        }
        let sources = mesh
            .triangles
            .iter()
            .map(|tri| {
                let cx =
                    (mesh.nodes[tri[0]][0] + mesh.nodes[tri[1]][0] + mesh.nodes[tri[2]][0]) / 3.0;
                if cx < 0.05 {
                    420.0
                } else {
                    0.0
                }
            })
            .collect();
        cases.push((
            "dirichlet-region".to_string(),
            ThermalProblem {
                mesh,
                path,
                material: MaterialParams {
                    thickness: 0.003,
                    conductivity: Conductivity::Constant(ConductivityTensor::isotropic(0.7)),
                    convective_coefficient: 9.0,
                    emissivity: 0.0,
                    stefan_boltzmann: STEFAN_BOLTZMANN,
                },
                flow: VasculatureFlow {
                    mass_flow_rate: 5e-5,
                    fluid_heat_capacity: 4183.0,
                    inlet_temperature: 298.0,
                },
                loads: SourcesAndBcs {
                    heat_source: HeatSource::PerTriangle(sources),
                    ambient_temperature: 295.0,
                    edge_conditions,
                },
                radiation_enabled: false,
            },
            None,
        ));
    }

    // Radiative Newton system at a non-trivial iterate (no flow).
    {
        let mesh = generate_rect_mesh(0.1, 0.1, 4, 4).unwrap();
        let path = embed_vasculature(&mesh, &[[0.0, 0.05], [0.1, 0.05]]).unwrap();
        let edge_conditions = vec![EdgeCondition::Flux(0.0); mesh.boundary_edges.len()];
        let n = mesh.node_count();
        let iterate: Vec<f64> = (0..n).map(|i| 305.0 + (i as f64) * 0.3).collect();
        cases.push((
            "radiative-newton".to_string(),
            ThermalProblem {
                mesh,
                path,
                material: MaterialParams {
                    thickness: 4.31e-3,
                    conductivity: Conductivity::Constant(ConductivityTensor::isotropic(0.5593)),
                    convective_coefficient: 13.0,
                    emissivity: 0.95,
                    stefan_boltzmann: STEFAN_BOLTZMANN,
                },
                flow: VasculatureFlow {
                    mass_flow_rate: 0.0,
                    fluid_heat_capacity: 4183.0,
                    inlet_temperature: 298.15,
                },
                loads: SourcesAndBcs {
                    heat_source: HeatSource::Uniform(500.0),
                    ambient_temperature: 298.15,
                    edge_conditions,
                },
                radiation_enabled: true,
            },
            Some(iterate),
        ));
    }

    // Largest admissible case: 49 nodes, everything mixed.
    {
        let mut mesh = generate_rect_mesh(0.12, 0.06, 6, 6).unwrap();
        let path = embed_vasculature(
            &mesh,
            &[[0.0, 0.03], [0.06, 0.03], [0.06, 0.05], [0.12, 0.05]],
        )
        .unwrap();
        let mut edge_conditions = vec![EdgeCondition::Flux(0.0); mesh.boundary_edges.len()];
        for (edge, cond) in mesh.boundary_edges.iter_mut().zip(&mut edge_conditions) {
            let mid_y = (mesh.nodes[edge.nodes[0]][1] + mesh.nodes[edge.nodes[1]][1]) / 2.0;
            if (mid_y - 0.06).abs() < 1e-12 {
                edge.tag = vascutherm::mesh::BoundaryTag::Temperature;
                *cond = EdgeCondition::Temperature(301.5);
            } else if mid_y < 1e-12 {
                *cond = EdgeCondition::Flux(4.0);
            }
        }
        cases.push((
            "mixed-49-node".to_string(),
            ThermalProblem {
                mesh,
                path,
                material: MaterialParams {
                    thickness: 0.005,
                    conductivity: Conductivity::Constant(ConductivityTensor {
                        kxx: 1.2,
                        kxy: -0.15,
                        kyy: 0.9,
                    }),
                    convective_coefficient: 16.0,
                    emissivity: 0.0,
                    stefan_boltzmann: STEFAN_BOLTZMANN,
                },
                flow: VasculatureFlow {
                    mass_flow_rate: 2e-4,
                    fluid_heat_capacity: 4183.0,
                    inlet_temperature: 303.0,
                },
                loads: SourcesAndBcs {
                    heat_source: HeatSource::Uniform(-120.0),
                    ambient_temperature: 300.0,
                    edge_conditions,
                },
                radiation_enabled: false,
            },
            None,
        ));
    }

    for (label, problem, _) in &cases {
        problem
            .validate()
            .unwrap_or_else(|e| panic!("oracle case {label} invalid: {e:?}"));
    }
    cases
}
