//! Independent dense brute-force assembler and solver used as an oracle.
//!
//! Everything here is computed by a different route than the production
//! path: shape functions are evaluated by solving small Vandermonde systems
//! instead of closed-form gradients, element integrals use explicit
//! quadrature points, the global operator is a dense matrix, constraints are
//! eliminated by dense row/column manipulation, and the solve is a plain
//! Gaussian elimination.

use std::collections::BTreeMap;

use vascutherm::mesh::Mesh;
use vascutherm::model::{EdgeCondition, ThermalProblem};

/// Coefficients (a, b, c) of one linear shape function N(x, y) = a + b x + c y,
/// obtained by solving the 3x3 interpolation system.
fn shape_coefficients(coords: &[[f64; 2]; 3], node: usize) -> [f64; 3] {
    let mut system = [[0.0f64; 4]; 3];
    for k in 0..3 {
        system[k][0] = 1.0;
        system[k][1] = coords[k][0];
        system[k][2] = coords[k][1];
        system[k][3] = if k == node { 1.0 } else { 0.0 };
    }
    // Gaussian elimination on the 3x4 augmented system.
    for j in 0..3 {
        let pivot_row = (j..3)
            .max_by(|&a, &b| system[a][j].abs().partial_cmp(&system[b][j].abs()).unwrap())
            .unwrap();
        system.swap(j, pivot_row);
        let pivot = system[j][j];
        for r in j + 1..3 {
            let factor = system[r][j] / pivot;
            for c in j..4 {
                system[r][c] -= factor * system[j][c];
            }
        }
    }
    let mut coeff = [0.0f64; 3];
    for j in (0..3).rev() {
        let mut value = system[j][3];
        for c in j + 1..3 {
            value -= system[j][c] * coeff[c];
        }
        coeff[j] = value / system[j][j];
    }
    coeff
}

fn area(coords: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((coords[1][0] - coords[0][0]) * (coords[2][1] - coords[0][1])
        - (coords[2][0] - coords[0][0]) * (coords[1][1] - coords[0][1]))
}

fn edge_midpoints(coords: &[[f64; 2]; 3]) -> [[f64; 2]; 3] {
    let mid = |a: [f64; 2], b: [f64; 2]| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    [
        mid(coords[0], coords[1]),
        mid(coords[1], coords[2]),
        mid(coords[2], coords[0]),
    ]
}

fn eval(coeff: &[f64; 3], point: &[f64; 2]) -> f64 {
    coeff[0] + coeff[1] * point[0] + coeff[2] * point[1]
}

/// Dense reduced system mirroring `assembly::assemble` semantics.
pub struct DenseSystem {
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub fixed: BTreeMap<usize, f64>,
    pub free_nodes: Vec<usize>,
}

fn constrained(problem: &ThermalProblem) -> BTreeMap<usize, f64> {
    let mut fixed = problem.dirichlet_nodes();
    if let Some((node, value)) = problem.inlet_constraint() {
        fixed.insert(node, value);
    }
    fixed
}

fn full_operator(problem: &ThermalProblem) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mesh: &Mesh = &problem.mesh;
    let n = mesh.node_count();
    let mut a = vec![vec![0.0f64; n]; n];
    let mut b = vec![0.0f64; n];
    let d = problem.material.thickness;
    let h = problem.material.convective_coefficient;
    let ambient = problem.loads.ambient_temperature;

    for (t, tri) in mesh.triangles.iter().enumerate() {
        let coords = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let coeffs: Vec<[f64; 3]> = (0..3).map(|i| shape_coefficients(&coords, i)).collect();
        let tri_area = area(&coords);
        let k = problem.material.conductivity.at_triangle(t);
        let f = problem.loads.heat_source.at_triangle(t);
        let quad = edge_midpoints(&coords);
        let weight = tri_area / 3.0;

        for i in 0..3 {
            let grad_i = [coeffs[i][1], coeffs[i][2]];
            for j in 0..3 {
                let grad_j = [coeffs[j][1], coeffs[j][2]];
                let k_grad_j = k.apply(grad_j);
                // Constant integrand: one-point (centroid) quadrature is exact.
                let conduction = d * tri_area * (grad_i[0] * k_grad_j[0] + grad_i[1] * k_grad_j[1]);
                // Degree-2 integrand: edge-midpoint rule is exact.
                let mut mass = 0.0;
                for q in &quad {
                    mass += weight * eval(&coeffs[i], q) * eval(&coeffs[j], q);
                }
                a[tri[i]][tri[j]] += conduction + h * mass;
            }
            let mut load = 0.0;
            for q in &quad {
                load += weight * eval(&coeffs[i], q);
            }
            b[tri[i]] += (f + h * ambient) * load;
        }
    }

    // Advective line term by two-point Gauss quadrature per segment.
    let chi = problem.flow.heat_capacity_rate();
    if chi > 0.0 {
        let gauss = [0.5 - 0.5 / 3.0f64.sqrt(), 0.5 + 0.5 / 3.0f64.sqrt()];
        for pair in problem.path.node_sequence.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let p = mesh.nodes[lo];
            let q = mesh.nodes[hi];
            let len = (q[0] - p[0]).hypot(q[1] - p[1]);
            // N_lo = 1 - s/L, N_hi = s/L; d(theta)/ds = (theta_hi - theta_lo)/L.
            for &xi in &gauss {
                let w = len / 2.0;
                let n_lo = 1.0 - xi;
                let n_hi = xi;
                for (node, shape) in [(lo, n_lo), (hi, n_hi)] {
                    a[node][lo] += chi * w * shape * (-1.0 / len);
                    a[node][hi] += chi * w * shape * (1.0 / len);
                }
            }
        }
    }

    // Prescribed boundary fluxes by two-point Gauss over each edge.
    for (edge, cond) in mesh
        .boundary_edges
        .iter()
        .zip(&problem.loads.edge_conditions)
    {
        if let EdgeCondition::Flux(qp) = cond {
            if *qp != 0.0 {
                let p = mesh.nodes[edge.nodes[0]];
                let q = mesh.nodes[edge.nodes[1]];
                let len = (q[0] - p[0]).hypot(q[1] - p[1]);
                for &xi in &[0.5 - 0.5 / 3.0f64.sqrt(), 0.5 + 0.5 / 3.0f64.sqrt()] {
                    let w = len / 2.0;
                    b[edge.nodes[0]] -= qp * w * (1.0 - xi);
                    b[edge.nodes[1]] -= qp * w * xi;
                }
            }
        }
    }

    (a, b)
}

fn radiation_terms(problem: &ThermalProblem, theta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mesh = &problem.mesh;
    let n = mesh.node_count();
    let mut residual = vec![0.0f64; n];
    let mut jacobian = vec![vec![0.0f64; n]; n];
    let eps_sigma = problem.material.emissivity * problem.material.stefan_boltzmann;
    let amb4 = problem.loads.ambient_temperature.powi(4);

    for tri in &mesh.triangles {
        let coords = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let coeffs: Vec<[f64; 3]> = (0..3).map(|i| shape_coefficients(&coords, i)).collect();
        let weight = area(&coords) / 3.0;
        for q in &edge_midpoints(&coords) {
            let mut theta_q = 0.0;
            for i in 0..3 {
                theta_q += eval(&coeffs[i], q) * theta[tri[i]];
            }
            let flux = eps_sigma * (theta_q.powi(4) - amb4);
            let dflux = 4.0 * eps_sigma * theta_q.powi(3);
            for i in 0..3 {
                let ni = eval(&coeffs[i], q);
                residual[tri[i]] += weight * ni * flux;
                for j in 0..3 {
                    let nj = eval(&coeffs[j], q);
                    jacobian[tri[i]][tri[j]] += weight * ni * nj * dflux;
                }
            }
        }
    }
    (residual, jacobian)
}

/// Dense counterpart of `assembly::assemble`: the reduced linear system when
/// `iterate` is `None`, the reduced Newton step system otherwise.
pub fn assemble_dense(problem: &ThermalProblem, iterate: Option<&[f64]>) -> DenseSystem {
    let n = problem.mesh.node_count();
    let fixed = constrained(problem);
    let free_nodes: Vec<usize> = (0..n).filter(|i| !fixed.contains_key(i)).collect();
    let (a, b) = full_operator(problem);

    match iterate {
        None => {
            let mut matrix = vec![vec![0.0; free_nodes.len()]; free_nodes.len()];
            let mut rhs = vec![0.0; free_nodes.len()];
            for (fi, &i) in free_nodes.iter().enumerate() {
                rhs[fi] = b[i];
                for (fj, &j) in free_nodes.iter().enumerate() {
                    matrix[fi][fj] = a[i][j];
                }
                for (&j, &value) in fixed.iter() {
                    rhs[fi] -= a[i][j] * value;
                }
            }
            DenseSystem {
                matrix,
                rhs,
                fixed,
                free_nodes,
            }
        }
        Some(theta) => {
            let mut state = theta.to_vec();
            for (&node, &value) in fixed.iter() {
                state[node] = value;
            }
            let (rad_residual, rad_jacobian) = if problem.material.emissivity > 0.0 {
                radiation_terms(problem, &state)
            } else {
                (vec![0.0; n], vec![vec![0.0; n]; n])
            };
            let mut matrix = vec![vec![0.0; free_nodes.len()]; free_nodes.len()];
            let mut rhs = vec![0.0; free_nodes.len()];
            for (fi, &i) in free_nodes.iter().enumerate() {
                let mut residual_i = -b[i] + rad_residual[i];
                for j in 0..n {
                    residual_i += a[i][j] * state[j];
                }
                rhs[fi] = -residual_i;
                for (fj, &j) in free_nodes.iter().enumerate() {
                    matrix[fi][fj] = a[i][j] + rad_jacobian[i][j];
                }
            }
            DenseSystem {
                matrix,
                rhs,
                fixed,
                free_nodes,
            }
        }
    }
}

/// Plain Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for j in 0..n {
        let pivot_row = (j..n)
            .max_by(|&p, &q| a[p][j].abs().partial_cmp(&a[q][j].abs()).unwrap())
            .unwrap();
        assert!(a[pivot_row][j].abs() > 0.0, "oracle matrix is singular");
        a.swap(j, pivot_row);
        b.swap(j, pivot_row);
        for r in j + 1..n {
            let factor = a[r][j] / a[j][j];
            if factor != 0.0 {
                for c in j..n {
                    a[r][c] -= factor * a[j][c];
                }
                b[r] -= factor * b[j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let mut value = b[j];
        for c in j + 1..n {
            value -= a[j][c] * x[c];
        }
        x[j] = value / a[j][j];
    }
    x
}

/// Full nodal solution of the linear model via the dense oracle route.
pub fn solve_dense_linear(problem: &ThermalProblem) -> Vec<f64> {
    let system = assemble_dense(problem, None);
    let free_values = gauss_solve(system.matrix.clone(), system.rhs.clone());
    let mut full = vec![0.0; problem.mesh.node_count()];
    for (&node, &value) in system.fixed.iter() {
        full[node] = value;
    }
    for (fi, &node) in system.free_nodes.iter().enumerate() {
        full[node] = free_values[fi];
    }
    full
}
