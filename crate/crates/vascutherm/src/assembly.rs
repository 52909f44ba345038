//! Element-level kernels and global sparse operators for the Galerkin form of
//! the plate model: conduction, surface convection, optional surface
//! radiation, the advective line term along the vasculature, prescribed
//! boundary fluxes, and elimination of prescribed-temperature nodes.
//!
//! Assembly is single-threaded and iterates triangles, path segments, and
//! boundary edges in storage order, so repeated runs produce bit-identical
//! operators.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{ConductivityTensor, EdgeCondition, ThermalProblem};

/// `(row, column, value)` entry fed to the CSR builder.
pub type Triplet = (usize, usize, f64);

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a CSR matrix from triplets. Duplicate entries are summed in
    /// insertion order (stable sort), keeping assembly deterministic.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[Triplet]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (i, j, v) = triplets[k];
            assert!(i < n_rows && j < n_cols, "triplet out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        let mut y = vec![0.0; self.n_rows];
        for i in 0..self.n_rows {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        0.0
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                dense[i][self.col_idx[k]] += self.values[k];
            }
        }
        dense
    }

    /// Half bandwidths `(lower, upper)` of the sparsity pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0usize;
        let mut upper = 0usize;
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if i > j {
                    lower = lower.max(i - j);
                } else {
                    upper = upper.max(j - i);
                }
            }
        }
        (lower, upper)
    }
}

/// Mapping between the full nodal numbering and the reduced system of free
/// unknowns after eliminating prescribed-temperature and inlet nodes.
#[derive(Clone, Debug)]
pub struct ConstraintMap {
    /// Node index -> prescribed value, for every constrained node.
    pub fixed: BTreeMap<usize, f64>,
    /// Free unknown index -> node index, ascending.
    pub free_to_node: Vec<usize>,
    /// Node index -> free unknown index, `None` when constrained.
    pub node_to_free: Vec<Option<usize>>,
}

impl ConstraintMap {
    fn build(node_count: usize, fixed: BTreeMap<usize, f64>) -> Self {
        let mut node_to_free = vec![None; node_count];
        let mut free_to_node = Vec::with_capacity(node_count - fixed.len());
        for node in 0..node_count {
            if !fixed.contains_key(&node) {
                node_to_free[node] = Some(free_to_node.len());
                free_to_node.push(node);
            }
        }
        ConstraintMap {
            fixed,
            free_to_node,
            node_to_free,
        }
    }

    pub fn free_count(&self) -> usize {
        self.free_to_node.len()
    }

    /// Expands a free-unknown vector to a full nodal vector with prescribed
    /// values inserted.
    pub fn scatter(&self, free_values: &[f64]) -> Vec<f64> {
        assert_eq!(free_values.len(), self.free_to_node.len());
        let mut full = vec![0.0; self.node_to_free.len()];
        for (&node, &value) in self.fixed.iter() {
            full[node] = value;
        }
        for (f, &node) in self.free_to_node.iter().enumerate() {
            full[node] = free_values[f];
        }
        full
    }
}

/// Reduced sparse system over the free nodal unknowns.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constraints: ConstraintMap,
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("degenerate element: {0}")]
    DegenerateElement(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("negative nodal temperature {value} encountered in a radiation kernel")]
    NegativeNodalTemperature { value: f64 },
    #[error("radiative assembly requires a current temperature iterate")]
    MissingIterate,
    #[error("iterate has {got} entries for {expected} mesh nodes")]
    IterateLengthMismatch { got: usize, expected: usize },
    #[error("node {node} carries conflicting prescribed values {a} and {b}")]
    ConflictingConstraint { node: usize, a: f64, b: f64 },
}

fn triangle_area(c: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]))
}

/// Constant gradients of the three linear shape functions, plus the area.
fn shape_gradients(c: &[[f64; 2]; 3]) -> Result<([[f64; 2]; 3], f64), AssemblyError> {
    let area = triangle_area(c);
    if !(area > 0.0) || !area.is_finite() {
        return Err(AssemblyError::DegenerateElement(format!(
            "signed area {area} (vertices {c:?})"
        )));
    }
    let mut grads = [[0.0; 2]; 3];
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        grads[i][0] = (c[j][1] - c[k][1]) / (2.0 * area);
        grads[i][1] = (c[k][0] - c[j][0]) / (2.0 * area);
    }
    Ok((grads, area))
}

/// Conduction stiffness of one triangle: `d * area * grad_i . K grad_j`.
/// Symmetric positive semidefinite with the constant vector in its kernel.
pub fn element_stiffness(
    coords: &[[f64; 2]; 3],
    conductivity: &ConductivityTensor,
    thickness: f64,
) -> Result<[[f64; 3]; 3], AssemblyError> {
    let (grads, area) = shape_gradients(coords)?;
    let mut ke = [[0.0; 3]; 3];
    for i in 0..3 {
        let kg = conductivity.apply(grads[i]);
        for j in 0..3 {
            ke[i][j] = thickness * area * (kg[0] * grads[j][0] + kg[1] * grads[j][1]);
        }
    }
    Ok(ke)
}

/// Surface-convection contribution of one triangle: the consistent mass
/// matrix `h * area / 12 * [[2,1,1],[1,2,1],[1,1,2]]` and the matching
/// ambient load `h * ambient * area / 3` per node.
pub fn element_convection(
    coords: &[[f64; 2]; 3],
    h_conv: f64,
    ambient: f64,
) -> Result<([[f64; 3]; 3], [f64; 3]), AssemblyError> {
    let (_, area) = shape_gradients(coords)?;
    let scale = h_conv * area / 12.0;
    let mut me = [[scale; 3]; 3];
    for (i, row) in me.iter_mut().enumerate() {
        row[i] *= 2.0;
    }
    let rhs = [h_conv * ambient * area / 3.0; 3];
    Ok((me, rhs))
}

/// Advective exchange along one vasculature segment, on the segment's two
/// nodes ordered by increasing arc-length. Independent of the segment length
/// and intentionally non-symmetric; rows sum to zero.
pub fn element_advection(length: f64, chi: f64) -> Result<[[f64; 2]; 2], AssemblyError> {
    if !(length > 0.0) {
        return Err(AssemblyError::InvalidArgument(format!(
            "segment length must be positive, got {length}"
        )));
    }
    if chi < 0.0 {
        return Err(AssemblyError::InvalidArgument(format!(
            "heat capacity rate must be non-negative, got {chi}"
        )));
    }
    let half = 0.5 * chi;
    Ok([[-half, half], [-half, half]])
}

/// Load vector of one triangle for a piecewise-constant source.
pub fn element_load(coords: &[[f64; 2]; 3], source: f64) -> Result<[f64; 3], AssemblyError> {
    let (_, area) = shape_gradients(coords)?;
    Ok([source * area / 3.0; 3])
}

/// Radiative residual and Jacobian block of one triangle, integrated by the
/// degree-2 exact three-point edge-midpoint rule. Positive weights keep the
/// Jacobian positive semidefinite for non-negative nodal temperatures.
pub fn radiation_contributions(
    coords: &[[f64; 2]; 3],
    emissivity: f64,
    stefan_boltzmann: f64,
    ambient: f64,
    nodal_theta: &[f64; 3],
) -> Result<([f64; 3], [[f64; 3]; 3]), AssemblyError> {
    for &theta in nodal_theta {
        if theta < 0.0 {
            return Err(AssemblyError::NegativeNodalTemperature { value: theta });
        }
    }
    let (_, area) = shape_gradients(coords)?;
    let eps_sigma = emissivity * stefan_boltzmann;
    let amb4 = ambient.powi(4);
    let weight = area / 3.0;

    let mut residual = [0.0; 3];
    let mut jacobian = [[0.0; 3]; 3];
    // Quadrature points are the midpoints of edges (0,1), (1,2), (2,0); the
    // two adjacent shape functions are 1/2 there, the opposite one is 0.
    for (a, b) in [(0usize, 1usize), (1, 2), (2, 0)] {
        let theta_q = 0.5 * (nodal_theta[a] + nodal_theta[b]);
        let flux = eps_sigma * (theta_q.powi(4) - amb4);
        let dflux = 4.0 * eps_sigma * theta_q.powi(3);
        residual[a] += weight * 0.5 * flux;
        residual[b] += weight * 0.5 * flux;
        for &i in &[a, b] {
            for &j in &[a, b] {
                jacobian[i][j] += weight * 0.25 * dflux;
            }
        }
    }
    Ok((residual, jacobian))
}

/// Linear part of the global operator over all nodes: conduction +
/// convection mass + advection, and the load vector including ambient
/// convection and prescribed boundary fluxes.
struct LinearOperator {
    matrix: CsrMatrix,
    rhs: Vec<f64>,
}

fn assemble_linear_operator(problem: &ThermalProblem) -> Result<LinearOperator, AssemblyError> {
    let mesh = &problem.mesh;
    let n = mesh.node_count();
    let h_conv = problem.material.convective_coefficient;
    let ambient = problem.loads.ambient_temperature;
    let chi = problem.flow.heat_capacity_rate();

    let mut triplets: Vec<Triplet> = Vec::with_capacity(mesh.triangle_count() * 9 + 8);
    let mut rhs = vec![0.0; n];

    for (t, tri) in mesh.triangles.iter().enumerate() {
        let coords = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let k = problem.material.conductivity.at_triangle(t);
        let ke = element_stiffness(&coords, &k, problem.material.thickness)?;
        let (me, mrhs) = element_convection(&coords, h_conv, ambient)?;
        let fe = element_load(&coords, problem.loads.heat_source.at_triangle(t))?;
        for i in 0..3 {
            rhs[tri[i]] += fe[i] + mrhs[i];
            for j in 0..3 {
                triplets.push((tri[i], tri[j], ke[i][j] + me[i][j]));
            }
        }
    }

    if chi > 0.0 {
        for (s, pair) in problem.path.node_sequence.windows(2).enumerate() {
            let ae = element_advection(problem.path.segment_lengths[s], chi)?;
            let nodes = [pair[0], pair[1]];
            for i in 0..2 {
                for j in 0..2 {
                    triplets.push((nodes[i], nodes[j], ae[i][j]));
                }
            }
        }
    }

    for (edge, cond) in mesh
        .boundary_edges
        .iter()
        .zip(&problem.loads.edge_conditions)
    {
        if let EdgeCondition::Flux(q) = cond {
            if *q != 0.0 {
                let a = mesh.nodes[edge.nodes[0]];
                let b = mesh.nodes[edge.nodes[1]];
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                rhs[edge.nodes[0]] -= q * len / 2.0;
                rhs[edge.nodes[1]] -= q * len / 2.0;
            }
        }
    }

    Ok(LinearOperator {
        matrix: CsrMatrix::from_triplets(n, n, &triplets),
        rhs,
    })
}

/// Constrained nodes of the problem: prescribed-temperature boundary nodes
/// plus the inlet node while fluid flows. Fails on conflicting values.
pub fn constrained_nodes(problem: &ThermalProblem) -> Result<BTreeMap<usize, f64>, AssemblyError> {
    let mut fixed = problem.dirichlet_nodes();
    if let Some((node, value)) = problem.inlet_constraint() {
        if let Some(&existing) = fixed.get(&node) {
            if existing != value {
                return Err(AssemblyError::ConflictingConstraint {
                    node,
                    a: existing,
                    b: value,
                });
            }
        }
        fixed.insert(node, value);
    }
    Ok(fixed)
}

/// Radiative residual vector and Jacobian triplets over all nodes.
fn radiation_global(
    problem: &ThermalProblem,
    theta: &[f64],
) -> Result<(Vec<f64>, Vec<Triplet>), AssemblyError> {
    let mesh = &problem.mesh;
    let mut residual = vec![0.0; mesh.node_count()];
    let mut triplets = Vec::with_capacity(mesh.triangle_count() * 9);
    for tri in &mesh.triangles {
        let coords = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let nodal = [theta[tri[0]], theta[tri[1]], theta[tri[2]]];
        let (re, je) = radiation_contributions(
            &coords,
            problem.material.emissivity,
            problem.material.stefan_boltzmann,
            problem.loads.ambient_temperature,
            &nodal,
        )?;
        for i in 0..3 {
            residual[tri[i]] += re[i];
            for j in 0..3 {
                triplets.push((tri[i], tri[j], je[i][j]));
            }
        }
    }
    Ok((residual, triplets))
}

/// Residual of the full (unreduced) nodal system at `theta`:
/// `A theta - b`, plus the radiative term when the problem has radiation
/// enabled. Rows of free nodes vanish at a converged solution; rows of
/// constrained nodes carry the discrete reactions.
pub fn full_residual(problem: &ThermalProblem, theta: &[f64]) -> Result<Vec<f64>, AssemblyError> {
    let n = problem.mesh.node_count();
    if theta.len() != n {
        return Err(AssemblyError::IterateLengthMismatch {
            got: theta.len(),
            expected: n,
        });
    }
    let op = assemble_linear_operator(problem)?;
    let mut residual = op.matrix.matvec(theta);
    for i in 0..n {
        residual[i] -= op.rhs[i];
    }
    if problem.radiation_enabled && problem.material.emissivity > 0.0 {
        let (rad, _) = radiation_global(problem, theta)?;
        for i in 0..n {
            residual[i] += rad[i];
        }
    }
    Ok(residual)
}

/// Assembles the reduced sparse system.
///
/// Without a current iterate the result is the linear system `A x = b` over
/// the free unknowns, with constrained couplings moved to the right-hand
/// side. With an iterate (required when radiation is enabled) the result is
/// the Newton step system `J dx = -R` linearized at the iterate; constrained
/// nodes contribute no step.
pub fn assemble(
    problem: &ThermalProblem,
    current: Option<&[f64]>,
) -> Result<SparseSystem, AssemblyError> {
    let n = problem.mesh.node_count();
    let fixed = constrained_nodes(problem)?;
    let constraints = ConstraintMap::build(n, fixed);
    let op = assemble_linear_operator(problem)?;

    let radiative = problem.radiation_enabled;
    if radiative && current.is_none() {
        return Err(AssemblyError::MissingIterate);
    }

    let n_free = constraints.free_count();
    let mut reduced: Vec<Triplet> = Vec::with_capacity(op.matrix.nnz());
    let mut rhs = vec![0.0; n_free];

    match current {
        None => {
            // Direct system: A_ff x = b_f - A_fc theta_c.
            for (f, &node) in constraints.free_to_node.iter().enumerate() {
                rhs[f] = op.rhs[node];
            }
            for i in 0..n {
                let Some(fi) = constraints.node_to_free[i] else {
                    continue;
                };
                for k in op.matrix.row_ptr[i]..op.matrix.row_ptr[i + 1] {
                    let j = op.matrix.col_idx[k];
                    let v = op.matrix.values[k];
                    match constraints.node_to_free[j] {
                        Some(fj) => reduced.push((fi, fj, v)),
                        None => rhs[fi] -= v * constraints.fixed[&j],
                    }
                }
            }
        }
        Some(theta) => {
            if theta.len() != n {
                return Err(AssemblyError::IterateLengthMismatch {
                    got: theta.len(),
                    expected: n,
                });
            }
            // Newton step: J_ff dx = -R_f, evaluated with constraints already
            // embedded in the iterate.
            let mut state = theta.to_vec();
            for (&node, &value) in constraints.fixed.iter() {
                state[node] = value;
            }
            let mut residual = op.matrix.matvec(&state);
            for i in 0..n {
                residual[i] -= op.rhs[i];
            }
            let mut jac_triplets = Vec::new();
            if radiative && problem.material.emissivity > 0.0 {
                let (rad, jt) = radiation_global(problem, &state)?;
                for i in 0..n {
                    residual[i] += rad[i];
                }
                jac_triplets = jt;
            }
            for (f, &node) in constraints.free_to_node.iter().enumerate() {
                rhs[f] = -residual[node];
            }
            for i in 0..n {
                let Some(fi) = constraints.node_to_free[i] else {
                    continue;
                };
                for k in op.matrix.row_ptr[i]..op.matrix.row_ptr[i + 1] {
                    if let Some(fj) = constraints.node_to_free[op.matrix.col_idx[k]] {
                        reduced.push((fi, fj, op.matrix.values[k]));
                    }
                }
            }
            for &(i, j, v) in &jac_triplets {
                if let (Some(fi), Some(fj)) =
                    (constraints.node_to_free[i], constraints.node_to_free[j])
                {
                    reduced.push((fi, fj, v));
                }
            }
        }
    }

    let matrix = CsrMatrix::from_triplets(n_free, n_free, &reduced);
    debug_assert!(
        (0..n_free).all(|i| matrix.row_ptr[i + 1] > matrix.row_ptr[i]),
        "reduced system has a structurally empty row"
    );
    Ok(SparseSystem {
        matrix,
        rhs,
        constraints,
    })
}

/// Largest segment Peclet number `chi * h_seg / (2 d kappa_1)` along the
/// vasculature, with `kappa_1` the uniform lower conductivity bound. Values
/// above 2 put the unstabilized advective term in the oscillatory regime.
pub fn max_segment_peclet(problem: &ThermalProblem) -> f64 {
    let chi = problem.flow.heat_capacity_rate();
    if chi == 0.0 {
        return 0.0;
    }
    let kappa_1 = problem.material.conductivity.min_eigenvalue();
    let denom = 2.0 * problem.material.thickness * kappa_1;
    problem
        .path
        .segment_lengths
        .iter()
        .map(|&h| chi * h / denom)
        .fold(0.0, f64::max)
}
