//! Conforming triangular meshes of rectangular plates with an embedded
//! vasculature polyline whose segments coincide with mesh edges.
//!
//! Node numbering on structured grids is row-major (x fastest), which keeps
//! the assembled operators banded. Each grid cell is split into two
//! counter-clockwise triangles by the diagonal from its lower-left to its
//! upper-right corner.

use std::collections::{BinaryHeap, HashMap, HashSet};

use thiserror::Error;

/// Classification of a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryTag {
    /// Prescribed heat flux (possibly zero, i.e. adiabatic).
    Flux,
    /// Prescribed temperature.
    Temperature,
}

/// An edge on the domain boundary, oriented counter-clockwise around the
/// domain.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Triangulation of a rectangular plate mid-surface.
#[derive(Clone, Debug)]
pub struct Mesh {
    /// Node coordinates in meters.
    pub nodes: Vec<[f64; 2]>,
    /// Node indices per triangle, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges forming one closed loop around the domain.
    pub boundary_edges: Vec<BoundaryEdge>,
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mesh invariant violated: {0}")]
    InvariantViolated(String),
    #[error(
        "waypoint ({x}, {y}) is {distance:.3e} m from the nearest mesh node, beyond the snap tolerance {tolerance:.3e} m"
    )]
    SnapFailure {
        x: f64,
        y: f64,
        distance: f64,
        tolerance: f64,
    },
    #[error(
        "path endpoint ({x}, {y}) snapped to node {node}, which is not on the domain boundary"
    )]
    EndpointNotOnBoundary { x: f64, y: f64, node: usize },
    #[error("consecutive waypoints snapped to the same node {node}; zero-length segments are not allowed")]
    DuplicateConsecutiveNode { node: usize },
    #[error("no along-edge route between nodes {from} and {to}")]
    NoRoute { from: usize, to: usize },
    #[error("vasculature needs at least two waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("segment index {index} out of range for path with {segments} segments")]
    SegmentOutOfRange { index: usize, segments: usize },
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Signed area of triangle `t` (positive for counter-clockwise ordering).
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    /// Sum of all (signed) triangle areas.
    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// All node indices that lie on the boundary loop.
    pub fn boundary_nodes(&self) -> HashSet<usize> {
        self.boundary_edges
            .iter()
            .flat_map(|e| e.nodes.iter().copied())
            .collect()
    }

    /// Undirected edge set of the triangulation, keyed `(min, max)`.
    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        let mut edges = HashSet::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges
    }

    /// Checks every structural invariant; returns the first violation found.
    pub fn validate(&self) -> Result<(), MeshError> {
        if self.nodes.is_empty() || self.triangles.is_empty() {
            return Err(MeshError::InvariantViolated("empty mesh".into()));
        }
        let n = self.nodes.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(MeshError::InvariantViolated(format!(
                    "triangle {t} references a node out of range"
                )));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(MeshError::InvariantViolated(format!(
                    "triangle {t} has non-positive signed area"
                )));
            }
        }
        // Count how many triangles own each undirected edge.
        let mut owners: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *owners.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for edge in &self.boundary_edges {
            let [a, b] = edge.nodes;
            if a >= n || b >= n {
                return Err(MeshError::InvariantViolated(
                    "boundary edge references a node out of range".into(),
                ));
            }
            match owners.get(&(a.min(b), a.max(b))) {
                Some(1) => {}
                Some(k) => {
                    return Err(MeshError::InvariantViolated(format!(
                        "boundary edge ({a}, {b}) belongs to {k} triangles, expected exactly 1"
                    )))
                }
                None => {
                    return Err(MeshError::InvariantViolated(format!(
                        "boundary edge ({a}, {b}) is not an edge of any triangle"
                    )))
                }
            }
            *degree.entry(a).or_insert(0) += 1;
            *degree.entry(b).or_insert(0) += 1;
        }
        // Closed loop: every boundary node is met by exactly two boundary
        // edges, and the edges form a single connected cycle.
        if degree.values().any(|&d| d != 2) {
            return Err(MeshError::InvariantViolated(
                "boundary edges do not form a closed loop (node degree != 2)".into(),
            ));
        }
        if !self.boundary_edges.is_empty() {
            let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
            for e in &self.boundary_edges {
                adj.entry(e.nodes[0]).or_default().push(e.nodes[1]);
                adj.entry(e.nodes[1]).or_default().push(e.nodes[0]);
            }
            let start = self.boundary_edges[0].nodes[0];
            let mut seen = HashSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &adj[&v] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            if seen.len() != degree.len() {
                return Err(MeshError::InvariantViolated(
                    "boundary edges form more than one loop".into(),
                ));
            }
        }
        Ok(())
    }
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Structured triangulation of a `length` x `height` rectangle with `nx` x
/// `ny` cells, each split along its lower-left to upper-right diagonal.
///
/// All boundary edges are tagged [`BoundaryTag::Flux`]; callers re-tag sides
/// that carry prescribed temperatures before the mesh is wrapped into a
/// problem.
pub fn generate_rect_mesh(
    length: f64,
    height: f64,
    nx: usize,
    ny: usize,
) -> Result<Mesh, MeshError> {
    if !(length > 0.0) || !(height > 0.0) {
        return Err(MeshError::InvalidArgument(format!(
            "domain dimensions must be positive, got {length} x {height}"
        )));
    }
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidArgument(format!(
            "cell counts must be at least 1, got {nx} x {ny}"
        )));
    }
    let dx = length / nx as f64;
    let dy = height / ny as f64;
    let node = |i: usize, j: usize| j * (nx + 1) + i;

    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([i as f64 * dx, j as f64 * dy]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (
                node(i, j),
                node(i + 1, j),
                node(i + 1, j + 1),
                node(i, j + 1),
            );
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }

    // Counter-clockwise boundary loop: bottom, right, top, left.
    let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_edges.push([node(i, 0), node(i + 1, 0)]);
    }
    for j in 0..ny {
        boundary_edges.push([node(nx, j), node(nx, j + 1)]);
    }
    for i in (0..nx).rev() {
        boundary_edges.push([node(i + 1, ny), node(i, ny)]);
    }
    for j in (0..ny).rev() {
        boundary_edges.push([node(0, j + 1), node(0, j)]);
    }
    let boundary_edges = boundary_edges
        .into_iter()
        .map(|nodes| BoundaryEdge {
            nodes,
            tag: BoundaryTag::Flux,
        })
        .collect();

    let mesh = Mesh {
        nodes,
        triangles,
        boundary_edges,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// The embedded vasculature: an ordered walk along mesh edges from the inlet
/// (first node, arc-length 0) to the outlet (last node).
#[derive(Clone, Debug)]
pub struct VasculaturePath {
    /// Mesh node indices along the path; first is the inlet, last the outlet.
    pub node_sequence: Vec<usize>,
    /// Length of each segment in meters.
    pub segment_lengths: Vec<f64>,
    /// Arc-length at each node, starting at 0 at the inlet.
    pub cumulative_arclength: Vec<f64>,
    /// Unit tangent per segment, pointing toward increasing arc-length.
    pub unit_tangents: Vec<[f64; 2]>,
}

impl VasculaturePath {
    pub fn inlet_node(&self) -> usize {
        self.node_sequence[0]
    }

    pub fn outlet_node(&self) -> usize {
        *self.node_sequence.last().unwrap()
    }

    pub fn total_arclength(&self) -> f64 {
        *self.cumulative_arclength.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.segment_lengths.len()
    }
}

/// Unit tangent of segment `index` (from node `index` to node `index + 1`).
pub fn path_tangent_at(path: &VasculaturePath, index: usize) -> Result<[f64; 2], MeshError> {
    path.unit_tangents
        .get(index)
        .copied()
        .ok_or(MeshError::SegmentOutOfRange {
            index,
            segments: path.segment_count(),
        })
}

/// Snaps `waypoints` to mesh nodes and connects consecutive snapped nodes by
/// the shortest along-edge route (deterministic tie-breaking by node index).
///
/// The snap tolerance is `1e-9` times the diagonal of the mesh bounding box.
/// The first and last waypoints must land on boundary nodes.
pub fn embed_vasculature(
    mesh: &Mesh,
    waypoints: &[[f64; 2]],
) -> Result<VasculaturePath, MeshError> {
    if waypoints.len() < 2 {
        return Err(MeshError::TooFewWaypoints(waypoints.len()));
    }
    let tolerance = 1e-9 * bounding_box_diagonal(mesh);

    let mut snapped = Vec::with_capacity(waypoints.len());
    for &[x, y] in waypoints {
        let (node, dist) = nearest_node(mesh, [x, y]);
        if dist > tolerance {
            return Err(MeshError::SnapFailure {
                x,
                y,
                distance: dist,
                tolerance,
            });
        }
        snapped.push(node);
    }
    for pair in snapped.windows(2) {
        if pair[0] == pair[1] {
            return Err(MeshError::DuplicateConsecutiveNode { node: pair[0] });
        }
    }
    let boundary = mesh.boundary_nodes();
    for (&node, &[x, y]) in [(&snapped[0], &waypoints[0])]
        .into_iter()
        .chain([(snapped.last().unwrap(), waypoints.last().unwrap())])
    {
        if !boundary.contains(&node) {
            return Err(MeshError::EndpointNotOnBoundary { x, y, node });
        }
    }

    let adjacency = edge_adjacency(mesh);
    let mut node_sequence = vec![snapped[0]];
    for pair in snapped.windows(2) {
        let leg = shortest_edge_route(mesh, &adjacency, pair[0], pair[1])?;
        node_sequence.extend_from_slice(&leg[1..]);
    }

    let mut segment_lengths = Vec::with_capacity(node_sequence.len() - 1);
    let mut cumulative_arclength = vec![0.0];
    let mut unit_tangents = Vec::with_capacity(node_sequence.len() - 1);
    for pair in node_sequence.windows(2) {
        let a = mesh.nodes[pair[0]];
        let b = mesh.nodes[pair[1]];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        if len == 0.0 {
            return Err(MeshError::DuplicateConsecutiveNode { node: pair[0] });
        }
        segment_lengths.push(len);
        cumulative_arclength.push(cumulative_arclength.last().unwrap() + len);
        unit_tangents.push([dx / len, dy / len]);
    }

    Ok(VasculaturePath {
        node_sequence,
        segment_lengths,
        cumulative_arclength,
        unit_tangents,
    })
}

fn bounding_box_diagonal(mesh: &Mesh) -> f64 {
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in &mesh.nodes {
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    (max[0] - min[0]).hypot(max[1] - min[1])
}

fn nearest_node(mesh: &Mesh, p: [f64; 2]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, q) in mesh.nodes.iter().enumerate() {
        let d = (q[0] - p[0]).hypot(q[1] - p[1]);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn edge_adjacency(mesh: &Mesh) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); mesh.nodes.len()];
    for (a, b) in mesh.edge_set() {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    adjacency
}

/// Dijkstra over the mesh edge graph weighted by Euclidean edge length.
/// Equal-length routes are broken deterministically toward lower node
/// indices; on structured grids an axis-aligned displacement therefore maps
/// to the straight staircase route.
fn shortest_edge_route(
    mesh: &Mesh,
    adjacency: &[Vec<usize>],
    from: usize,
    to: usize,
) -> Result<Vec<usize>, MeshError> {
    #[derive(PartialEq)]
    struct Entry {
        dist: f64,
        node: usize,
    }
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            // Min-heap on (dist, node).
            other
                .dist
                .partial_cmp(&self.dist)
                .unwrap()
                .then(other.node.cmp(&self.node))
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let n = mesh.nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        node: from,
    });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        if node == to {
            break;
        }
        let p = mesh.nodes[node];
        for &next in &adjacency[node] {
            let q = mesh.nodes[next];
            let nd = d + (q[0] - p[0]).hypot(q[1] - p[1]);
            if nd < dist[next] || (nd == dist[next] && node < prev[next]) {
                dist[next] = nd;
                prev[next] = node;
                heap.push(Entry {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    if dist[to].is_infinite() {
        return Err(MeshError::NoRoute { from, to });
    }
    let mut route = vec![to];
    let mut cursor = to;
    while cursor != from {
        cursor = prev[cursor];
        route.push(cursor);
    }
    route.reverse();
    Ok(route)
}
