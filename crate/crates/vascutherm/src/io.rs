//! Field and mesh export: CSV nodal tables, legacy VTK unstructured grids,
//! and metrics JSON. Formatting uses shortest round-trip floats, so repeated
//! runs of the same configuration produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::mesh::Mesh;
use crate::solver::TemperatureField;

/// Nodal field as `node_id,x,y,theta_K` CSV.
pub fn field_csv(mesh: &Mesh, field: &TemperatureField) -> String {
    let mut out = String::with_capacity(mesh.node_count() * 32);
    out.push_str("node_id,x,y,theta_K\n");
    for (i, (node, theta)) in mesh.nodes.iter().zip(&field.values).enumerate() {
        writeln!(out, "{},{},{},{}", i, node[0], node[1], theta).unwrap();
    }
    out
}

/// Legacy VTK unstructured-grid ASCII export (cell type 5, triangles), with
/// an optional nodal temperature array.
pub fn mesh_vtk(mesh: &Mesh, field: Option<&TemperatureField>, title: &str) -> String {
    let mut out = String::with_capacity(mesh.node_count() * 40);
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(title);
    out.push('\n');
    out.push_str("ASCII\n");
    out.push_str("DATASET UNSTRUCTURED_GRID\n");

    writeln!(out, "POINTS {} double", mesh.node_count()).unwrap();
    for node in &mesh.nodes {
        writeln!(out, "{} {} 0", node[0], node[1]).unwrap();
    }

    let m = mesh.triangle_count();
    writeln!(out, "CELLS {} {}", m, 4 * m).unwrap();
    for tri in &mesh.triangles {
        writeln!(out, "3 {} {} {}", tri[0], tri[1], tri[2]).unwrap();
    }
    writeln!(out, "CELL_TYPES {m}").unwrap();
    for _ in 0..m {
        out.push_str("5\n");
    }

    if let Some(field) = field {
        writeln!(out, "POINT_DATA {}", mesh.node_count()).unwrap();
        out.push_str("SCALARS temperature double 1\n");
        out.push_str("LOOKUP_TABLE default\n");
        for theta in &field.values {
            writeln!(out, "{theta}").unwrap();
        }
    }
    out
}

pub fn write_field_csv(path: &Path, mesh: &Mesh, field: &TemperatureField) -> io::Result<()> {
    fs::write(path, field_csv(mesh, field))
}

pub fn write_mesh_vtk(
    path: &Path,
    mesh: &Mesh,
    field: Option<&TemperatureField>,
    title: &str,
) -> io::Result<()> {
    fs::write(path, mesh_vtk(mesh, field, title))
}
