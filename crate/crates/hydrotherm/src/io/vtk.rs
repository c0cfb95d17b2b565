//! Legacy ASCII VTK output of one state snapshot: nodal temperature and
//! pressure scalars plus the per-cell Darcy velocity vector.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sim::State;

/// Nine significant digits; enough to round-trip the cross-worker 1e-8
/// agreement without bloating files.
pub(crate) fn fmt_g9(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v }; // normalize -0.0
    format!("{v:.8e}")
}

/// Writes `fields` in legacy ASCII VTK (unstructured grid of hexahedra).
pub fn write_vtk(mesh: &Mesh, state: &State, path: &Path) -> Result<()> {
    let ioerr = |e| Error::io(path.display().to_string(), e);
    let file = std::fs::File::create(path).map_err(ioerr)?;
    let mut w = std::io::BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        writeln!(w, "# vtk DataFile Version 3.0")?;
        writeln!(w, "hydrotherm fields step {} time_s {}", state.step, fmt_g9(state.time))?;
        writeln!(w, "ASCII")?;
        writeln!(w, "DATASET UNSTRUCTURED_GRID")?;

        writeln!(w, "POINTS {} double", mesh.node_count())?;
        for n in &mesh.nodes {
            writeln!(w, "{} {} {}", fmt_g9(n[0]), fmt_g9(n[1]), fmt_g9(n[2]))?;
        }

        let m = mesh.cell_count();
        writeln!(w, "CELLS {} {}", m, 9 * m)?;
        for cell in &mesh.cells {
            write!(w, "8")?;
            for &node in cell {
                write!(w, " {node}")?;
            }
            writeln!(w)?;
        }
        writeln!(w, "CELL_TYPES {m}")?;
        for _ in 0..m {
            writeln!(w, "12")?;
        }

        writeln!(w, "POINT_DATA {}", mesh.node_count())?;
        writeln!(w, "SCALARS temperature_K double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for &t in &state.temperature {
            writeln!(w, "{}", fmt_g9(t))?;
        }
        writeln!(w, "SCALARS pressure_Pa double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for &p in &state.pressure {
            writeln!(w, "{}", fmt_g9(p))?;
        }

        writeln!(w, "CELL_DATA {m}")?;
        writeln!(w, "VECTORS darcy_velocity_m_per_s double")?;
        for q in &state.velocity {
            writeln!(w, "{} {} {}", fmt_g9(q[0]), fmt_g9(q[1]), fmt_g9(q[2]))?;
        }
        w.flush()
    };
    run().map_err(ioerr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_layered_box;

    fn tiny_state(mesh: &Mesh) -> State {
        State {
            time: 0.0,
            step: 0,
            pressure: vec![1.0e5; mesh.node_count()],
            temperature: vec![287.45; mesh.node_count()],
            velocity: vec![[0.0, 0.0, 0.0]; mesh.cell_count()],
        }
    }

    #[test]
    fn single_cell_file_shape() {
        let mesh = generate_layered_box((1.0, 1.0, 1.0), &[], (1, 1, 1)).unwrap();
        let state = tiny_state(&mesh);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fields_000000.vtk");
        write_vtk(&mesh, &state, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert!(text.contains("POINTS 8 double"));
        assert!(text.contains("CELLS 1 9"));
        assert!(text.contains("CELL_TYPES 1"));
        assert!(text.contains("\n12\n"));
        assert!(text.contains("SCALARS temperature_K double 1"));
        assert!(text.contains("SCALARS pressure_Pa double 1"));
        assert!(text.contains("VECTORS darcy_velocity_m_per_s double"));
        // Constant temperature shows up verbatim at 9 significant digits.
        assert_eq!(text.matches("2.87450000e2").count(), 8);
    }
}
