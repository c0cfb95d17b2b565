//! Field sampling along observation lines by trilinear interpolation.

use crate::error::{Error, Result};

use super::shape::{invert_map, shape_values};
use super::{Mesh, ObservationLine};

/// One interpolated point. `value` is `None` when the point lies outside the
/// mesh (no extrapolation).
#[derive(Debug, Clone, PartialEq)]
pub struct LineSample {
    pub arc_length: f64,
    pub position: [f64; 3],
    pub value: Option<f64>,
}

/// Locates the cell containing `p` and returns its reference coordinates.
/// Candidates come from the locator grid in cell order, so ties on shared
/// faces resolve deterministically.
pub fn locate_point(mesh: &Mesh, p: [f64; 3]) -> Option<(usize, [f64; 3])> {
    let grid = &mesh.locator;
    if grid.buckets.is_empty() {
        return None;
    }
    let mut idx = [0usize; 3];
    for d in 0..3 {
        let i = ((p[d] - grid.origin[d]) / grid.widths[d]).floor() as isize;
        if i < -1 || i > grid.dims[d] as isize {
            return None;
        }
        idx[d] = i.clamp(0, grid.dims[d] as isize - 1) as usize;
    }
    let bucket = &grid.buckets[idx[0] + grid.dims[0] * (idx[1] + grid.dims[1] * idx[2])];
    for &cell in bucket {
        let nodes = mesh.cell_nodes(cell as usize);
        if let Some(xi) = invert_map(&nodes, p, 1e-8) {
            return Some((cell as usize, xi));
        }
    }
    None
}

/// Interpolates `field` (one value per node) at `p`.
pub fn interpolate_at(mesh: &Mesh, field: &[f64], p: [f64; 3]) -> Option<f64> {
    let (cell, xi) = locate_point(mesh, p)?;
    let n = shape_values(xi);
    let conn = &mesh.cells[cell];
    let mut value = 0.0;
    for a in 0..8 {
        value += n[a] * field[conn[a] as usize];
    }
    Some(value)
}

/// Samples `field` at `sample_count` equally spaced points along the line.
pub fn sample_line(mesh: &Mesh, field: &[f64], line: &ObservationLine) -> Result<Vec<LineSample>> {
    if field.len() != mesh.node_count() {
        return Err(Error::config(format!(
            "field length {} does not match node count {}",
            field.len(),
            mesh.node_count()
        )));
    }
    line.validate(mesh)?;
    let len: f64 = (0..3)
        .map(|d| (line.end[d] - line.start[d]).powi(2))
        .sum::<f64>()
        .sqrt();
    let n = line.sample_count;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let p = [
            line.start[0] + t * (line.end[0] - line.start[0]),
            line.start[1] + t * (line.end[1] - line.start[1]),
            line.start[2] + t * (line.end[2] - line.start[2]),
        ];
        out.push(LineSample {
            arc_length: t * len,
            position: p,
            value: interpolate_at(mesh, field, p),
        });
    }
    Ok(out)
}
