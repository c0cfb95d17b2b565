//! Mesh generators: layered boxes on tensor-product grids and one-cell-thick
//! well wedges with geometrically graded radial spacing.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{BoundaryFace, CellGrid, Mesh};

/// Merges `planes` into `coords`, deduplicating within `tol`. Both inputs
/// must lie within the span of `coords`.
fn insert_planes(coords: &mut Vec<f64>, planes: &[f64], tol: f64) {
    for &p in planes {
        coords.push(p);
    }
    coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
    coords.dedup_by(|a, b| (*a - *b).abs() <= tol);
}

fn uniform(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

/// Assigns the layer index for a depth given the sorted interface depths.
/// Layer ids count top-down: depth above the first interface is layer 0.
fn layer_of(depth: f64, interfaces: &[f64]) -> u16 {
    interfaces.iter().filter(|&&d| d < depth).count() as u16
}

fn build_locator(mesh: &Mesh) -> CellGrid {
    let (lo, hi) = mesh.bounding_box();
    let ncells = mesh.cell_count().max(1);
    let per_axis = ((ncells as f64).cbrt().ceil() as usize).clamp(1, 64);
    let dims = [per_axis, per_axis, per_axis];
    let widths = [
        ((hi[0] - lo[0]) / dims[0] as f64).max(1e-12),
        ((hi[1] - lo[1]) / dims[1] as f64).max(1e-12),
        ((hi[2] - lo[2]) / dims[2] as f64).max(1e-12),
    ];
    let mut buckets = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
    let clamp_idx = |v: f64, d: usize| -> usize {
        let i = ((v - lo[d]) / widths[d]).floor() as isize;
        i.clamp(0, dims[d] as isize - 1) as usize
    };
    for cell in 0..mesh.cell_count() {
        let nodes = mesh.cell_nodes(cell);
        let mut clo = [f64::INFINITY; 3];
        let mut chi = [f64::NEG_INFINITY; 3];
        for n in &nodes {
            for d in 0..3 {
                clo[d] = clo[d].min(n[d]);
                chi[d] = chi[d].max(n[d]);
            }
        }
        let i0 = clamp_idx(clo[0], 0);
        let i1 = clamp_idx(chi[0], 0);
        let j0 = clamp_idx(clo[1], 1);
        let j1 = clamp_idx(chi[1], 1);
        let k0 = clamp_idx(clo[2], 2);
        let k1 = clamp_idx(chi[2], 2);
        for k in k0..=k1 {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[i + dims[0] * (j + dims[1] * k)].push(cell as u32);
                }
            }
        }
    }
    CellGrid {
        origin: lo,
        widths,
        dims,
        buckets,
    }
}

/// Builds a box mesh from explicit, strictly increasing coordinate arrays.
/// `layer_interfaces` are depths below the top plane; every interface must
/// coincide with a z plane (use [`generate_layered_box`] or insert the planes
/// yourself). Boundary markers: `xmin`, `xmax`, `ymin`, `ymax`, `bottom`,
/// `top`.
pub fn generate_tensor_box(xs: &[f64], ys: &[f64], zs: &[f64], layer_interfaces: &[f64]) -> Result<Mesh> {
    for (name, c) in [("x", xs), ("y", ys), ("z", zs)] {
        if c.len() < 2 {
            return Err(Error::config(format!("{name} grid needs at least 2 planes")));
        }
        if c.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(format!("{name} grid must be strictly increasing")));
        }
    }
    let z_top = *zs.last().unwrap();
    let z_bot = zs[0];
    let depth_span = z_top - z_bot;
    let tol = 1e-9 * depth_span.max(1.0);
    let mut interfaces = layer_interfaces.to_vec();
    interfaces.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in interfaces.windows(2) {
        if (w[1] - w[0]).abs() <= tol {
            return Err(Error::config("duplicate layer interface depth".to_string()));
        }
    }
    for &d in &interfaces {
        if d <= 0.0 || d >= depth_span {
            return Err(Error::config(format!(
                "layer interface at depth {d} m lies outside the domain (0, {depth_span}) m"
            )));
        }
        if !zs.iter().any(|&z| (z_top - z - d).abs() <= tol) {
            return Err(Error::config(format!(
                "layer interface at depth {d} m does not coincide with a mesh plane"
            )));
        }
    }

    let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);
    let node_id = |i: usize, j: usize, k: usize| (i + xs.len() * (j + ys.len() * k)) as u32;

    let mut nodes = Vec::with_capacity(xs.len() * ys.len() * zs.len());
    for k in 0..zs.len() {
        for j in 0..ys.len() {
            for i in 0..xs.len() {
                nodes.push([xs[i], ys[j], zs[k]]);
            }
        }
    }

    let mut cells = Vec::with_capacity(nx * ny * nz);
    let mut cell_material = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                cells.push([
                    node_id(i, j, k),
                    node_id(i + 1, j, k),
                    node_id(i + 1, j + 1, k),
                    node_id(i, j + 1, k),
                    node_id(i, j, k + 1),
                    node_id(i + 1, j, k + 1),
                    node_id(i + 1, j + 1, k + 1),
                    node_id(i, j + 1, k + 1),
                ]);
                let zc = 0.5 * (zs[k] + zs[k + 1]);
                cell_material.push(layer_of(z_top - zc, &interfaces));
            }
        }
    }

    let markers: Vec<String> = ["xmin", "xmax", "ymin", "ymax", "bottom", "top"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let cell_id = |i: usize, j: usize, k: usize| (i + nx * (j + ny * k)) as u32;
    let mut boundary_faces = Vec::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = cell_id(i, j, k);
                if i == 0 {
                    boundary_faces.push(BoundaryFace { cell: c, local_face: 0, marker: 0 });
                }
                if i == nx - 1 {
                    boundary_faces.push(BoundaryFace { cell: c, local_face: 1, marker: 1 });
                }
                if j == 0 {
                    boundary_faces.push(BoundaryFace { cell: c, local_face: 2, marker: 2 });
                }
                if j == ny - 1 {
                    boundary_faces.push(BoundaryFace { cell: c, local_face: 3, marker: 3 });
                }
                if k == 0 {
                    boundary_faces.push(BoundaryFace { cell: c, local_face: 4, marker: 4 });
                }
                if k == nz - 1 {
                    boundary_faces.push(BoundaryFace { cell: c, local_face: 5, marker: 5 });
                }
            }
        }
    }

    let n_cells = cells.len();
    let mut mesh = Mesh {
        nodes,
        cells,
        cell_material,
        boundary_faces,
        markers,
        node_regions: BTreeMap::new(),
        partition: vec![0; n_cells],
        ghost_cells: vec![Vec::new()],
        locator: CellGrid::default(),
        surface_z: z_top,
    };
    mesh.locator = build_locator(&mesh);
    mesh.validate_jacobians()?;
    Ok(mesh)
}

/// Structured mesh of a layered box `[0, Lx] x [0, Ly] x [0, Lz]` (z up, top
/// surface at z = Lz). Layer interfaces are depths below the top; each is
/// inserted as a mesh plane so no cell straddles an interface.
pub fn generate_layered_box(
    extent: (f64, f64, f64),
    layer_interfaces: &[f64],
    base_resolution: (usize, usize, usize),
) -> Result<Mesh> {
    let (lx, ly, lz) = extent;
    let (nx, ny, nz) = base_resolution;
    if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
        return Err(Error::config("box extent must be positive".to_string()));
    }
    if nx < 1 || ny < 1 || nz < 1 {
        return Err(Error::config("resolution must be at least 1 cell per axis".to_string()));
    }
    let xs = uniform(nx, 0.0, lx);
    let ys = uniform(ny, 0.0, ly);
    let mut zs = uniform(nz, 0.0, lz);
    for &d in layer_interfaces {
        if d <= 0.0 || d >= lz {
            return Err(Error::config(format!(
                "layer interface at depth {d} m lies outside the domain (0, {lz}) m"
            )));
        }
    }
    let planes: Vec<f64> = layer_interfaces.iter().map(|d| lz - d).collect();
    insert_planes(&mut zs, &planes, 1e-9 * lz);
    generate_tensor_box(&xs, &ys, &zs, layer_interfaces)
}

/// Parameters of a well wedge: a one-cell-thick circumferential sector from
/// the wellbore radius out to `radius`, `depth` deep, with geometric radial
/// grading (`grading` = ratio of consecutive radial cell widths).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WedgeSpec {
    pub radius: f64,
    pub well_radius: f64,
    pub depth: f64,
    pub wedge_angle_deg: f64,
    pub grading: f64,
    pub n_r: usize,
    pub n_z: usize,
}

/// Radial node positions with geometric spacing.
fn graded_radii(r0: f64, r1: f64, grading: f64, n: usize) -> Vec<f64> {
    let mut rs = Vec::with_capacity(n + 1);
    rs.push(r0);
    if (grading - 1.0).abs() < 1e-12 {
        for i in 1..=n {
            rs.push(r0 + (r1 - r0) * i as f64 / n as f64);
        }
    } else {
        let first = (r1 - r0) * (grading - 1.0) / (grading.powi(n as i32) - 1.0);
        let mut r = r0;
        let mut dr = first;
        for i in 1..=n {
            r += dr;
            dr *= grading;
            rs.push(if i == n { r1 } else { r });
        }
    }
    rs
}

/// One-cell-thick wedge of hexahedra in (r, θ, z) mapped to Cartesian
/// coordinates, symmetric about the x axis. Boundary markers: `wellbore`
/// (innermost radial face), `outer`, `front`/`back` (the θ faces), `bottom`,
/// `top`.
pub fn generate_wedge(spec: &WedgeSpec, layer_interfaces: &[f64]) -> Result<Mesh> {
    if !(spec.wedge_angle_deg > 0.0 && spec.wedge_angle_deg <= 10.0) {
        return Err(Error::config(format!(
            "wedge angle must lie in (0, 10] degrees, got {}",
            spec.wedge_angle_deg
        )));
    }
    if spec.grading < 1.0 {
        return Err(Error::config("radial grading must be >= 1".to_string()));
    }
    if !(spec.well_radius > 0.0 && spec.radius > spec.well_radius && spec.depth > 0.0) {
        return Err(Error::config(format!(
            "degenerate wedge geometry: well_radius {} m, radius {} m, depth {} m",
            spec.well_radius, spec.radius, spec.depth
        )));
    }
    if spec.n_r < 1 || spec.n_z < 1 {
        return Err(Error::config("wedge needs at least one radial and one vertical cell".to_string()));
    }
    for &d in layer_interfaces {
        if d <= 0.0 || d >= spec.depth {
            return Err(Error::config(format!(
                "layer interface at depth {d} m lies outside the domain (0, {}) m",
                spec.depth
            )));
        }
    }

    let rs = graded_radii(spec.well_radius, spec.radius, spec.grading, spec.n_r);
    let half = spec.wedge_angle_deg.to_radians() / 2.0;
    let thetas = [-half, half];
    let mut zs = uniform(spec.n_z, 0.0, spec.depth);
    let planes: Vec<f64> = layer_interfaces.iter().map(|d| spec.depth - d).collect();
    insert_planes(&mut zs, &planes, 1e-9 * spec.depth);
    let z_top = spec.depth;

    let n_r_nodes = rs.len();
    let node_id = |i: usize, j: usize, k: usize| (i + n_r_nodes * (j + 2 * k)) as u32;
    let mut nodes = Vec::with_capacity(n_r_nodes * 2 * zs.len());
    for &z in &zs {
        for &theta in &thetas {
            for &r in &rs {
                nodes.push([r * theta.cos(), r * theta.sin(), z]);
            }
        }
    }

    let mut interfaces = layer_interfaces.to_vec();
    interfaces.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n_r = spec.n_r;
    let n_z = zs.len() - 1;
    let mut cells = Vec::with_capacity(n_r * n_z);
    let mut cell_material = Vec::with_capacity(n_r * n_z);
    for k in 0..n_z {
        for i in 0..n_r {
            cells.push([
                node_id(i, 0, k),
                node_id(i + 1, 0, k),
                node_id(i + 1, 1, k),
                node_id(i, 1, k),
                node_id(i, 0, k + 1),
                node_id(i + 1, 0, k + 1),
                node_id(i + 1, 1, k + 1),
                node_id(i, 1, k + 1),
            ]);
            let zc = 0.5 * (zs[k] + zs[k + 1]);
            cell_material.push(layer_of(z_top - zc, &interfaces));
        }
    }

    let markers: Vec<String> = ["wellbore", "outer", "front", "back", "bottom", "top"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let cell_id = |i: usize, k: usize| (i + n_r * k) as u32;
    let mut boundary_faces = Vec::new();
    for k in 0..n_z {
        for i in 0..n_r {
            let c = cell_id(i, k);
            if i == 0 {
                boundary_faces.push(BoundaryFace { cell: c, local_face: 0, marker: 0 });
            }
            if i == n_r - 1 {
                boundary_faces.push(BoundaryFace { cell: c, local_face: 1, marker: 1 });
            }
            boundary_faces.push(BoundaryFace { cell: c, local_face: 2, marker: 2 });
            boundary_faces.push(BoundaryFace { cell: c, local_face: 3, marker: 3 });
            if k == 0 {
                boundary_faces.push(BoundaryFace { cell: c, local_face: 4, marker: 4 });
            }
            if k == n_z - 1 {
                boundary_faces.push(BoundaryFace { cell: c, local_face: 5, marker: 5 });
            }
        }
    }

    let n_cells = cells.len();
    let mut mesh = Mesh {
        nodes,
        cells,
        cell_material,
        boundary_faces,
        markers,
        node_regions: BTreeMap::new(),
        partition: vec![0; n_cells],
        ghost_cells: vec![Vec::new()],
        locator: CellGrid::default(),
        surface_z: z_top,
    };
    mesh.locator = build_locator(&mesh);
    mesh.validate_jacobians()?;
    Ok(mesh)
}
